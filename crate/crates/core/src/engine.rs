//! Normalized seeds over tropical semifields, seed mutation, and the
//! exchange graph of a seed with its cluster variables written as exact
//! Laurent polynomials in the initial cluster.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::matrix::ExchangeMatrix;
use crate::rootsys::{LatticeVector, RootId, RootSystem};

/// Trop(p_j : j ∈ J), the free abelian group on the generators with ⊕ the
/// componentwise minimum of exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct TropSemifield {
    labels: Vec<String>,
}

impl TropSemifield {
    pub fn new(labels: Vec<String>) -> Self {
        TropSemifield { labels }
    }

    /// Trop() with no generators: every coefficient is 1.
    pub fn trivial() -> Self {
        TropSemifield::default()
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn one(&self) -> TropElement {
        TropElement(vec![0; self.rank()])
    }

    pub fn generator(&self, j: usize) -> TropElement {
        let mut e = vec![0; self.rank()];
        e[j] = 1;
        TropElement(e)
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn render(&self, e: &TropElement) -> String {
        let s = monomial_string(&e.0, &self.labels);
        if s.is_empty() {
            "1".into()
        } else {
            s
        }
    }
}

/// An element of a tropical semifield, as its exponent vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TropElement(pub Vec<i64>);

impl TropElement {
    pub fn one(m: usize) -> Self {
        TropElement(vec![0; m])
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, o: &Self) -> Self {
        TropElement(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn div(&self, o: &Self) -> Self {
        TropElement(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    pub fn pow(&self, k: i64) -> Self {
        TropElement(self.0.iter().map(|a| a * k).collect())
    }
}

/// a ⊕ b.
pub fn trop_add(a: &TropElement, b: &TropElement) -> TropElement {
    TropElement(a.0.iter().zip(&b.0).map(|(x, y)| *x.min(y)).collect())
}

/// The pair (p⁺, p⁻) attached to one cluster position.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoefficientPair {
    pub plus: TropElement,
    pub minus: TropElement,
}

impl CoefficientPair {
    pub fn trivial(m: usize) -> Self {
        CoefficientPair { plus: TropElement::one(m), minus: TropElement::one(m) }
    }

    pub fn ratio(&self) -> TropElement {
        self.plus.div(&self.minus)
    }

    pub fn is_normalized(&self) -> bool {
        trop_add(&self.plus, &self.minus).is_one()
    }

    pub fn swapped(&self) -> Self {
        CoefficientPair { plus: self.minus.clone(), minus: self.plus.clone() }
    }
}

/// The unique normalized pair with ratio u: (u/(1⊕u), 1/(1⊕u)).
pub fn normalize_ratio(u: &TropElement) -> CoefficientPair {
    let s = trop_add(u, &TropElement::one(u.0.len()));
    CoefficientPair { plus: u.div(&s), minus: TropElement::one(u.0.len()).div(&s) }
}

/// A Laurent polynomial in `nx` cluster variables and `np` semifield
/// generators with integer coefficients. Keys are exponent vectors, x part
/// first; the largest key in lexicographic order is the leading term.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LaurentExpression {
    nx: usize,
    np: usize,
    terms: BTreeMap<Vec<i32>, BigInt>,
}

impl LaurentExpression {
    pub fn zero(nx: usize, np: usize) -> Self {
        LaurentExpression { nx, np, terms: BTreeMap::new() }
    }

    pub fn constant(nx: usize, np: usize, c: impl Into<BigInt>) -> Self {
        let mut e = Self::zero(nx, np);
        e.add_term(vec![0; nx + np], c.into());
        e
    }

    pub fn one(nx: usize, np: usize) -> Self {
        Self::constant(nx, np, 1)
    }

    /// The initial cluster variable x_{i+1}.
    pub fn var(nx: usize, np: usize, i: usize) -> Self {
        let mut k = vec![0; nx + np];
        k[i] = 1;
        Self::monomial(nx, np, k, BigInt::one())
    }

    pub fn monomial(nx: usize, np: usize, exps: Vec<i32>, c: BigInt) -> Self {
        assert_eq!(exps.len(), nx + np);
        let mut e = Self::zero(nx, np);
        e.add_term(exps, c);
        e
    }

    /// The semifield element p^e as a Laurent monomial.
    pub fn coefficient(nx: usize, p: &TropElement) -> Self {
        let np = p.0.len();
        let mut k = vec![0; nx];
        k.extend(p.0.iter().map(|&e| e as i32));
        Self::monomial(nx, np, k, BigInt::one())
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn np(&self) -> usize {
        self.np
    }

    pub fn terms(&self) -> &BTreeMap<Vec<i32>, BigInt> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    fn add_term(&mut self, k: Vec<i32>, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(k);
        match slot {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn same_ring(&self, o: &Self) {
        assert!(self.nx == o.nx && self.np == o.np, "Laurent expressions over different rings");
    }

    pub fn add(&self, o: &Self) -> Self {
        self.same_ring(o);
        let mut r = self.clone();
        for (k, c) in &o.terms {
            r.add_term(k.clone(), c.clone());
        }
        r
    }

    pub fn neg(&self) -> Self {
        LaurentExpression { nx: self.nx, np: self.np, terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.same_ring(o);
        let mut r = Self::zero(self.nx, self.np);
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                let k = a.iter().zip(b).map(|(x, y)| x + y).collect();
                r.add_term(k, ca * cb);
            }
        }
        r
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut r = Self::one(self.nx, self.np);
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        let mut r = Self::zero(self.nx, self.np);
        for (k, v) in &self.terms {
            r.add_term(k.clone(), v * c);
        }
        r
    }

    pub fn shift(&self, e: &[i32]) -> Self {
        LaurentExpression {
            nx: self.nx,
            np: self.np,
            terms: self.terms.iter().map(|(k, c)| (k.iter().zip(e).map(|(a, b)| a + b).collect(), c.clone())).collect(),
        }
    }

    pub fn leading(&self) -> Option<(&Vec<i32>, &BigInt)> {
        self.terms.iter().next_back()
    }

    /// Componentwise minimum of the exponents over all terms.
    pub fn min_exponents(&self) -> Vec<i32> {
        let mut m = vec![i32::MAX; self.nx + self.np];
        for k in self.terms.keys() {
            for (a, &b) in m.iter_mut().zip(k) {
                *a = (*a).min(b);
            }
        }
        m
    }

    pub fn max_exponents(&self) -> Vec<i32> {
        let mut m = vec![i32::MIN; self.nx + self.np];
        for k in self.terms.keys() {
            for (a, &b) in m.iter_mut().zip(k) {
                *a = (*a).max(b);
            }
        }
        m
    }

    /// Exact quotient self / d, or `InexactDivision`.
    ///
    /// Lexicographic order on exponent vectors is compatible with addition
    /// on the whole lattice, so long division by the leading term works for
    /// Laurent polynomials; the degree box of a true quotient bounds the loop.
    pub fn div_exact(&self, d: &Self) -> Result<Self> {
        self.same_ring(d);
        if d.is_zero() {
            return Err(Error::InexactDivision);
        }
        let mut q = Self::zero(self.nx, self.np);
        if self.is_zero() {
            return Ok(q);
        }
        let (amin, amax, dmin, dmax) = (self.min_exponents(), self.max_exponents(), d.min_exponents(), d.max_exponents());
        let lo: Vec<i32> = amin.iter().zip(&dmin).map(|(a, b)| a - b).collect();
        let hi: Vec<i32> = amax.iter().zip(&dmax).map(|(a, b)| a - b).collect();
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return Err(Error::InexactDivision);
        }
        let (dk, dc) = d.leading().map(|(k, c)| (k.clone(), c.clone())).unwrap();
        let mut rem = self.clone();
        while let Some((k, c)) = rem.leading() {
            let t: Vec<i32> = k.iter().zip(&dk).map(|(a, b)| a - b).collect();
            if t.iter().zip(lo.iter().zip(&hi)).any(|(x, (l, h))| x < l || x > h) {
                return Err(Error::InexactDivision);
            }
            let (tc, r) = c.div_rem(&dc);
            if !r.is_zero() {
                return Err(Error::InexactDivision);
            }
            for (k2, c2) in &d.terms {
                let key = k2.iter().zip(&t).map(|(a, b)| a + b).collect();
                rem.add_term(key, -(c2 * &tc));
            }
            q.add_term(t, tc);
        }
        Ok(q)
    }

    /// Replaces x_i by `vals[i]`; requires nonnegative x exponents.
    pub fn substitute(&self, vals: &[LaurentExpression]) -> Result<LaurentExpression> {
        assert_eq!(vals.len(), self.nx);
        let (nx, np) = (vals[0].nx, vals[0].np);
        assert_eq!(np, self.np);
        let mut powers: Vec<Vec<LaurentExpression>> = vals.iter().map(|v| vec![Self::one(nx, np), v.clone()]).collect();
        let mut out = Self::zero(nx, np);
        for (k, c) in &self.terms {
            let mut pk = vec![0; nx];
            pk.extend_from_slice(&k[self.nx..]);
            let mut t = Self::monomial(nx, np, pk, c.clone());
            for i in 0..self.nx {
                let e = k[i];
                if e < 0 {
                    return Err(Error::Inconsistent("substitution into a negative power".into()));
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().mul(&vals[i]);
                    powers[i].push(next);
                }
                t = t.mul(&powers[i][e as usize]);
            }
            out = out.add(&t);
        }
        Ok(out)
    }

    /// The vector d with d_i = max(0, −min exponent of x_i); self·x^d is a
    /// polynomial in the cluster variables.
    pub fn denominator_exponents(&self) -> Vec<i32> {
        self.min_exponents()[..self.nx].iter().map(|&m| if m == i32::MAX { 0 } else { (-m).max(0) }).collect()
    }

    /// Canonical string form such as "(1+x2)/x1".
    pub fn render(&self, xnames: &[String], pnames: &[String]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let d = self.denominator_exponents();
        let mut shift = d.clone();
        shift.extend(std::iter::repeat_n(0, self.np));
        let num = self.shift(&shift);
        let mut terms: Vec<(&Vec<i32>, &BigInt)> = num.terms.iter().collect();
        let nx = self.nx;
        terms.sort_by(|(a, _), (b, _)| {
            let da: i32 = a[..nx].iter().sum();
            let db: i32 = b[..nx].iter().sum();
            let pa: i32 = a[nx..].iter().sum();
            let pb: i32 = b[nx..].iter().sum();
            da.cmp(&db).then_with(|| b[..nx].cmp(&a[..nx])).then(pa.cmp(&pb)).then_with(|| b[nx..].cmp(&a[nx..]))
        });
        let mut s = String::new();
        for (i, (k, c)) in terms.iter().enumerate() {
            let mono = format!("{}{}", monomial_string(&k[nx..], pnames), monomial_string(&k[..nx], xnames));
            if c.is_negative() {
                s.push('-');
            } else if i > 0 {
                s.push('+');
            }
            let a = c.abs();
            if mono.is_empty() {
                s.push_str(&a.to_string());
            } else {
                if !a.is_one() {
                    s.push_str(&a.to_string());
                }
                s.push_str(&mono);
            }
        }
        let den = monomial_string(&d, xnames);
        if den.is_empty() {
            return s;
        }
        let num_s = if terms.len() > 1 { format!("({s})") } else { s };
        let factors = d.iter().filter(|&&e| e > 0).count();
        if factors > 1 {
            format!("{num_s}/({den})")
        } else {
            format!("{num_s}/{den}")
        }
    }

    pub fn default_names(&self) -> (Vec<String>, Vec<String>) {
        ((1..=self.nx).map(|i| format!("x{i}")).collect(), (1..=self.np).map(|j| format!("p{j}")).collect())
    }
}

impl fmt::Display for LaurentExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (x, p) = self.default_names();
        f.write_str(&self.render(&x, &p))
    }
}

fn monomial_string(exps: &[impl Copy + Into<i64>], names: &[String]) -> String {
    let mut s = String::new();
    for (e, n) in exps.iter().zip(names) {
        let e: i64 = (*e).into();
        match e {
            0 => {}
            1 => s.push_str(n),
            _ => s.push_str(&format!("{n}^{e}")),
        }
    }
    s
}

/// Σ = (x, p, B), cluster variables written in the initial cluster.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Seed {
    pub cluster: Vec<LaurentExpression>,
    pub coeffs: Vec<CoefficientPair>,
    pub matrix: ExchangeMatrix,
    pub semifield: TropSemifield,
}

impl Seed {
    /// The initial seed (x1..xn, p, B).
    pub fn initial(matrix: ExchangeMatrix, semifield: TropSemifield, coeffs: Vec<CoefficientPair>) -> Result<Self> {
        let n = matrix.n();
        if !matrix.is_sign_skew_symmetric() {
            return Err(Error::NotSignSkewSymmetric);
        }
        if coeffs.len() != n {
            return Err(Error::Inconsistent(format!("{} coefficient pairs for rank {n}", coeffs.len())));
        }
        let m = semifield.rank();
        for c in &coeffs {
            if c.plus.0.len() != m || c.minus.0.len() != m {
                return Err(Error::Inconsistent("coefficient exponent vector has the wrong length".into()));
            }
            if !c.is_normalized() {
                return Err(Error::Inconsistent("coefficient pair violates p+ ⊕ p- = 1".into()));
            }
        }
        let cluster = (0..n).map(|i| LaurentExpression::var(n, m, i)).collect();
        Ok(Seed { cluster, coeffs, matrix, semifield })
    }

    pub fn coefficient_free(matrix: ExchangeMatrix) -> Result<Self> {
        let n = matrix.n();
        Seed::initial(matrix, TropSemifield::trivial(), vec![CoefficientPair::trivial(0); n])
    }

    pub fn n(&self) -> usize {
        self.cluster.len()
    }

    /// Exponents over cluster positions of the two exchange monomials at z.
    pub fn exchange_monomials(&self, z: usize) -> (Vec<i64>, Vec<i64>) {
        let n = self.n();
        let col: Vec<i64> = (0..n).map(|x| self.matrix.entry(x, z)).collect();
        (col.iter().map(|&b| b.max(0)).collect(), col.iter().map(|&b| (-b).max(0)).collect())
    }

    /// The right-hand side p⁺M⁺ + p⁻M⁻ of the exchange relation at z.
    pub fn exchange_rhs(&self, z: usize) -> LaurentExpression {
        let (plus, minus) = self.exchange_monomials(z);
        let n0 = self.cluster[0].nx();
        let term = |p: &TropElement, e: &[i64]| {
            let mut t = LaurentExpression::coefficient(n0, p);
            for (x, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = t.mul(&self.cluster[x].pow(k as u32));
                }
            }
            t
        };
        term(&self.coeffs[z].plus, &plus).add(&term(&self.coeffs[z].minus, &minus))
    }

    /// Seed mutation in direction z.
    pub fn mutate(&self, z: usize) -> Result<Seed> {
        let n = self.n();
        if z >= n {
            return Err(Error::IndexOutOfRange { index: z, n });
        }
        let matrix = self.matrix.mutate(z)?;
        if !matrix.is_sign_skew_symmetric() {
            return Err(Error::NotSignSkewSymmetric);
        }
        let fresh = self.exchange_rhs(z).div_exact(&self.cluster[z])?;
        let pz = &self.coeffs[z];
        let coeffs = (0..n)
            .map(|x| {
                if x == z {
                    return pz.swapped();
                }
                let b = self.matrix.entry(z, x);
                let base = if b >= 0 { &pz.plus } else { &pz.minus };
                normalize_ratio(&base.pow(b).mul(&self.coeffs[x].ratio()))
            })
            .collect();
        let mut cluster = self.cluster.clone();
        cluster[z] = fresh;
        Ok(Seed { cluster, coeffs, matrix, semifield: self.semifield.clone() })
    }

    /// Positions sorted by their cluster variables.
    fn canonical_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.n()).collect();
        idx.sort_by(|&a, &b| self.cluster[a].cmp(&self.cluster[b]));
        idx
    }

    /// Key identifying the seed up to simultaneous relabeling of positions.
    fn key(&self) -> SeedKey {
        let order = self.canonical_order();
        let m = self.matrix.permuted(&order);
        SeedKey {
            cluster: order.iter().map(|&i| self.cluster[i].clone()).collect(),
            coeffs: order.iter().map(|&i| self.coeffs[i].clone()).collect(),
            matrix: m.to_i64_rows(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "matrix": self.matrix.to_json(),
            "coeff_pairs": self.coeffs.iter().map(|c| json!([c.plus.0, c.minus.0])).collect::<Vec<_>>(),
            "semifield": self.semifield.labels(),
            "cluster": self.cluster.iter().map(|v| self.render(v)).collect::<Vec<_>>(),
        })
    }

    /// Reads {"matrix", "coeff_pairs", "semifield"}; missing coefficient data
    /// means Trop() with trivial pairs.
    pub fn from_json(v: &Value) -> Result<Self> {
        let matrix = ExchangeMatrix::from_json(v.get("matrix").ok_or_else(|| Error::Parse("missing \"matrix\"".into()))?)?;
        let labels: Vec<String> = match v.get("semifield") {
            None => Vec::new(),
            Some(s) => s
                .as_array()
                .ok_or_else(|| Error::Parse("\"semifield\" must be a list".into()))?
                .iter()
                .map(|l| l.as_str().map(str::to_string).ok_or_else(|| Error::Parse("semifield labels must be strings".into())))
                .collect::<Result<_>>()?,
        };
        let m = labels.len();
        let exps = |x: &Value| -> Result<TropElement> {
            let a = x.as_array().ok_or_else(|| Error::Parse("exponent vector must be a list".into()))?;
            a.iter()
                .map(|e| e.as_i64().ok_or_else(|| Error::Parse("exponents must be integers".into())))
                .collect::<Result<Vec<_>>>()
                .map(TropElement)
        };
        let coeffs = match v.get("coeff_pairs") {
            None => vec![CoefficientPair::trivial(m); matrix.n()],
            Some(c) => c
                .as_array()
                .ok_or_else(|| Error::Parse("\"coeff_pairs\" must be a list".into()))?
                .iter()
                .map(|p| match p.as_array().map(Vec::as_slice) {
                    Some([a, b]) => Ok(CoefficientPair { plus: exps(a)?, minus: exps(b)? }),
                    _ => Err(Error::Parse("each coefficient pair must be [plus, minus]".into())),
                })
                .collect::<Result<_>>()?,
        };
        Seed::initial(matrix, TropSemifield::new(labels), coeffs)
    }

    pub fn render(&self, v: &LaurentExpression) -> String {
        let x: Vec<String> = (1..=v.nx()).map(|i| format!("x{i}")).collect();
        v.render(&x, self.semifield.labels())
    }
}

pub fn seed_mutate(s: &Seed, z: usize) -> Result<Seed> {
    s.mutate(z)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct SeedKey {
    cluster: Vec<LaurentExpression>,
    coeffs: Vec<CoefficientPair>,
    matrix: Vec<Vec<i64>>,
}

/// An edge of the exchange graph: seeds a < b exchanging position pa of a
/// with position pb of b.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct RunEdge {
    pub a: usize,
    pub pa: usize,
    pub b: usize,
    pub pb: usize,
}

/// Result of [`build_exchange_graph`].
#[derive(Clone, Debug)]
pub struct ExchangeRun {
    pub seeds: Vec<Seed>,
    /// For each seed and position, the neighbouring seed and the position of
    /// the new variable there; `None` when the cap cut the search short.
    pub neighbors: Vec<Vec<Option<(usize, usize)>>>,
    pub variables: Vec<LaurentExpression>,
    /// Variable ids of each seed, by position.
    pub seed_vars: Vec<Vec<usize>>,
    pub closed: bool,
}

impl ExchangeRun {
    pub fn edges(&self) -> Vec<RunEdge> {
        let mut out = Vec::new();
        for (a, row) in self.neighbors.iter().enumerate() {
            for (pa, nb) in row.iter().enumerate() {
                if let Some((b, pb)) = *nb {
                    if a < b {
                        out.push(RunEdge { a, pa, b, pb });
                    }
                }
            }
        }
        out
    }

    pub fn variable_id(&self, v: &LaurentExpression) -> Option<usize> {
        self.variables.iter().position(|w| w == v)
    }

    pub fn render_variable(&self, id: usize) -> String {
        self.seeds[0].render(&self.variables[id])
    }

    pub fn to_json(&self) -> Value {
        json!({
            "closed": self.closed,
            "variables": (0..self.variables.len()).map(|i| self.render_variable(i)).collect::<Vec<_>>(),
            "seeds": self.seed_vars,
            "edges": self.edges().iter().map(|e| json!([e.a, e.b])).collect::<Vec<_>>(),
        })
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph exchange {\n");
        for (i, vars) in self.seed_vars.iter().enumerate() {
            let label: Vec<String> = vars.iter().map(|&v| self.render_variable(v)).collect();
            s.push_str(&format!("  {i} [label=\"{}\"];\n", label.join(", ")));
        }
        for e in self.edges() {
            s.push_str(&format!("  {} -- {};\n", e.a, e.b));
        }
        s.push_str("}\n");
        s
    }
}

/// Breadth-first exploration of all seeds mutation-equivalent to `start`.
/// Seeds are compared up to simultaneous relabeling of positions.
pub fn build_exchange_graph(start: &Seed, seed_cap: usize) -> Result<ExchangeRun> {
    let n = start.n();
    let mut seeds = vec![start.clone()];
    let mut index: HashMap<SeedKey, usize> = HashMap::from([(start.key(), 0)]);
    let mut neighbors: Vec<Vec<Option<(usize, usize)>>> = vec![vec![None; n]];
    let mut frontier = vec![0usize];
    let mut capped = false;
    while !frontier.is_empty() {
        let jobs: Vec<(usize, usize)> = frontier.iter().flat_map(|&s| (0..n).map(move |z| (s, z))).collect();
        let results: Vec<Result<Seed>> = if jobs.len() >= 16 {
            jobs.par_iter().map(|&(s, z)| seeds[s].mutate(z)).collect()
        } else {
            jobs.iter().map(|&(s, z)| seeds[s].mutate(z)).collect()
        };
        let mut next = Vec::new();
        for (&(s, z), r) in jobs.iter().zip(results) {
            if neighbors[s][z].is_some() {
                continue;
            }
            let t = r?;
            let key = t.key();
            let target = match index.get(&key) {
                Some(&i) => Some(i),
                None if seeds.len() < seed_cap => {
                    let i = seeds.len();
                    index.insert(key, i);
                    seeds.push(t.clone());
                    neighbors.push(vec![None; n]);
                    next.push(i);
                    Some(i)
                }
                None => {
                    capped = true;
                    None
                }
            };
            if let Some(i) = target {
                let pos = seeds[i].cluster.iter().position(|v| *v == t.cluster[z]).expect("new variable present");
                neighbors[s][z] = Some((i, pos));
                neighbors[i][pos] = Some((s, z));
            }
        }
        frontier = next;
    }
    let mut variables: Vec<LaurentExpression> = Vec::new();
    let mut var_index: HashMap<LaurentExpression, usize> = HashMap::new();
    let mut seed_vars = Vec::with_capacity(seeds.len());
    for s in &seeds {
        let ids = s
            .cluster
            .iter()
            .map(|v| {
                *var_index.entry(v.clone()).or_insert_with(|| {
                    variables.push(v.clone());
                    variables.len() - 1
                })
            })
            .collect();
        seed_vars.push(ids);
    }
    let closed = !capped && neighbors.iter().all(|r| r.iter().all(Option::is_some));
    Ok(ExchangeRun { seeds, neighbors, variables, seed_vars, closed })
}

/// The vector α with v = P(x∘)/x^α, P a polynomial whose constant term (in
/// the cluster variables) is nonzero.
pub fn denominator_vector(v: &LaurentExpression) -> Result<LatticeVector> {
    if v.is_zero() {
        return Err(Error::NoNormalForm);
    }
    let nx = v.nx();
    let alpha: Vec<i32> = v.min_exponents()[..nx].iter().map(|&m| -m).collect();
    let has_constant = v.terms().keys().any(|k| k[..nx].iter().zip(&alpha).all(|(&e, &a)| e + a == 0));
    if !has_constant {
        return Err(Error::NoNormalForm);
    }
    Ok(alpha.into_iter().map(i64::from).collect())
}

/// True iff every integer coefficient is nonnegative and every generator
/// exponent is nonnegative.
pub fn check_positivity(v: &LaurentExpression) -> bool {
    let nx = v.nx();
    v.terms().iter().all(|(k, c)| !c.is_negative() && k[nx..].iter().all(|&e| e >= 0))
}

/// Root labels of the variables of a closed finite-type run, read off the
/// denominator vectors; fails unless this is a bijection onto Φ≥−1.
pub fn label_variables(run: &ExchangeRun, rs: &RootSystem) -> Result<Vec<RootId>> {
    let mut labels = Vec::with_capacity(run.variables.len());
    let mut seen = BTreeSet::new();
    for v in &run.variables {
        let d = denominator_vector(v)?;
        let id = rs.id(&d).ok_or_else(|| Error::Inconsistent(format!("denominator vector {d:?} is not an almost positive root")))?;
        if !seen.insert(id) {
            return Err(Error::Inconsistent(format!("two variables share the denominator vector {d:?}")));
        }
        labels.push(id);
    }
    if labels.len() != rs.len() {
        return Err(Error::Inconsistent(format!("{} variables for {} almost positive roots", labels.len(), rs.len())));
    }
    Ok(labels)
}

/// Clusters of the run as sorted root ids, one per seed.
pub fn labeled_clusters(run: &ExchangeRun, labels: &[RootId]) -> Vec<Vec<RootId>> {
    run.seed_vars
        .iter()
        .map(|vs| {
            let mut c: Vec<RootId> = vs.iter().map(|&v| labels[v]).collect();
            c.sort_unstable();
            c
        })
        .collect()
}

/// Whether the labeled exchange graph of the run is the dual graph of
/// Δ(Φ): seeds biject onto clusters and edges onto exchanges.
pub fn matches_cluster_complex(run: &ExchangeRun, rs: &RootSystem) -> Result<bool> {
    let labels = label_variables(run, rs)?;
    let clusters = labeled_clusters(run, &labels);
    let mut idx = Vec::with_capacity(clusters.len());
    for c in &clusters {
        match rs.cluster_index(c) {
            Some(i) => idx.push(i),
            None => return Ok(false),
        }
    }
    if idx.iter().collect::<BTreeSet<_>>().len() != rs.clusters().len() || idx.len() != rs.clusters().len() {
        return Ok(false);
    }
    let ours: BTreeSet<(usize, usize)> = run.edges().iter().map(|e| (idx[e.a].min(idx[e.b]), idx[e.a].max(idx[e.b]))).collect();
    let theirs: BTreeSet<(usize, usize)> = rs.exchange_graph().edges.iter().map(|e| (e.a, e.b)).collect();
    Ok(ours == theirs && ours.len() == run.edges().len())
}

/// Right-hand side of the exchange relation x[β]x[β′] = … in root form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExchangeData {
    /// Cluster monomial x[β+β′] and its coefficient.
    pub sum: BTreeMap<RootId, i64>,
    pub coeff_sum: TropElement,
    /// Cluster monomial x[β⊎β′] and its coefficient.
    pub subplus: BTreeMap<RootId, i64>,
    pub coeff_subplus: TropElement,
    /// Whether x[β+β′] is the monomial carrying p⁺ in the seed.
    pub sum_on_plus: bool,
}

/// Exchange relations of a closed finite-type run, keyed by the ordered
/// pair (β, β′) of exchanged roots. Every seed realizing the same exchange
/// must produce the same data.
pub fn exchange_pair_data(run: &ExchangeRun, rs: &RootSystem) -> Result<BTreeMap<(RootId, RootId), ExchangeData>> {
    if !run.closed {
        return Err(Error::Inconsistent("exchange data needs a closed run".into()));
    }
    let labels = label_variables(run, rs)?;
    let n = rs.rank();
    let mut out: BTreeMap<(RootId, RootId), ExchangeData> = BTreeMap::new();
    for (s, seed) in run.seeds.iter().enumerate() {
        for z in 0..seed.n() {
            let (t, pz) = run.neighbors[s][z].unwrap();
            let b = labels[run.seed_vars[s][z]];
            let bp = labels[run.seed_vars[t][pz]];
            let (plus, minus) = seed.exchange_monomials(z);
            let as_roots = |e: &[i64]| -> BTreeMap<RootId, i64> {
                e.iter().enumerate().filter(|(_, &k)| k > 0).map(|(x, &k)| (labels[run.seed_vars[s][x]], k)).collect()
            };
            let (mp, mm) = (as_roots(&plus), as_roots(&minus));
            let eps = rs.sign_eps(b, bp)?;
            let sum: Vec<i64> = (0..n).map(|i| rs.root(b)[i] + rs.root(bp)[i]).collect();
            let xs = rs.cluster_expansion(&sum);
            let xu = rs.cluster_expansion(&rs.subplus(b, bp)?);
            let sum_on_plus = if xs == xu {
                eps > 0
            } else if mp == xs && mm == xu {
                true
            } else if mm == xs && mp == xu {
                false
            } else {
                return Err(Error::Inconsistent(format!(
                    "exchange of {} and {} does not have the root form",
                    rs.root_label(b),
                    rs.root_label(bp)
                )));
            };
            let (cs, cu) = if sum_on_plus {
                (seed.coeffs[z].plus.clone(), seed.coeffs[z].minus.clone())
            } else {
                (seed.coeffs[z].minus.clone(), seed.coeffs[z].plus.clone())
            };
            let data = ExchangeData { sum: xs, coeff_sum: cs, subplus: xu, coeff_subplus: cu, sum_on_plus };
            match out.get(&(b, bp)) {
                Some(prev) if *prev != data => {
                    return Err(Error::Inconsistent(format!(
                        "exchange of {} and {} depends on the seed",
                        rs.root_label(b),
                        rs.root_label(bp)
                    )))
                }
                Some(_) => {}
                None => {
                    out.insert((b, bp), data);
                }
            }
        }
    }
    Ok(out)
}

/// Re-runs the exchange graph from seed `s` of `run` with fresh initial
/// variables y, and checks that every variable so obtained (a Laurent
/// polynomial in y by construction) turns into a variable of `run` under
/// y ↦ cluster of seed s, and that all variables of `run` are reached.
pub fn check_laurent_in_cluster(run: &ExchangeRun, s: usize, seed_cap: usize) -> Result<bool> {
    let base = &run.seeds[s];
    let fresh = Seed::initial(base.matrix.clone(), base.semifield.clone(), base.coeffs.clone())?;
    let other = build_exchange_graph(&fresh, seed_cap)?;
    if other.closed != run.closed || other.variables.len() != run.variables.len() {
        return Ok(false);
    }
    let ys = &base.cluster;
    let mut hit = BTreeSet::new();
    for w in &other.variables {
        let d = w.denominator_exponents();
        let mut shift = d.clone();
        shift.extend(std::iter::repeat_n(0, w.np()));
        let lhs = w.shift(&shift).substitute(ys)?;
        let mut den = LaurentExpression::one(ys[0].nx(), ys[0].np());
        for (i, &e) in d.iter().enumerate() {
            den = den.mul(&ys[i].pow(e as u32));
        }
        let v = match lhs.div_exact(&den) {
            Ok(v) => v,
            Err(_) => return Ok(false),
        };
        match run.variable_id(&v) {
            Some(id) => {
                hit.insert(id);
            }
            None => return Ok(false),
        }
    }
    Ok(hit.len() == run.variables.len())
}
