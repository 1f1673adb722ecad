//! Exchange matrices, mutation, symmetrizers and the surd conjugate S(B).

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};

/// Square integer matrix with labelled rows and columns.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExchangeMatrix {
    labels: Vec<String>,
    rows: Vec<Vec<BigInt>>,
}

impl ExchangeMatrix {
    /// Builds a matrix with default labels `1..=n`.
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self> {
        let big = rows
            .into_iter()
            .map(|r| r.into_iter().map(BigInt::from).collect())
            .collect();
        Self::from_big(big)
    }

    pub fn from_big(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let labels = (1..=rows.len()).map(|i| i.to_string()).collect();
        Self::with_labels(labels, rows)
    }

    pub fn with_labels(labels: Vec<String>, rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let n = rows.len();
        if labels.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::NotSquare);
        }
        Ok(ExchangeMatrix { labels, rows })
    }

    pub fn zero(n: usize) -> Self {
        ExchangeMatrix {
            labels: (1..=n).map(|i| i.to_string()).collect(),
            rows: vec![vec![BigInt::zero(); n]; n],
        }
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.rows[i][j]
    }

    /// Entry as `i64`; panics if it does not fit, which never happens for
    /// matrices of finite type.
    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.rows[i][j].to_i64().expect("matrix entry exceeds i64")
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.rows[i][j] = v;
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    pub fn to_i64_rows(&self) -> Vec<Vec<i64>> {
        (0..self.n())
            .map(|i| (0..self.n()).map(|j| self.entry(i, j)).collect())
            .collect()
    }

    pub fn has_zero_diagonal(&self) -> bool {
        (0..self.n()).all(|i| self.rows[i][i].is_zero())
    }

    fn check_index(&self, k: usize) -> Result<()> {
        if k >= self.n() {
            Err(Error::IndexOutOfRange { index: k, n: self.n() })
        } else {
            Ok(())
        }
    }

    /// Matrix mutation in direction `k` (0-based).
    pub fn mutate(&self, k: usize) -> Result<Self> {
        self.check_index(k)?;
        let n = self.n();
        let b = &self.rows;
        let mut out = b.clone();
        for i in 0..n {
            for j in 0..n {
                out[i][j] = if i == k || j == k {
                    -&b[i][j]
                } else {
                    let t = b[i][k].abs() * &b[k][j] + &b[i][k] * b[k][j].abs();
                    &b[i][j] + t / 2
                };
            }
        }
        Ok(ExchangeMatrix { labels: self.labels.clone(), rows: out })
    }

    /// Applies mutations left to right.
    pub fn mutate_seq(&self, seq: &[usize]) -> Result<Self> {
        seq.iter().try_fold(self.clone(), |b, &k| b.mutate(k))
    }

    pub fn cartan_counterpart(&self) -> CartanMatrix {
        let n = self.n();
        let a = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { 2 } else { -self.entry(i, j).abs() })
                    .collect()
            })
            .collect();
        CartanMatrix(a)
    }

    pub fn is_sign_skew_symmetric(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| {
            (i..n).all(|j| {
                let (x, y) = (&self.rows[i][j], &self.rows[j][i]);
                (x.is_zero() && y.is_zero()) || (x.sign() != y.sign() && !x.is_zero() && !y.is_zero())
            })
        })
    }

    pub fn is_skew_symmetric(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| (0..n).all(|j| self.rows[i][j] == -&self.rows[j][i]))
    }

    /// Connected blocks of the support graph, each sorted, ordered by least vertex.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        components(n, |i, j| !self.rows[i][j].is_zero() || !self.rows[j][i].is_zero())
    }

    /// Minimal positive integer diagonal `D` (gcd 1 per block) with `DB`
    /// skew-symmetric, if one exists.
    pub fn skew_symmetrizer(&self) -> Option<Vec<BigInt>> {
        if !self.is_sign_skew_symmetric() {
            return None;
        }
        let n = self.n();
        let mut d: Vec<Option<BigRational>> = vec![None; n];
        for block in self.blocks() {
            let root = block[0];
            d[root] = Some(BigRational::one());
            let mut stack = vec![root];
            while let Some(i) = stack.pop() {
                for j in 0..n {
                    if d[j].is_none() && !self.rows[i][j].is_zero() {
                        let di = d[i].clone().unwrap();
                        let ratio = BigRational::new(self.rows[i][j].abs(), self.rows[j][i].abs());
                        d[j] = Some(di * ratio);
                        stack.push(j);
                    }
                }
            }
        }
        let mut out = vec![BigInt::zero(); n];
        for block in self.blocks() {
            let lcm = block
                .iter()
                .fold(BigInt::one(), |acc, &i| acc.lcm(d[i].as_ref().unwrap().denom()));
            let scaled: Vec<BigInt> = block
                .iter()
                .map(|&i| (d[i].as_ref().unwrap() * BigRational::from_integer(lcm.clone())).to_integer())
                .collect();
            let g = scaled.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
            for (&i, v) in block.iter().zip(scaled) {
                out[i] = v / &g;
            }
        }
        let ok = (0..n).all(|i| (0..n).all(|j| &out[i] * &self.rows[i][j] == -(&out[j] * &self.rows[j][i])));
        ok.then_some(out)
    }

    pub fn is_skew_symmetrizable(&self) -> bool {
        self.skew_symmetrizer().is_some()
    }

    /// The skew-symmetric surd conjugate S(B).
    pub fn symmetrized(&self) -> Result<SymmetrizedMatrix> {
        if !self.is_skew_symmetrizable() {
            return Err(Error::NotSkewSymmetrizable);
        }
        let n = self.n();
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let p = (&self.rows[i][j] * &self.rows[j][i]).abs();
                        Surd::new(self.rows[i][j].sign(), p.to_biguint().unwrap())
                    })
                    .collect()
            })
            .collect();
        Ok(SymmetrizedMatrix { entries })
    }

    /// Simultaneous relabelling: row/column `i` of the result is `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let rows = perm
            .iter()
            .map(|&i| perm.iter().map(|&j| self.rows[i][j].clone()).collect())
            .collect();
        let labels = perm.iter().map(|&i| self.labels[i].clone()).collect();
        ExchangeMatrix { labels, rows }
    }

    /// Equality modulo simultaneous relabelling of rows and columns.
    pub fn equivalent_up_to_relabeling(&self, other: &Self) -> bool {
        let n = self.n();
        if n != other.n() {
            return false;
        }
        let sig = |m: &Self, i: usize| {
            let mut r: Vec<BigInt> = m.rows[i].clone();
            let mut c: Vec<BigInt> = (0..n).map(|j| m.rows[j][i].clone()).collect();
            r.sort();
            c.sort();
            (r, c)
        };
        let sa: Vec<_> = (0..n).map(|i| sig(self, i)).collect();
        let sb: Vec<_> = (0..n).map(|i| sig(other, i)).collect();
        let mut map = vec![usize::MAX; n];
        let mut used = vec![false; n];
        fn go(
            a: &ExchangeMatrix,
            b: &ExchangeMatrix,
            sa: &[(Vec<BigInt>, Vec<BigInt>)],
            sb: &[(Vec<BigInt>, Vec<BigInt>)],
            i: usize,
            map: &mut Vec<usize>,
            used: &mut Vec<bool>,
        ) -> bool {
            let n = a.n();
            if i == n {
                return true;
            }
            for j in 0..n {
                if used[j] || sa[i] != sb[j] {
                    continue;
                }
                let fits = (0..i).all(|p| a.rows[i][p] == b.rows[j][map[p]] && a.rows[p][i] == b.rows[map[p]][j]);
                if fits {
                    map[i] = j;
                    used[j] = true;
                    if go(a, b, sa, sb, i + 1, map, used) {
                        return true;
                    }
                    used[j] = false;
                }
            }
            false
        }
        go(self, other, &sa, &sb, 0, &mut map, &mut used)
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(big_to_json).collect()))
            .collect();
        json!({"labels": self.labels, "rows": rows})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let rows = v
            .get("rows")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("matrix needs \"rows\"".into()))?;
        let rows = rows
            .iter()
            .map(|r| {
                r.as_array()
                    .ok_or_else(|| Error::Parse("row is not an array".into()))?
                    .iter()
                    .map(json_to_big)
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let labels = match v.get("labels") {
            Some(Value::Array(ls)) => ls
                .iter()
                .map(|l| match l {
                    Value::String(s) => Ok(s.clone()),
                    Value::Number(x) => Ok(x.to_string()),
                    _ => Err(Error::Parse("label must be a string".into())),
                })
                .collect::<Result<Vec<_>>>()?,
            None => (1..=rows.len()).map(|i| i.to_string()).collect(),
            _ => return Err(Error::Parse("\"labels\" must be an array".into())),
        };
        Self::with_labels(labels, rows)
    }
}

impl fmt::Display for ExchangeMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|x| format!("{:>3}", x)).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

fn big_to_json(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

fn json_to_big(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(x) => x
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| Error::Parse(format!("not an integer: {x}"))),
        Value::String(s) => s.parse().map_err(|_| Error::Parse(format!("not an integer: {s}"))),
        _ => Err(Error::Parse("matrix entry must be an integer".into())),
    }
}

/// Connected components of the graph on `0..n` with adjacency `adj`.
pub(crate) fn components(n: usize, adj: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut stack = vec![s];
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if !seen[j] && adj(i, j) {
                    seen[j] = true;
                    comp.push(j);
                    stack.push(j);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Generalized Cartan matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CartanMatrix(pub Vec<Vec<i64>>);

impl CartanMatrix {
    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.0[i][j]
    }

    pub fn is_valid(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| self.0[i].len() == n && self.0[i][i] == 2 && (0..n).all(|j| i == j || self.0[i][j] <= 0))
    }

    /// Minimal positive `d` with `d_i a_ij = d_j a_ji`, normalised per block.
    pub fn symmetrizer(&self) -> Option<Vec<i64>> {
        let n = self.n();
        let b = ExchangeMatrix::new(
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| match i.cmp(&j) {
                            std::cmp::Ordering::Less => -self.0[i][j],
                            std::cmp::Ordering::Greater => self.0[i][j],
                            _ => 0,
                        })
                        .collect()
                })
                .collect(),
        )
        .ok()?;
        b.skew_symmetrizer().map(|d| d.iter().map(|x| x.to_i64().unwrap()).collect())
    }

    pub fn transpose(&self) -> Self {
        let n = self.n();
        CartanMatrix((0..n).map(|i| (0..n).map(|j| self.0[j][i]).collect()).collect())
    }
}

/// A real number `sign * sqrt(rad)` with `rad` a nonnegative integer.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Surd {
    sign: i8,
    rad: BigUint,
}

impl Surd {
    pub fn new(sign: Sign, rad: BigUint) -> Self {
        let s = match sign {
            _ if rad.is_zero() => 0,
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        };
        let rad = if s == 0 { BigUint::zero() } else { rad };
        Surd { sign: s, rad }
    }

    pub fn zero() -> Self {
        Surd { sign: 0, rad: BigUint::zero() }
    }

    pub fn from_signed(sign: i8, rad: u64) -> Self {
        let s = match sign.signum() {
            -1 => Sign::Minus,
            1 => Sign::Plus,
            _ => Sign::NoSign,
        };
        Surd::new(s, BigUint::from(rad))
    }

    /// The exact value of an integer `x`, i.e. `sign(x) * sqrt(x^2)`.
    pub fn from_int(x: &BigInt) -> Self {
        Surd::new(x.sign(), x.magnitude() * x.magnitude())
    }

    pub fn signum(&self) -> i8 {
        self.sign
    }

    pub fn radicand(&self) -> &BigUint {
        &self.rad
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn neg(&self) -> Self {
        Surd { sign: -self.sign, rad: self.rad.clone() }
    }

    pub fn mul(&self, o: &Surd) -> Surd {
        Surd { sign: self.sign * o.sign, rad: if self.sign * o.sign == 0 { BigUint::zero() } else { &self.rad * &o.rad } }
    }

    /// Exact sum; fails unless the product of the radicands is a perfect square.
    pub fn add(&self, o: &Surd) -> Result<Surd> {
        if self.is_zero() {
            return Ok(o.clone());
        }
        if o.is_zero() {
            return Ok(self.clone());
        }
        let prod = &self.rad * &o.rad;
        let m = prod.sqrt();
        if &m * &m != prod {
            return Err(Error::NotRealizable(prod.to_string()));
        }
        let two_m = m * 2u32;
        let sum = &self.rad + &o.rad;
        if self.sign == o.sign {
            return Ok(Surd { sign: self.sign, rad: sum + two_m });
        }
        let rad = sum - two_m;
        let sign = match self.rad.cmp(&o.rad) {
            std::cmp::Ordering::Greater => self.sign,
            std::cmp::Ordering::Less => o.sign,
            std::cmp::Ordering::Equal => 0,
        };
        Ok(Surd::new(if sign > 0 { Sign::Plus } else { Sign::Minus }, if sign == 0 { BigUint::zero() } else { rad }))
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.sign < 0 { "-" } else { "" };
        if self.sign == 0 {
            return write!(f, "0");
        }
        let r = self.rad.sqrt();
        if &r * &r == self.rad {
            write!(f, "{s}{r}")
        } else {
            write!(f, "{s}√{}", self.rad)
        }
    }
}

/// Skew-symmetric matrix of exact surds.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymmetrizedMatrix {
    pub entries: Vec<Vec<Surd>>,
}

impl SymmetrizedMatrix {
    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn is_skew_symmetric(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| (0..n).all(|j| self.entries[i][j] == self.entries[j][i].neg()))
    }

    /// Same mutation rule as for integer matrices, evaluated on surds.
    pub fn mutate(&self, k: usize) -> Result<Self> {
        let n = self.n();
        if k >= n {
            return Err(Error::IndexOutOfRange { index: k, n });
        }
        let s = &self.entries;
        let mut out = s.clone();
        for i in 0..n {
            for j in 0..n {
                out[i][j] = if i == k || j == k {
                    s[i][j].neg()
                } else if s[i][k].signum() != 0 && s[i][k].signum() == s[k][j].signum() {
                    // (|s_ik| s_kj + s_ik |s_kj|) / 2 = sign * sqrt(r_ik r_kj)
                    let t = Surd { sign: s[i][k].signum(), rad: &s[i][k].rad * &s[k][j].rad };
                    s[i][j].add(&t)?
                } else {
                    s[i][j].clone()
                };
            }
        }
        Ok(SymmetrizedMatrix { entries: out })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: Vec<Vec<i64>>) -> ExchangeMatrix {
        ExchangeMatrix::new(rows).unwrap()
    }

    #[test]
    fn symbolic_mutation_at_two() {
        let (a1, a2, b1, b2, c1, c2) = (2, 3, 5, 7, 11, 13);
        let b = m(vec![vec![0, a1, -c2], vec![-a2, 0, b1], vec![c1, -b2, 0]]);
        let want = m(vec![vec![0, -a1, a1 * b1 - c2], vec![a2, 0, -b1], vec![c1 - a2 * b2, b2, 0]]);
        assert_eq!(b.mutate(1).unwrap(), want);
    }

    #[test]
    fn unit_triangle_mutation() {
        let b = m(vec![vec![0, 1, -1], vec![-1, 0, 1], vec![1, -1, 0]]);
        assert_eq!(b.mutate(1).unwrap(), m(vec![vec![0, -1, 0], vec![1, 0, -1], vec![0, 1, 0]]));
        assert!(b.is_sign_skew_symmetric());
    }

    #[test]
    fn cartan_examples() {
        assert_eq!(m(vec![vec![0, 1], vec![-1, 0]]).cartan_counterpart().0, vec![vec![2, -1], vec![-1, 2]]);
        assert_eq!(m(vec![vec![0]]).cartan_counterpart().0, vec![vec![2]]);
        assert_eq!(m(vec![vec![0, 2], vec![-1, 0]]).cartan_counterpart().0, vec![vec![2, -2], vec![-1, 2]]);
    }

    #[test]
    fn sign_skew() {
        assert!(m(vec![vec![0, 1], vec![-1, 0]]).is_sign_skew_symmetric());
        assert!(!m(vec![vec![0, 1], vec![0, 0]]).is_sign_skew_symmetric());
    }

    #[test]
    fn symmetrizer_examples() {
        let small = |v: Vec<BigInt>| v.iter().map(|x| x.to_i64().unwrap()).collect::<Vec<_>>();
        assert_eq!(small(m(vec![vec![0, 1], vec![-1, 0]]).skew_symmetrizer().unwrap()), vec![1, 1]);
        assert_eq!(small(m(vec![vec![0, 2], vec![-1, 0]]).skew_symmetrizer().unwrap()), vec![1, 2]);
        assert!(m(vec![vec![0, 1], vec![1, 0]]).skew_symmetrizer().is_none());
        // blocks are normalised independently
        let d = m(vec![vec![0, 2, 0, 0], vec![-1, 0, 0, 0], vec![0, 0, 0, 3], vec![0, 0, -3, 0]]);
        assert_eq!(small(d.skew_symmetrizer().unwrap()), vec![1, 2, 1, 1]);
        // sign-skew-symmetric but a cycle product breaks symmetrizability
        let bad = m(vec![vec![0, 2, -1], vec![-1, 0, 1], vec![1, -1, 0]]);
        assert!(bad.is_sign_skew_symmetric());
        assert!(bad.skew_symmetrizer().is_none());
    }

    #[test]
    fn surd_matrix() {
        let s = m(vec![vec![0, 2], vec![-1, 0]]).symmetrized().unwrap();
        assert_eq!(s.entries[0][1], Surd::from_signed(1, 2));
        assert_eq!(s.entries[1][0], Surd::from_signed(-1, 2));
        let sk = m(vec![vec![0, 3, -1], vec![-3, 0, 2], vec![1, -2, 0]]);
        let ss = sk.symmetrized().unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(ss.entries[i][j], Surd::from_int(sk.get(i, j)));
            }
        }
    }

    #[test]
    fn surd_addition() {
        let a = Surd::from_signed(1, 2);
        let b = Surd::from_signed(1, 8);
        assert_eq!(a.add(&b).unwrap(), Surd::from_signed(1, 18));
        assert_eq!(a.add(&b.neg()).unwrap(), Surd::from_signed(-1, 2));
        assert_eq!(a.add(&a.neg()).unwrap(), Surd::zero());
        assert!(a.add(&Surd::from_signed(1, 3)).is_err());
    }

    #[test]
    fn relabel_equivalence() {
        let b = m(vec![vec![0, 1, 0], vec![-1, 0, 2], vec![0, -1, 0]]);
        let p = b.permuted(&[2, 0, 1]);
        assert!(b.equivalent_up_to_relabeling(&p));
        assert!(!b.equivalent_up_to_relabeling(&b.mutate(0).unwrap()));
    }

    #[test]
    fn json_roundtrip() {
        let b = m(vec![vec![0, 1], vec![-1, 0]]);
        assert_eq!(ExchangeMatrix::from_json(&b.to_json()).unwrap(), b);
    }
}
