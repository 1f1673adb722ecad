//! Finite root systems, the involutions τ±, compatibility degrees and the
//! cluster complex, with the root-theoretic exchange matrices B(C).

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;
use std::sync::OnceLock;

use num_rational::Ratio;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::diagram::{dynkin_edges, CartanKillingType, Family};
use crate::error::{Error, Result};
use crate::matrix::{CartanMatrix, ExchangeMatrix};

/// Integer coordinates over the simple roots.
pub type LatticeVector = Vec<i64>;

/// Index of an almost positive root inside its [`RootSystem`].
pub type RootId = usize;

/// A cluster: sorted ids of `n` mutually compatible roots.
pub type Cluster = Vec<RootId>;

/// Edge of the exchange graph: cluster indices and the exchanged roots.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExchangeEdge {
    pub a: usize,
    pub b: usize,
    pub out: RootId,
    pub into: RootId,
}

#[derive(Clone, Debug)]
pub struct ExchangeGraph {
    pub clusters: Vec<Cluster>,
    pub edges: Vec<ExchangeEdge>,
}

impl ExchangeGraph {
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|e| if e.a == v { Some(e.b) } else if e.b == v { Some(e.a) } else { None })
            .collect()
    }
}

/// A geodesic loop: the link of an (n-2)-face, walked by alternating exchanges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeodesicLoop {
    pub face: Vec<RootId>,
    pub length: usize,
    pub weight: i64,
}

pub struct RootSystem {
    ty: CartanKillingType,
    cartan: CartanMatrix,
    component: Vec<usize>,
    comps: Vec<Vec<usize>>,
    coxeter: Vec<usize>,
    eps: Vec<i8>,
    form: Vec<Vec<i64>>,
    /// Φ≥−1: negative simples first, then positive roots by height and
    /// reverse-lexicographic coefficients.
    roots: Vec<LatticeVector>,
    index: HashMap<LatticeVector, RootId>,
    /// τ_+ and τ_- as permutations of root ids.
    tau_perm: [Vec<RootId>; 2],
    compat: Vec<Vec<u32>>,
    clusters: OnceLock<Vec<Cluster>>,
}

/// Squared lengths of the simple roots, short roots normalised to 2.
fn root_lengths(family: Family, n: usize) -> Vec<i64> {
    match family {
        Family::A | Family::D | Family::E => vec![2; n],
        Family::B => (0..n).map(|i| if i + 1 == n { 2 } else { 4 }).collect(),
        Family::C => (0..n).map(|i| if i + 1 == n { 4 } else { 2 }).collect(),
        Family::F => vec![4, 4, 2, 2],
        Family::G => vec![2, 6],
    }
}

fn sign_slot(eps: i8) -> usize {
    if eps > 0 {
        0
    } else {
        1
    }
}

impl RootSystem {
    pub fn new(ty: &CartanKillingType) -> Result<Self> {
        let n = ty.rank();
        let mut form = vec![vec![0i64; n]; n];
        let mut component = vec![0; n];
        let mut comps = Vec::new();
        let mut offset = 0;
        for (c, &(fam, m)) in ty.components().iter().enumerate() {
            let len = root_lengths(fam, m);
            for i in 0..m {
                form[offset + i][offset + i] = len[i];
                component[offset + i] = c;
            }
            for (a, b, _) in dynkin_edges(fam, m)? {
                let v = -(len[a].max(len[b])) / 2;
                form[offset + a][offset + b] = v;
                form[offset + b][offset + a] = v;
            }
            comps.push((offset..offset + m).collect::<Vec<_>>());
            offset += m;
        }
        let cartan = CartanMatrix(
            (0..n).map(|i| (0..n).map(|j| 2 * form[i][j] / form[i][i]).collect()).collect(),
        );
        Ok(Self::assemble(ty.clone(), cartan, form, component, comps))
    }

    fn assemble(
        ty: CartanKillingType,
        cartan: CartanMatrix,
        form: Vec<Vec<i64>>,
        component: Vec<usize>,
        comps: Vec<Vec<usize>>,
    ) -> Self {
        let n = cartan.n();
        // positive roots by closure under simple reflections
        let mut positive: BTreeSet<LatticeVector> = BTreeSet::new();
        let mut queue: VecDeque<LatticeVector> = VecDeque::new();
        for i in 0..n {
            let mut e = vec![0; n];
            e[i] = 1;
            positive.insert(e.clone());
            queue.push_back(e);
        }
        while let Some(g) = queue.pop_front() {
            for i in 0..n {
                let c: i64 = (0..n).map(|j| cartan.get(i, j) * g[j]).sum();
                let mut r = g.clone();
                r[i] -= c;
                if r.iter().all(|&x| x >= 0) && r.iter().any(|&x| x > 0) && positive.insert(r.clone()) {
                    queue.push_back(r);
                }
            }
        }
        let mut pos: Vec<LatticeVector> = positive.into_iter().collect();
        // by height, then α1-heavy first
        pos.sort_by(|a, b| (a.iter().sum::<i64>(), b).cmp(&(b.iter().sum::<i64>(), a)));
        let coxeter = comps
            .iter()
            .map(|c| {
                let count = pos.iter().filter(|r| c.iter().any(|&i| r[i] != 0)).count();
                2 * count / c.len()
            })
            .collect();
        // bipartition: lowest vertex of each component in I+
        let mut eps = vec![0i8; n];
        for c in &comps {
            eps[c[0]] = 1;
            let mut stack = vec![c[0]];
            while let Some(i) = stack.pop() {
                for j in 0..n {
                    if i != j && cartan.get(i, j) != 0 && eps[j] == 0 {
                        eps[j] = -eps[i];
                        stack.push(j);
                    }
                }
            }
        }
        let mut roots: Vec<LatticeVector> = (0..n)
            .map(|i| {
                let mut e = vec![0; n];
                e[i] = -1;
                e
            })
            .collect();
        roots.extend(pos);
        let index: HashMap<_, _> = roots.iter().cloned().enumerate().map(|(i, r)| (r, i)).collect();
        let mut rs = RootSystem {
            ty,
            cartan,
            component,
            comps,
            coxeter,
            eps,
            form,
            roots,
            index,
            tau_perm: [Vec::new(), Vec::new()],
            compat: Vec::new(),
            clusters: OnceLock::new(),
        };
        for s in [1i8, -1] {
            rs.tau_perm[sign_slot(s)] = rs.roots.iter().map(|r| rs.index[&rs.tau(s, r)]).collect();
        }
        let m = rs.roots.len();
        rs.compat = (0..m).map(|a| (0..m).map(|b| rs.compute_compat(a, b)).collect()).collect();
        rs
    }

    pub fn from_type_str(s: &str) -> Result<Self> {
        Self::new(&s.parse()?)
    }

    pub fn cartan_type(&self) -> &CartanKillingType {
        &self.ty
    }

    pub fn rank(&self) -> usize {
        self.cartan.n()
    }

    pub fn cartan(&self) -> &CartanMatrix {
        &self.cartan
    }

    /// ε(i): +1 on I+, −1 on I−.
    pub fn eps(&self, i: usize) -> i8 {
        self.eps[i]
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.comps
    }

    /// Coxeter number of each irreducible component.
    pub fn coxeter_numbers(&self) -> &[usize] {
        &self.coxeter
    }

    /// Coxeter number of the component of simple index `i`.
    pub fn coxeter_of(&self, i: usize) -> usize {
        self.coxeter[self.component[i]]
    }

    pub fn inner(&self, a: &[i64], b: &[i64]) -> i64 {
        let n = self.rank();
        (0..n).map(|i| (0..n).map(|j| a[i] * b[j] * self.form[i][j]).sum::<i64>()).sum()
    }

    pub fn roots(&self) -> &[LatticeVector] {
        &self.roots
    }

    pub fn root(&self, id: RootId) -> &LatticeVector {
        &self.roots[id]
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn positive_roots(&self) -> &[LatticeVector] {
        &self.roots[self.rank()..]
    }

    pub fn id(&self, v: &[i64]) -> Option<RootId> {
        self.index.get(v).copied()
    }

    pub fn negative_simple(&self, i: usize) -> RootId {
        i
    }

    /// `Some(i)` iff the root is `−α_i`.
    pub fn as_negative_simple(&self, id: RootId) -> Option<usize> {
        (id < self.rank()).then_some(id)
    }

    /// Component containing a root (every root lives in one component).
    pub fn component_of_root(&self, id: RootId) -> usize {
        let r = &self.roots[id];
        self.component[(0..self.rank()).find(|&i| r[i] != 0).unwrap()]
    }

    fn coxeter_of_root(&self, id: RootId) -> usize {
        self.coxeter[self.component_of_root(id)]
    }

    /// The piecewise-linear involution τ_ε on the root lattice.
    pub fn tau(&self, eps: i8, g: &[i64]) -> LatticeVector {
        let n = self.rank();
        let mut out = g.to_vec();
        for i in (0..n).filter(|&i| self.eps[i] == eps) {
            let s: i64 = (0..n).filter(|&j| j != i).map(|j| self.cartan.get(i, j) * g[j].max(0)).sum();
            out[i] = -g[i] - s;
        }
        out
    }

    pub fn tau_id(&self, eps: i8, id: RootId) -> RootId {
        self.tau_perm[sign_slot(eps)][id]
    }

    /// `τ^{(k)}_ε = ... τ_{−ε} τ_ε` (k factors) applied to a root id.
    pub fn tau_power(&self, eps: i8, k: usize, mut id: RootId) -> RootId {
        for step in 0..k {
            id = self.tau_id(if step % 2 == 0 { eps } else { -eps }, id);
        }
        id
    }

    /// Inverse of [`RootSystem::tau_power`] on lattice vectors.
    pub fn tau_power_inv_vec(&self, eps: i8, k: usize, mut g: LatticeVector) -> LatticeVector {
        for step in (0..k).rev() {
            g = self.tau(if step % 2 == 0 { eps } else { -eps }, &g);
        }
        g
    }

    pub fn tau_power_vec(&self, eps: i8, k: usize, mut g: LatticeVector) -> LatticeVector {
        for step in 0..k {
            g = self.tau(if step % 2 == 0 { eps } else { -eps }, &g);
        }
        g
    }

    /// Order of τ−τ+ as a permutation of Φ≥−1.
    pub fn tau_order(&self) -> usize {
        let m = self.len();
        let step: Vec<RootId> = (0..m).map(|i| self.tau_id(-1, self.tau_id(1, i))).collect();
        let mut cur: Vec<RootId> = (0..m).collect();
        for k in 1.. {
            cur = cur.iter().map(|&i| step[i]).collect();
            if cur.iter().enumerate().all(|(i, &j)| i == j) {
                return k;
            }
        }
        unreachable!()
    }

    /// Smallest k with τ^{(k+1)}_ε β = τ^{(k)}_ε β ∈ −Π.
    pub fn k_epsilon(&self, id: RootId, eps: i8) -> usize {
        let bound = 2 * self.coxeter_of_root(id) + 4;
        let mut cur = id;
        for k in 0..=bound {
            let s = if k % 2 == 0 { eps } else { -eps };
            let next = self.tau_id(s, cur);
            if next == cur && self.as_negative_simple(cur).is_some() {
                return k;
            }
            cur = next;
        }
        panic!("k_epsilon exceeded its bound");
    }

    fn compute_compat(&self, a: RootId, b: RootId) -> u32 {
        let bound = self.coxeter_of_root(a) + 1;
        let (mut x, mut y) = (a, b);
        for k in 0..=bound {
            if let Some(i) = self.as_negative_simple(x) {
                return self.roots[y][i].max(0) as u32;
            }
            let s = if k % 2 == 0 { 1 } else { -1 };
            x = self.tau_id(s, x);
            y = self.tau_id(s, y);
        }
        panic!("compatibility reduction exceeded h+1 steps");
    }

    /// Compatibility degree (α ∥ β).
    pub fn compatibility_degree(&self, a: RootId, b: RootId) -> u32 {
        self.compat[a][b]
    }

    pub fn compatible(&self, a: RootId, b: RootId) -> bool {
        self.compat[a][b] == 0
    }

    pub fn are_exchangeable(&self, a: RootId, b: RootId) -> bool {
        self.compat[a][b] == 1 && self.compat[b][a] == 1
    }

    /// ε(β, β′): the sign with k_ε(β) < k_ε(β′).
    pub fn sign_eps(&self, b: RootId, bp: RootId) -> Result<i8> {
        if !self.are_exchangeable(b, bp) {
            return Err(Error::NotExchangeable);
        }
        for s in [1i8, -1] {
            if self.k_epsilon(b, s) < self.k_epsilon(bp, s) {
                return Ok(s);
            }
        }
        Err(Error::Inconsistent("no sign separates the k-counters".into()))
    }

    /// β ⊎ β′, obtained by transporting β + β′ through τ^{(k)}_ε with k
    /// strictly between the two k-counters.
    pub fn subplus(&self, b: RootId, bp: RootId) -> Result<LatticeVector> {
        if !self.are_exchangeable(b, bp) {
            return Err(Error::NotExchangeable);
        }
        let n = self.rank();
        if self.comps[self.component_of_root(b)].len() == 1 {
            return Ok(vec![0; n]);
        }
        let eps = if self.k_epsilon(b, 1) != self.k_epsilon(bp, 1) { 1 } else { -1 };
        let k = self.k_epsilon(b, eps).max(self.k_epsilon(bp, eps));
        let (sb, sbp) = (self.tau_power(eps, k, b), self.tau_power(eps, k, bp));
        let sum: LatticeVector = (0..n).map(|i| self.roots[sb][i] + self.roots[sbp][i]).collect();
        Ok(self.tau_power_inv_vec(eps, k, sum))
    }

    /// All clusters, sorted; computed once by walking the exchange graph from −Π.
    pub fn clusters(&self) -> &[Cluster] {
        self.clusters.get_or_init(|| {
            let start: Cluster = (0..self.rank()).collect();
            let mut seen = BTreeSet::from([start.clone()]);
            let mut queue = VecDeque::from([start]);
            while let Some(c) = queue.pop_front() {
                for &b in &c {
                    let (next, _) = self.adjacent_cluster(&c, b);
                    if seen.insert(next.clone()) {
                        queue.push_back(next);
                    }
                }
            }
            seen.into_iter().collect()
        })
    }

    /// The unique cluster sharing all members of `c` except `b`.
    pub fn adjacent_cluster(&self, c: &[RootId], b: RootId) -> (Cluster, RootId) {
        let rest: Vec<RootId> = c.iter().copied().filter(|&x| x != b).collect();
        let cands: Vec<RootId> =
            (0..self.len()).filter(|&r| r != b && !rest.contains(&r) && rest.iter().all(|&x| self.compatible(r, x))).collect();
        assert_eq!(cands.len(), 1, "exchange partner must be unique");
        let mut next = rest;
        next.push(cands[0]);
        next.sort_unstable();
        (next, cands[0])
    }

    pub fn cluster_index(&self, c: &[RootId]) -> Option<usize> {
        let mut s = c.to_vec();
        s.sort_unstable();
        self.clusters().binary_search(&s).ok()
    }

    /// Coordinates of `g` in the basis `c`, if integral.
    pub fn coordinates(&self, c: &[RootId], g: &[i64]) -> Option<Vec<i64>> {
        let basis: Vec<&LatticeVector> = c.iter().map(|&i| &self.roots[i]).collect();
        solve_integral(&basis, g)
    }

    /// The cluster expansion of `g`, found by scanning the clusters.
    pub fn cluster_expansion(&self, g: &[i64]) -> BTreeMap<RootId, i64> {
        if g.iter().all(|&x| x == 0) {
            return BTreeMap::new();
        }
        for c in self.clusters() {
            if let Some(x) = self.coordinates(c, g) {
                if x.iter().all(|&v| v >= 0) {
                    return c.iter().zip(x).filter(|(_, v)| *v > 0).map(|(&r, v)| (r, v)).collect();
                }
            }
        }
        panic!("lattice vector without cluster expansion");
    }

    /// Cluster expansion computed by peeling off negative simple parts and
    /// pushing the rest through alternating τ maps.
    pub fn cluster_expansion_by_tau(&self, g: &[i64]) -> BTreeMap<RootId, i64> {
        let n = self.rank();
        let mut out = BTreeMap::new();
        let mut cur = g.to_vec();
        let mut applied = 0usize;
        let bound = 2 * self.coxeter.iter().max().copied().unwrap_or(2) + 4;
        loop {
            for i in 0..n {
                if cur[i] < 0 {
                    let mut e = vec![0; n];
                    e[i] = -1;
                    let back = self.tau_power_inv_vec(1, applied, e);
                    *out.entry(self.index[&back]).or_insert(0) += -cur[i];
                    cur[i] = 0;
                }
            }
            if cur.iter().all(|&x| x == 0) {
                return out;
            }
            assert!(applied <= bound, "τ-reduction did not terminate");
            cur = self.tau(if applied.is_multiple_of(2) { 1 } else { -1 }, &cur);
            applied += 1;
        }
    }

    /// B(C): column β is ε(β,β′)·([β+β′]_C − [β⊎β′]_C), rows and columns in
    /// the order of `c`.
    pub fn b_matrix_of_cluster(&self, c: &[RootId]) -> ExchangeMatrix {
        let n = self.rank();
        let mut rows = vec![vec![0i64; n]; n];
        for (q, &b) in c.iter().enumerate() {
            let (_, bp) = self.adjacent_cluster(c, b);
            let eps = self.sign_eps(b, bp).expect("cluster partners are exchangeable") as i64;
            let sum: LatticeVector = (0..n).map(|i| self.roots[b][i] + self.roots[bp][i]).collect();
            let up = self.subplus(b, bp).unwrap();
            let x = self.coordinates(c, &sum).expect("cluster is a lattice basis");
            let y = self.coordinates(c, &up).expect("cluster is a lattice basis");
            for p in 0..n {
                rows[p][q] = eps * (x[p] - y[p]);
            }
        }
        let labels = c.iter().map(|&r| self.root_label(r)).collect();
        ExchangeMatrix::with_labels(labels, rows.into_iter().map(|r| r.into_iter().map(Into::into).collect()).collect())
            .unwrap()
    }

    pub fn exchange_graph(&self) -> ExchangeGraph {
        let clusters = self.clusters().to_vec();
        let mut edges = Vec::new();
        for (a, c) in clusters.iter().enumerate() {
            for &r in c {
                let (next, into) = self.adjacent_cluster(c, r);
                let b = self.cluster_index(&next).unwrap();
                if a < b {
                    edges.push(ExchangeEdge { a, b, out: r, into });
                }
            }
        }
        ExchangeGraph { clusters, edges }
    }

    /// Links of all (n−2)-faces, each walked as a cycle of alternating exchanges.
    pub fn geodesic_loops(&self) -> Vec<GeodesicLoop> {
        let n = self.rank();
        if n < 2 {
            return Vec::new();
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for c in self.clusters() {
            for p in 0..n {
                for q in p + 1..n {
                    let face: Vec<RootId> = c.iter().enumerate().filter(|&(i, _)| i != p && i != q).map(|(_, &r)| r).collect();
                    if !seen.insert(face.clone()) {
                        continue;
                    }
                    let b = self.b_matrix_of_cluster(c);
                    let weight = (b.entry(p, q) * b.entry(q, p)).abs();
                    let (mut cur, mut x, mut y) = (c.clone(), c[p], c[q]);
                    let mut length = 0;
                    loop {
                        let (next, xp) = self.adjacent_cluster(&cur, x);
                        cur = next;
                        length += 1;
                        x = y;
                        y = xp;
                        if cur == *c {
                            break;
                        }
                        assert!(length <= 4 * self.len(), "link is not a cycle");
                    }
                    out.push(GeodesicLoop { face, length, weight });
                }
            }
        }
        out
    }

    /// Positive roots without a simple α_j of equal length occurring with coefficient 1.
    pub fn exceptional_roots(&self) -> Vec<LatticeVector> {
        let n = self.rank();
        self.positive_roots()
            .iter()
            .filter(|r| {
                let len = self.inner(r, r);
                !(0..n).any(|j| r[j] == 1 && self.form[j][j] == len)
            })
            .cloned()
            .collect()
    }

    pub fn root_label(&self, id: RootId) -> String {
        vector_label(&self.roots[id])
    }

    pub fn roots_json(&self) -> Value {
        json!(self.roots)
    }

    pub fn clusters_json(&self) -> Value {
        let cs: Vec<Value> = self.clusters().iter().map(|c| json!(c.iter().map(|&r| &self.roots[r]).collect::<Vec<_>>())).collect();
        json!(cs)
    }

    pub fn exchange_graph_dot(&self) -> String {
        let g = self.exchange_graph();
        let mut s = String::from("graph exchange {\n");
        for (i, c) in g.clusters.iter().enumerate() {
            let label: Vec<String> = c.iter().map(|&r| self.root_label(r)).collect();
            let _ = writeln!(s, "  c{i} [label=\"{}\"];", label.join(", "));
        }
        for e in &g.edges {
            let _ = writeln!(s, "  c{} -- c{} [label=\"{} / {}\"];", e.a, e.b, self.root_label(e.out), self.root_label(e.into));
        }
        s + "}\n"
    }
}

/// Human-readable form such as `-a1` or `a1+2a2`.
pub fn vector_label(v: &[i64]) -> String {
    let mut s = String::new();
    for (i, &c) in v.iter().enumerate() {
        if c == 0 {
            continue;
        }
        if c < 0 {
            s.push('-');
        } else if !s.is_empty() {
            s.push('+');
        }
        if c.abs() != 1 {
            s += &c.abs().to_string();
        }
        let _ = write!(s, "a{}", i + 1);
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

/// Solves `Σ x_k basis_k = g` exactly; `None` unless the solution is unique and integral.
pub fn solve_integral(basis: &[&LatticeVector], g: &[i64]) -> Option<Vec<i64>> {
    let n = g.len();
    let k = basis.len();
    let mut m: Vec<Vec<Ratio<i64>>> =
        (0..n).map(|i| (0..k).map(|j| Ratio::from(basis[j][i])).chain([Ratio::from(g[i])]).collect()).collect();
    let mut row = 0;
    let mut pivots = Vec::new();
    for col in 0..k {
        let p = (row..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(row, p);
        let piv = m[row][col];
        for x in m[row].iter_mut() {
            *x /= piv;
        }
        for r in 0..n {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col];
                for c in 0..=k {
                    let v = m[row][c] * f;
                    m[r][c] -= v;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if (row..n).any(|r| !m[r][k].is_zero()) {
        return None;
    }
    let mut x = vec![0; k];
    for (r, &c) in pivots.iter().enumerate() {
        let v = m[r][k];
        if !v.is_integer() {
            return None;
        }
        x[c] = v.to_integer();
    }
    Some(x)
}

/// Determinant of a square integer matrix, by exact elimination.
pub fn determinant(rows: &[Vec<i64>]) -> i64 {
    let n = rows.len();
    let mut m: Vec<Vec<Ratio<i64>>> = rows.iter().map(|r| r.iter().map(|&x| Ratio::from(x)).collect()).collect();
    let mut det = Ratio::from(1);
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !m[r][col].is_zero()) else { return 0 };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        det *= m[col][col];
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for c in col..n {
                let v = m[col][c] * f;
                m[r][c] -= v;
            }
        }
    }
    det.to_integer()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rs(s: &str) -> RootSystem {
        RootSystem::from_type_str(s).unwrap()
    }

    #[test]
    fn cartan_conventions() {
        assert_eq!(rs("B2").cartan().0, vec![vec![2, -1], vec![-2, 2]]);
        assert_eq!(rs("C3").cartan().0[1][2], -2);
        assert_eq!(rs("C3").cartan().0[2][1], -1);
        assert_eq!(rs("G2").cartan().0, vec![vec![2, -3], vec![-1, 2]]);
    }

    #[test]
    fn small_root_systems() {
        let a2 = rs("A2");
        assert_eq!(a2.positive_roots(), &[vec![1, 0], vec![0, 1], vec![1, 1]]);
        assert_eq!(a2.coxeter_numbers(), &[3]);
        let a1 = rs("A1");
        assert_eq!(a1.positive_roots(), &[vec![1]]);
        assert_eq!(a1.coxeter_numbers(), &[2]);
        let g2 = rs("G2");
        assert_eq!(g2.positive_roots().len(), 6);
        assert!(g2.positive_roots().contains(&vec![3, 2]));
        assert_eq!(g2.coxeter_numbers(), &[6]);
    }

    #[test]
    fn tau_on_a2() {
        let a2 = rs("A2");
        assert_eq!(a2.tau(1, &[-1, 0]), vec![1, 0]);
        assert_eq!(a2.tau(-1, &[-1, 0]), vec![-1, 0]);
        assert_eq!(a2.tau(1, &[1, 1]), vec![0, 1]);
        assert_eq!(a2.tau(-1, &[1, 0]), vec![1, 1]);
        assert_eq!(a2.tau(-1, &[0, 1]), vec![0, -1]);
    }

    #[test]
    fn compat_on_a2() {
        let a2 = rs("A2");
        let id = |v: &[i64]| a2.id(v).unwrap();
        assert_eq!(a2.compatibility_degree(id(&[1, 0]), id(&[0, 1])), 1);
        assert!(a2.are_exchangeable(id(&[1, 0]), id(&[0, 1])));
        assert!(!a2.are_exchangeable(id(&[1, 0]), id(&[1, 0])));
        assert_eq!(a2.compatibility_degree(id(&[-1, 0]), id(&[0, -1])), 0);
        assert_eq!(a2.clusters().len(), 5);
        assert_eq!(rs("A1").clusters().len(), 2);
    }

    #[test]
    fn sign_and_subplus() {
        let a2 = rs("A2");
        let id = |v: &[i64]| a2.id(v).unwrap();
        assert_eq!(a2.sign_eps(id(&[-1, 0]), id(&[1, 0])).unwrap(), -1);
        assert_eq!(a2.subplus(id(&[1, 0]), id(&[0, 1])).unwrap(), vec![0, 0]);
        let a1 = rs("A1");
        assert_eq!(a1.subplus(0, 1).unwrap(), vec![0]);
    }

    #[test]
    fn adjacency_on_a2() {
        let a2 = rs("A2");
        let (c, b) = a2.adjacent_cluster(&[0, 1], 0);
        assert_eq!(b, a2.id(&[1, 0]).unwrap());
        let mut want = vec![1, a2.id(&[1, 0]).unwrap()];
        want.sort();
        assert_eq!(c, want);
        let (back, r) = a2.adjacent_cluster(&c, b);
        assert_eq!((back, r), (vec![0, 1], 0));
    }

    // Def. of B(C) evaluated at −Π: the partner of −α_j is α_j and
    // (−α_j) ⊎ α_j = Σ a_ij α_i, so b = ε(−α_j, α_j) a_ij = ε(i) a_ij.
    #[test]
    fn b_matrix_at_negative_simples() {
        for t in ["A3", "B3", "C3", "D4", "G2", "F4"] {
            let r = rs(t);
            let n = r.rank();
            let b = r.b_matrix_of_cluster(&(0..n).collect::<Vec<_>>());
            for i in 0..n {
                for j in 0..n {
                    let want = if i == j { 0 } else { -(r.eps(j) as i64) * r.cartan().get(i, j) };
                    assert_eq!(b.entry(i, j), want, "{t} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn solver() {
        let b = [vec![1, 0], vec![1, 1]];
        let refs: Vec<&LatticeVector> = b.iter().collect();
        assert_eq!(solve_integral(&refs, &[2, 3]), Some(vec![-1, 3]));
        assert_eq!(determinant(&[vec![1, 1], vec![0, 1]]), 1);
        assert_eq!(determinant(&[vec![0, 2], vec![3, 0]]), -6);
    }

    #[test]
    fn exceptional_examples() {
        assert_eq!(rs("G2").exceptional_roots(), vec![vec![2, 1], vec![3, 2]]);
        assert_eq!(rs("E8").exceptional_roots(), vec![vec![2, 3, 4, 6, 5, 4, 3, 2]]);
        assert_eq!(rs("F4").exceptional_roots(), vec![vec![1, 2, 3, 2], vec![2, 3, 4, 2]]);
        for t in ["A4", "B3", "C4", "D5", "E6", "E7"] {
            assert!(rs(t).exceptional_roots().is_empty(), "{t}");
        }
    }

    #[test]
    fn k_counters_sum() {
        for t in ["A1", "A3", "B3", "C3", "D4", "G2", "F4", "A2xB2"] {
            let r = rs(t);
            for b in 0..r.len() {
                let h = r.coxeter_numbers()[r.component_of_root(b)];
                assert_eq!(r.k_epsilon(b, 1) + r.k_epsilon(b, -1), h + 1, "{t} {}", r.root_label(b));
            }
            for j in 0..r.rank() {
                assert_eq!(r.k_epsilon(j, -r.eps(j)), 0);
            }
        }
    }

    #[test]
    fn tau_orders() {
        // (h+2)/2 when w0 = -1 (B2, D4, G2), h+2 otherwise
        for (t, want) in [("A2", 5), ("A3", 6), ("B2", 3), ("D4", 4), ("G2", 4)] {
            assert_eq!(rs(t).tau_order(), want, "{t}");
        }
    }

    #[test]
    fn compatibility_is_symmetric_as_relation() {
        for t in ["A4", "B3", "C3", "D4", "G2", "F4"] {
            let r = rs(t);
            for a in 0..r.len() {
                for b in 0..r.len() {
                    assert_eq!(r.compatible(a, b), r.compatible(b, a));
                }
            }
        }
    }

    #[test]
    fn expansions_agree() {
        let r = rs("B3");
        let mut g = vec![-2i64; 3];
        while g[0] <= 2 {
            assert_eq!(r.cluster_expansion(&g), r.cluster_expansion_by_tau(&g), "{g:?}");
            let mut i = 2;
            loop {
                g[i] += 1;
                if g[i] <= 2 || i == 0 {
                    break;
                }
                g[i] = -2;
                i -= 1;
            }
        }
    }

    #[test]
    fn expansion_equivariance() {
        let r = rs("A3");
        for g in [vec![1, -2, 3], vec![0, 2, 1], vec![-1, -1, 2]] {
            let exp = r.cluster_expansion(&g);
            for eps in [1i8, -1] {
                let img = r.cluster_expansion(&r.tau(eps, &g));
                let moved: BTreeMap<RootId, i64> = exp.iter().map(|(&a, &c)| (r.tau_id(eps, a), c)).collect();
                assert_eq!(img, moved);
            }
        }
    }

    #[test]
    fn b_matrices_mutate_along_edges() {
        for t in ["A3", "B3", "C3", "D4", "G2"] {
            let r = rs(t);
            for c in r.clusters() {
                let b = r.b_matrix_of_cluster(c);
                assert!(b.is_sign_skew_symmetric());
                assert!(b.has_zero_diagonal());
                for (q, &beta) in c.iter().enumerate() {
                    let (next, bp) = r.adjacent_cluster(c, beta);
                    let mu = b.mutate(q).unwrap();
                    let nb = r.b_matrix_of_cluster(&next);
                    // compare entries through root labels
                    let pos = |cl: &[RootId], x: RootId| cl.iter().position(|&y| y == x).unwrap();
                    for (i, &x) in c.iter().enumerate() {
                        for (j, &y) in c.iter().enumerate() {
                            let (x2, y2) = (if x == beta { bp } else { x }, if y == beta { bp } else { y });
                            assert_eq!(mu.entry(i, j), nb.entry(pos(&next, x2), pos(&next, y2)), "{t}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn b_matrix_tau_antisymmetry() {
        let r = rs("D4");
        for c in r.clusters() {
            let b = r.b_matrix_of_cluster(c);
            for eps in [1i8, -1] {
                let img: Vec<RootId> = c.iter().map(|&a| r.tau_id(eps, a)).collect();
                let mut sorted = img.clone();
                sorted.sort_unstable();
                let tb = r.b_matrix_of_cluster(&sorted);
                let pos = |x: RootId| sorted.iter().position(|&y| y == x).unwrap();
                for i in 0..4 {
                    for j in 0..4 {
                        assert_eq!(tb.entry(pos(img[i]), pos(img[j])), -b.entry(i, j));
                    }
                }
            }
        }
    }

    #[test]
    fn labels() {
        assert_eq!(vector_label(&[-1, 0]), "-a1");
        assert_eq!(vector_label(&[1, 2, 0]), "a1+2a2");
        assert_eq!(vector_label(&[0, 0]), "0");
    }
}
