//! Weighted directed diagrams, their mutation, canonical forms, mutation
//! classes and Cartan-Killing type recognition.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigUint, Sign};
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::matrix::{components, ExchangeMatrix, Surd, SymmetrizedMatrix};

/// Weighted digraph on `0..n`; `w[i][j] > 0` is an edge `i -> j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Diagram {
    w: Vec<Vec<u64>>,
}

impl Diagram {
    pub fn empty(n: usize) -> Self {
        Diagram { w: vec![vec![0; n]; n] }
    }

    /// Edges are `(tail, head, weight)`, 0-based.
    pub fn from_edges(n: usize, edges: &[(usize, usize, u64)]) -> Result<Self> {
        let mut d = Diagram::empty(n);
        for &(t, h, w) in edges {
            if t >= n || h >= n {
                return Err(Error::IndexOutOfRange { index: t.max(h), n });
            }
            if t == h || w == 0 || d.w[t][h] != 0 || d.w[h][t] != 0 {
                return Err(Error::Parse(format!("bad edge {t}->{h} weight {w}")));
            }
            d.w[t][h] = w;
        }
        Ok(d)
    }

    pub fn n(&self) -> usize {
        self.w.len()
    }

    /// Weight of the edge `i -> j`, 0 if absent.
    pub fn weight(&self, i: usize, j: usize) -> u64 {
        self.w[i][j]
    }

    /// Weight of the edge between `i` and `j` in either direction.
    pub fn uweight(&self, i: usize, j: usize) -> u64 {
        self.w[i][j].max(self.w[j][i])
    }

    pub fn edges(&self) -> Vec<(usize, usize, u64)> {
        let n = self.n();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if self.w[i][j] > 0 {
                    out.push((i, j, self.w[i][j]));
                }
            }
        }
        out
    }

    pub fn max_weight(&self) -> u64 {
        self.w.iter().flatten().copied().max().unwrap_or(0)
    }

    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        (0..self.n()).filter(|&j| self.uweight(i, j) > 0).collect()
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        components(self.n(), |i, j| self.uweight(i, j) > 0)
    }

    /// Full subdiagram on `verts`, relabelled in the given order.
    pub fn induced(&self, verts: &[usize]) -> Diagram {
        Diagram { w: verts.iter().map(|&i| verts.iter().map(|&j| self.w[i][j]).collect()).collect() }
    }

    pub fn is_tree(&self) -> bool {
        let n = self.n();
        n > 0 && self.edges().len() == n - 1 && self.components().len() == 1
    }

    /// Γ(B): edge `i -> j` of weight `|b_ij b_ji|` whenever `b_ij > 0`.
    pub fn of_matrix(b: &ExchangeMatrix) -> Result<Self> {
        if !b.is_sign_skew_symmetric() {
            return Err(Error::NotSignSkewSymmetric);
        }
        let n = b.n();
        let mut d = Diagram::empty(n);
        for i in 0..n {
            for j in 0..n {
                if b.get(i, j).sign() == Sign::Plus {
                    let p = (b.get(i, j) * b.get(j, i)).magnitude().clone();
                    d.w[i][j] = p.to_u64().ok_or_else(|| Error::Inconsistent("weight overflow".into()))?;
                }
            }
        }
        Ok(d)
    }

    /// The skew-symmetric surd matrix whose diagram is `self`.
    pub fn surd_lift(&self) -> SymmetrizedMatrix {
        let n = self.n();
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if self.w[i][j] > 0 {
                            Surd::new(Sign::Plus, BigUint::from(self.w[i][j]))
                        } else if self.w[j][i] > 0 {
                            Surd::new(Sign::Minus, BigUint::from(self.w[j][i]))
                        } else {
                            Surd::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        SymmetrizedMatrix { entries }
    }

    pub fn of_surds(s: &SymmetrizedMatrix) -> Result<Self> {
        let n = s.n();
        let mut d = Diagram::empty(n);
        for i in 0..n {
            for j in 0..n {
                let e = &s.entries[i][j];
                if e.signum() > 0 {
                    d.w[i][j] = e.radicand().to_u64().ok_or_else(|| Error::Inconsistent("weight overflow".into()))?;
                }
            }
        }
        Ok(d)
    }

    /// Diagram mutation at `k`, computed through the surd lift.
    pub fn mutate(&self, k: usize) -> Result<Self> {
        Diagram::of_surds(&self.surd_lift().mutate(k)?)
    }

    pub fn mutate_seq(&self, seq: &[usize]) -> Result<Self> {
        seq.iter().try_fold(self.clone(), |d, &k| d.mutate(k))
    }

    pub fn reversed(&self) -> Self {
        let n = self.n();
        Diagram { w: (0..n).map(|i| (0..n).map(|j| self.w[j][i]).collect()).collect() }
    }

    pub fn canonical_form(&self) -> CanonicalDiagram {
        CanonicalDiagram(canon(self, false))
    }

    /// Canonical form of the underlying undirected weighted graph.
    pub fn underlying_form(&self) -> CanonicalDiagram {
        CanonicalDiagram(canon(self, true))
    }

    pub fn is_isomorphic(&self, other: &Diagram) -> bool {
        self.canonical_form() == other.canonical_form()
    }

    pub fn to_json(&self) -> Value {
        let edges: Vec<Value> =
            self.edges().into_iter().map(|(t, h, w)| json!({"tail": t + 1, "head": h + 1, "w": w})).collect();
        json!({"n": self.n(), "edges": edges})
    }

    /// Parses `{"n": .., "edges": [{"tail","head","w"}]}` with 1-based vertices.
    pub fn from_json(v: &Value) -> Result<Self> {
        let n = v.get("n").and_then(Value::as_u64).ok_or_else(|| Error::Parse("diagram needs \"n\"".into()))? as usize;
        let mut edges = Vec::new();
        if let Some(es) = v.get("edges") {
            let es = es.as_array().ok_or_else(|| Error::Parse("\"edges\" must be an array".into()))?;
            for e in es {
                let f = |k: &str| {
                    e.get(k).and_then(Value::as_u64).ok_or_else(|| Error::Parse(format!("edge needs integer \"{k}\"")))
                };
                let (t, h, w) = (f("tail")?, f("head")?, f("w")?);
                if t == 0 || h == 0 {
                    return Err(Error::Parse("vertices are numbered from 1".into()));
                }
                edges.push((t as usize - 1, h as usize - 1, w));
            }
        }
        Diagram::from_edges(n, &edges)
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut s = format!("digraph {name} {{\n");
        for i in 0..self.n() {
            s += &format!("  {} [label=\"{}\"];\n", i + 1, i + 1);
        }
        for (t, h, w) in self.edges() {
            s += &format!("  {} -> {} [label=\"{}\"];\n", t + 1, h + 1, w);
        }
        s + "}\n"
    }

    // -- constructors --------------------------------------------------

    /// Path `0 -> 1 -> ... -> n-1` with the given edge weights.
    pub fn path(weights: &[u64]) -> Self {
        let n = weights.len() + 1;
        let edges: Vec<_> = weights.iter().enumerate().map(|(i, &w)| (i, i + 1, w)).collect();
        Diagram::from_edges(n, &edges).unwrap()
    }

    /// Cycle `0 -> 1 -> ... -> n-1 -> 0`; `forward[i]` false reverses edge `i`.
    pub fn cycle(weights: &[u64], forward: &[bool]) -> Self {
        let n = weights.len();
        let edges: Vec<_> = (0..n)
            .map(|i| if forward[i] { (i, (i + 1) % n, weights[i]) } else { ((i + 1) % n, i, weights[i]) })
            .collect();
        Diagram::from_edges(n, &edges).unwrap()
    }

    pub fn oriented_cycle(weights: &[u64]) -> Self {
        Diagram::cycle(weights, &vec![true; weights.len()])
    }

    /// `T_{p,q,r}`: three unit chains joined at vertex 0.
    pub fn t_diagram(p: usize, q: usize, r: usize) -> Self {
        let n = p + q + r + 1;
        let mut edges = Vec::new();
        let mut next = 1;
        for len in [p, q, r] {
            let mut prev = 0;
            for _ in 0..len {
                edges.push((prev, next, 1));
                prev = next;
                next += 1;
            }
        }
        Diagram::from_edges(n, &edges).unwrap()
    }

    /// `S^s_{p,q,r}` labelled so that, after deleting the
    /// middle branch, vertices `0..p+s+r` form a path pointing forward,
    /// starting at the far end of the `r` branch.
    pub fn crown(p: usize, q: usize, r: usize, s: usize) -> Self {
        assert!(p > 0 && q > 0 && r > 0);
        let len = p + s + r;
        let n = len + q;
        let mut edges: Vec<_> = (0..len - 1).map(|i| (i, i + 1, 1)).collect();
        let u_r = r - 1;
        let u_p = r + s;
        let u_q = len;
        edges.push((u_p, u_q, 1));
        edges.push((u_q, u_r, 1));
        for i in 0..q - 1 {
            edges.push((len + i, len + i + 1, 1));
        }
        Diagram::from_edges(n, &edges).unwrap()
    }

    /// Sequence of mutations (applied left to right) carrying the crown to a tree.
    pub fn crown_reduction_sequence(s: usize, r: usize) -> Vec<usize> {
        (0..s + r).rev().collect()
    }

    /// Dynkin diagram in Bourbaki numbering; edge `i` between vertices
    /// `i, i+1` (or to the branch vertex) points forward iff bit `i` of
    /// `orientation` is 0.
    pub fn dynkin(family: Family, n: usize, orientation: u64) -> Result<Self> {
        let base = dynkin_edges(family, n)?;
        let edges: Vec<_> = base
            .iter()
            .enumerate()
            .map(|(i, &(a, b, w))| if orientation >> i & 1 == 0 { (a, b, w) } else { (b, a, w) })
            .collect();
        Diagram::from_edges(n, &edges)
    }

    /// Number of orientation bits used by [`Diagram::dynkin`].
    pub fn dynkin_edge_count(family: Family, n: usize) -> Result<usize> {
        Ok(dynkin_edges(family, n)?.len())
    }
}

pub(crate) fn dynkin_edges(family: Family, n: usize) -> Result<Vec<(usize, usize, u64)>> {
    CartanKillingType::check(family, n)?;
    let chain = |m: usize| (0..m.saturating_sub(1)).map(|i| (i, i + 1, 1u64)).collect::<Vec<_>>();
    Ok(match family {
        Family::A => chain(n),
        Family::B | Family::C => {
            let mut e = chain(n);
            e[n - 2].2 = 2;
            e
        }
        Family::D => {
            let mut e = chain(n - 1);
            e.push((n - 3, n - 1, 1));
            e
        }
        // Bourbaki: 1-3-4-5-6(-7-8) with 2 attached to 4
        Family::E => {
            let mut e = vec![(0, 2, 1), (1, 3, 1)];
            e.extend((2..n - 1).map(|i| (i, i + 1, 1)));
            e
        }
        Family::F => vec![(0, 1, 1), (1, 2, 2), (2, 3, 1)],
        Family::G => vec![(0, 1, 3)],
    })
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let es: Vec<String> = self.edges().iter().map(|(t, h, w)| format!("{}->{}:{}", t + 1, h + 1, w)).collect();
        write!(f, "n={} [{}]", self.n(), es.join(" "))
    }
}

// -- canonical forms -------------------------------------------------------

/// Encoding of a diagram that is minimal over all relabellings.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalDiagram(pub Vec<u8>);

impl CanonicalDiagram {
    /// Decodes back to a representative diagram.
    pub fn to_diagram(&self) -> Diagram {
        let mut it = self.0.iter().copied();
        let n = read_varint(&mut it) as usize;
        let mut d = Diagram::empty(n);
        for i in 0..n {
            for j in i + 1..n {
                let c = read_varint(&mut it);
                if c > 0 {
                    if c % 2 == 0 {
                        d.w[i][j] = c / 2;
                    } else {
                        d.w[j][i] = c.div_ceil(2);
                    }
                }
            }
        }
        d
    }
}

fn write_varint(out: &mut Vec<u8>, mut x: u64) {
    loop {
        let b = (x & 0x7f) as u8;
        x >>= 7;
        if x == 0 {
            out.push(b);
            return;
        }
        out.push(b | 0x80);
    }
}

fn read_varint(it: &mut impl Iterator<Item = u8>) -> u64 {
    let mut x = 0u64;
    let mut shift = 0;
    for b in it.by_ref() {
        x |= ((b & 0x7f) as u64) << shift;
        if b & 0x80 == 0 {
            break;
        }
        shift += 7;
    }
    x
}

/// Pair code: 2w for `i -> j`, 2w-1 for `j -> i`.
fn pair_code(d: &Diagram, i: usize, j: usize, undirected: bool) -> u64 {
    if undirected {
        return d.uweight(i, j);
    }
    if d.w[i][j] > 0 {
        2 * d.w[i][j]
    } else if d.w[j][i] > 0 {
        2 * d.w[j][i] - 1
    } else {
        0
    }
}

fn refine(d: &Diagram, cells: &mut Vec<Vec<usize>>, undirected: bool) {
    let n = d.n();
    loop {
        let mut cell_of = vec![0; n];
        for (c, cell) in cells.iter().enumerate() {
            for &v in cell {
                cell_of[v] = c;
            }
        }
        let sig = |v: usize| {
            let mut s: Vec<(usize, u64, u64)> = (0..n)
                .filter(|&u| d.uweight(u, v) > 0)
                .map(|u| if undirected { (cell_of[u], d.uweight(u, v), 0) } else { (cell_of[u], d.w[v][u], d.w[u][v]) })
                .collect();
            s.sort_unstable();
            s
        };
        let mut next = Vec::with_capacity(cells.len());
        for cell in cells.iter() {
            if cell.len() == 1 {
                next.push(cell.clone());
                continue;
            }
            let mut keyed: Vec<_> = cell.iter().map(|&v| (sig(v), v)).collect();
            keyed.sort();
            let mut start = 0;
            for i in 1..=keyed.len() {
                if i == keyed.len() || keyed[i].0 != keyed[start].0 {
                    next.push(keyed[start..i].iter().map(|x| x.1).collect());
                    start = i;
                }
            }
        }
        let stable = next.len() == cells.len();
        *cells = next;
        if stable {
            return;
        }
    }
}

fn twins(d: &Diagram, u: usize, v: usize, undirected: bool) -> bool {
    if pair_code(d, u, v, undirected) != 0 {
        return false;
    }
    (0..d.n()).filter(|&x| x != u && x != v).all(|x| d.w[u][x] == d.w[v][x] && d.w[x][u] == d.w[x][v])
}

fn search(d: &Diagram, mut cells: Vec<Vec<usize>>, undirected: bool, best: &mut Option<Vec<u64>>) {
    refine(d, &mut cells, undirected);
    let n = d.n();
    match cells.iter().position(|c| c.len() > 1) {
        None => {
            let order: Vec<usize> = cells.iter().map(|c| c[0]).collect();
            let mut code = Vec::with_capacity(n * (n - 1) / 2);
            for i in 0..n {
                for j in i + 1..n {
                    code.push(pair_code(d, order[i], order[j], undirected));
                }
            }
            if best.as_ref().is_none_or(|b| code < *b) {
                *best = Some(code);
            }
        }
        Some(idx) => {
            let cell = cells[idx].clone();
            let mut tried: Vec<usize> = Vec::new();
            for &v in &cell {
                if tried.iter().any(|&u| twins(d, u, v, undirected)) {
                    continue;
                }
                tried.push(v);
                let mut next = cells[..idx].to_vec();
                next.push(vec![v]);
                next.push(cell.iter().copied().filter(|&x| x != v).collect());
                next.extend_from_slice(&cells[idx + 1..]);
                search(d, next, undirected, best);
            }
        }
    }
}

fn canon(d: &Diagram, undirected: bool) -> Vec<u8> {
    let n = d.n();
    let mut best = None;
    if n > 0 {
        search(d, vec![(0..n).collect()], undirected, &mut best);
    }
    let mut out = Vec::new();
    write_varint(&mut out, n as u64);
    for c in best.unwrap_or_default() {
        write_varint(&mut out, c);
    }
    out
}

// -- mutation classes -------------------------------------------------------

/// Result of a capped breadth-first search over a mutation class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MutationClass {
    pub closed: bool,
    pub members: BTreeSet<CanonicalDiagram>,
}

/// BFS over diagram mutations modulo isomorphism.
pub fn mutation_class(start: &Diagram, weight_cap: u64, size_cap: usize) -> Result<MutationClass> {
    class_search(start, weight_cap, size_cap, |_| false)
}

/// A triangle that no 2-finite class contains: not cyclically oriented, or
/// with weights other than {1,1,1} and {1,2,2}.
pub fn has_forbidden_triangle(d: &Diagram) -> bool {
    let n = d.n();
    for i in 0..n {
        for j in i + 1..n {
            if d.uweight(i, j) == 0 {
                continue;
            }
            for k in j + 1..n {
                let (a, b, c) = (d.uweight(i, j), d.uweight(j, k), d.uweight(i, k));
                if b == 0 || c == 0 {
                    continue;
                }
                let cyclic = (d.weight(i, j) > 0 && d.weight(j, k) > 0 && d.weight(k, i) > 0)
                    || (d.weight(j, i) > 0 && d.weight(k, j) > 0 && d.weight(i, k) > 0);
                let mut w = [a, b, c];
                w.sort_unstable();
                if !cyclic || (w != [1, 1, 1] && w != [1, 2, 2]) {
                    return true;
                }
            }
        }
    }
    false
}

/// Class search stopping at the first member that exceeds `weight_cap` or is
/// rejected; such a stop reports the class as not closed.
fn class_search(start: &Diagram, weight_cap: u64, size_cap: usize, reject: impl Fn(&Diagram) -> bool + Sync) -> Result<MutationClass> {
    let first = start.canonical_form();
    let mut members = BTreeSet::new();
    members.insert(first.clone());
    if start.max_weight() > weight_cap || reject(start) {
        return Ok(MutationClass { closed: false, members });
    }
    let mut frontier = vec![first];
    while !frontier.is_empty() {
        let step = |c: &CanonicalDiagram| -> Result<Vec<(u64, CanonicalDiagram)>> {
            let d = c.to_diagram();
            (0..d.n())
                .map(|k| {
                    let m = d.mutate(k)?;
                    let w = if reject(&m) { u64::MAX } else { m.max_weight() };
                    Ok((w, m.canonical_form()))
                })
                .collect()
        };
        let results: Vec<Result<Vec<_>>> =
            if frontier.len() >= 32 { frontier.par_iter().map(step).collect() } else { frontier.iter().map(step).collect() };
        let mut next = Vec::new();
        for r in results {
            for (w, c) in r? {
                if w > weight_cap {
                    members.insert(c);
                    return Ok(MutationClass { closed: false, members });
                }
                if members.insert(c.clone()) {
                    if members.len() > size_cap {
                        return Ok(MutationClass { closed: false, members });
                    }
                    next.push(c);
                }
            }
        }
        frontier = next;
    }
    Ok(MutationClass { closed: true, members })
}

/// True iff the mutation class never produces a weight above 3.
/// Diagrams that fail to lift along some mutation are reported as not
/// 2-finite: such a failure exhibits a triangle forbidden in 2-finite classes.
/// The search also stops at a forbidden triangle, which certifies
/// 2-infiniteness without waiting for a heavy edge.
pub fn is_2_finite(d: &Diagram) -> bool {
    matches!(class_search(d, 3, usize::MAX, has_forbidden_triangle), Ok(MutationClass { closed: true, .. }))
}

/// Mutation equivalence modulo relabelling, by bidirectional BFS.
pub fn are_mutation_equivalent(a: &Diagram, b: &Diagram, size_cap: usize) -> Result<bool> {
    if a.n() != b.n() {
        return Ok(false);
    }
    let (ca, cb) = (a.canonical_form(), b.canonical_form());
    if ca == cb {
        return Ok(true);
    }
    struct Side {
        seen: HashSet<CanonicalDiagram>,
        frontier: Vec<CanonicalDiagram>,
    }
    let mut sides = [
        Side { seen: HashSet::from([ca.clone()]), frontier: vec![ca] },
        Side { seen: HashSet::from([cb.clone()]), frontier: vec![cb] },
    ];
    loop {
        let mut progressed = false;
        for s in 0..2 {
            let (this, other) = if s == 0 {
                let (x, y) = sides.split_at_mut(1);
                (&mut x[0], &y[0])
            } else {
                let (x, y) = sides.split_at_mut(1);
                (&mut y[0], &x[0])
            };
            if this.frontier.is_empty() {
                // this side's class is fully enumerated without meeting
                return Ok(false);
            }
            if this.seen.len() > size_cap {
                continue;
            }
            progressed = true;
            let mut next = Vec::new();
            for c in std::mem::take(&mut this.frontier) {
                let d = c.to_diagram();
                for k in 0..d.n() {
                    let m = d.mutate(k)?.canonical_form();
                    if other.seen.contains(&m) {
                        return Ok(true);
                    }
                    if this.seen.insert(m.clone()) {
                        next.push(m);
                    }
                }
            }
            this.frontier = next;
        }
        if !progressed {
            return Err(Error::Indeterminate);
        }
    }
}

// -- Cartan-Killing types -----------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl Family {
    pub fn letter(self) -> char {
        match self {
            Family::A => 'A',
            Family::B => 'B',
            Family::C => 'C',
            Family::D => 'D',
            Family::E => 'E',
            Family::F => 'F',
            Family::G => 'G',
        }
    }

    pub fn from_letter(c: char) -> Option<Family> {
        Some(match c.to_ascii_uppercase() {
            'A' => Family::A,
            'B' => Family::B,
            'C' => Family::C,
            'D' => Family::D,
            'E' => Family::E,
            'F' => Family::F,
            'G' => Family::G,
            _ => return None,
        })
    }
}

/// Multiset of irreducible finite types, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CartanKillingType {
    components: Vec<(Family, usize)>,
}

impl CartanKillingType {
    pub fn check(family: Family, n: usize) -> Result<()> {
        let ok = match family {
            Family::A => n >= 1,
            Family::B => n >= 2,
            Family::C => n >= 3,
            Family::D => n >= 4,
            Family::E => (6..=8).contains(&n),
            Family::F => n == 4,
            Family::G => n == 2,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidType(format!("{}{}", family.letter(), n)))
        }
    }

    pub fn new(mut components: Vec<(Family, usize)>) -> Result<Self> {
        for &(f, n) in &components {
            Self::check(f, n)?;
        }
        components.sort();
        Ok(CartanKillingType { components })
    }

    pub fn irreducible(family: Family, n: usize) -> Result<Self> {
        Self::new(vec![(family, n)])
    }

    pub fn components(&self) -> &[(Family, usize)] {
        &self.components
    }

    pub fn rank(&self) -> usize {
        self.components.iter().map(|c| c.1).sum()
    }

    pub fn is_irreducible(&self) -> bool {
        self.components.len() == 1
    }
}

impl fmt::Display for CartanKillingType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.components.iter().map(|(fam, n)| format!("{}{}", fam.letter(), n)).collect();
        write!(f, "{}", parts.join("×"))
    }
}

impl FromStr for CartanKillingType {
    type Err = Error;

    /// Accepts `A3`, `B2xA1`, `A1×A1`, `D4+A2`.
    fn from_str(s: &str) -> Result<Self> {
        let mut comps = Vec::new();
        for part in s.split(['×', 'x', '+', '*']).filter(|p| !p.is_empty()) {
            let part = part.trim();
            let mut chars = part.chars();
            let fam = chars
                .next()
                .and_then(Family::from_letter)
                .ok_or_else(|| Error::InvalidType(part.to_string()))?;
            let n: usize = chars.as_str().parse().map_err(|_| Error::InvalidType(part.to_string()))?;
            comps.push((fam, n));
        }
        if comps.is_empty() {
            return Err(Error::InvalidType(s.to_string()));
        }
        CartanKillingType::new(comps)
    }
}

/// Identifies a connected diagram that is itself an orientation of a
/// Dynkin diagram. The B/C family is reported as B.
pub fn dynkin_type_of(d: &Diagram) -> Option<(Family, usize)> {
    let n = d.n();
    if n == 1 {
        return Some((Family::A, 1));
    }
    if !d.is_tree() {
        return None;
    }
    let deg: Vec<usize> = (0..n).map(|i| d.neighbors(i).len()).collect();
    let weights: Vec<u64> = d.edges().iter().map(|e| e.2).collect();
    if weights.iter().all(|&w| w == 1) {
        let branch: Vec<usize> = (0..n).filter(|&i| deg[i] >= 3).collect();
        if branch.is_empty() {
            return Some((Family::A, n));
        }
        if branch.len() > 1 || deg[branch[0]] > 3 {
            return None;
        }
        let c = branch[0];
        let mut legs: Vec<usize> = d
            .neighbors(c)
            .into_iter()
            .map(|mut v| {
                let (mut prev, mut len) = (c, 1);
                while let Some(&next) = d.neighbors(v).iter().find(|&&u| u != prev) {
                    prev = v;
                    v = next;
                    len += 1;
                }
                len
            })
            .collect();
        legs.sort_unstable();
        return match legs[..] {
            [1, 1, _] => Some((Family::D, n)),
            [1, 2, 2] => Some((Family::E, 6)),
            [1, 2, 3] => Some((Family::E, 7)),
            [1, 2, 4] => Some((Family::E, 8)),
            _ => None,
        };
    }
    if deg.iter().any(|&x| x > 2) {
        return None;
    }
    // walk the path from an endpoint
    let start = (0..n).find(|&i| deg[i] == 1)?;
    let mut ws = Vec::new();
    let (mut prev, mut v) = (usize::MAX, start);
    while let Some(&next) = d.neighbors(v).iter().find(|&&u| u != prev) {
        ws.push(d.uweight(v, next));
        prev = v;
        v = next;
    }
    let heavy: Vec<usize> = (0..ws.len()).filter(|&i| ws[i] != 1).collect();
    if heavy.len() != 1 {
        return None;
    }
    let (pos, w) = (heavy[0], ws[heavy[0]]);
    match w {
        2 if pos == 0 || pos == ws.len() - 1 => Some((Family::B, n)),
        2 if n == 4 && pos == 1 => Some((Family::F, 4)),
        3 if n == 2 => Some((Family::G, 2)),
        _ => None,
    }
}

/// Memoizing classifier: every member of a class explored once is cached
/// with the type of the class.
#[derive(Default)]
pub struct Classifier {
    memo: HashMap<CanonicalDiagram, Option<(Family, usize)>>,
}

impl Classifier {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cached_classes(&self) -> usize {
        self.memo.values().collect::<HashSet<_>>().len()
    }

    fn component_type(&mut self, d: &Diagram) -> Option<(Family, usize)> {
        let c = d.canonical_form();
        if let Some(t) = self.memo.get(&c) {
            return *t;
        }
        let class = match mutation_class(d, 3, usize::MAX) {
            Ok(cl) => cl,
            Err(_) => {
                self.memo.insert(c, None);
                return None;
            }
        };
        let t = if class.closed {
            let found: BTreeSet<_> = class.members.iter().filter_map(|m| dynkin_type_of(&m.to_diagram())).collect();
            debug_assert!(found.len() == 1, "a 2-finite class holds exactly one Dynkin type");
            found.into_iter().next()
        } else {
            None
        };
        for m in class.members {
            self.memo.insert(m, t);
        }
        self.memo.insert(c, t);
        t
    }

    /// Type of a diagram (B/C family reported as B), if 2-finite.
    pub fn recognize(&mut self, d: &Diagram) -> Option<CartanKillingType> {
        let mut comps = Vec::new();
        for comp in d.components() {
            comps.push(self.component_type(&d.induced(&comp))?);
        }
        CartanKillingType::new(comps).ok()
    }

    /// Type of a matrix, separating B_n from C_n by the skew-symmetrizer:
    /// B_n has a single short simple root, C_n has a single long one.
    pub fn recognize_matrix(&mut self, b: &ExchangeMatrix) -> Option<CartanKillingType> {
        let dsym = b.skew_symmetrizer()?;
        let g = Diagram::of_matrix(b).ok()?;
        let mut comps = Vec::new();
        for comp in g.components() {
            let (fam, n) = self.component_type(&g.induced(&comp))?;
            if fam == Family::B && n >= 3 {
                let ds: Vec<_> = comp.iter().map(|&i| dsym[i].clone()).collect();
                let min = ds.iter().min().unwrap();
                let short = ds.iter().filter(|x| *x == min).count();
                comps.push(if short == 1 { (Family::B, n) } else { (Family::C, n) });
            } else {
                comps.push((fam, n));
            }
        }
        CartanKillingType::new(comps).ok()
    }
}

pub fn recognize_type(d: &Diagram) -> Option<CartanKillingType> {
    Classifier::new().recognize(d)
}

pub fn recognize_matrix_type(b: &ExchangeMatrix) -> Option<CartanKillingType> {
    Classifier::new().recognize_matrix(b)
}

/// DOT rendering of a set of canonical diagrams, one cluster subgraph each.
pub fn class_to_dot(members: &BTreeSet<CanonicalDiagram>) -> String {
    let mut s = String::from("digraph class {\n");
    for (idx, m) in members.iter().enumerate() {
        let d = m.to_diagram();
        s += &format!("  subgraph cluster_{idx} {{\n    label=\"{idx}\";\n");
        for i in 0..d.n() {
            s += &format!("    m{idx}_{} [label=\"{}\"];\n", i + 1, i + 1);
        }
        for (t, h, w) in d.edges() {
            s += &format!("    m{idx}_{} -> m{idx}_{} [label=\"{w}\"];\n", t + 1, h + 1);
        }
        s += "  }\n";
    }
    s + "}\n"
}

/// Histogram of edge weights, useful as a cheap class summary.
pub fn weight_profile(members: &BTreeSet<CanonicalDiagram>) -> BTreeMap<u64, usize> {
    let mut h = BTreeMap::new();
    for m in members {
        for (_, _, w) in m.to_diagram().edges() {
            *h.entry(w).or_insert(0) += 1;
        }
    }
    h
}

/// Realizes a forest diagram by an integer matrix, splitting each weight
/// `w` as `b_ij = w, b_ji = -1`.
pub fn tree_realization(d: &Diagram) -> ExchangeMatrix {
    let n = d.n();
    let mut rows = vec![vec![0i64; n]; n];
    for (t, h, w) in d.edges() {
        rows[t][h] = w as i64;
        rows[h][t] = -1;
    }
    ExchangeMatrix::new(rows).unwrap()
}
