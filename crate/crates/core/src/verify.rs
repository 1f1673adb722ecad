//! Verification suites behind `mutant verify`, and the bundled golden
//! diagram corpus they run over.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::diagram::{is_2_finite, CartanKillingType, Classifier, Diagram, Family};
use crate::engine::{build_exchange_graph, check_positivity, denominator_vector, label_variables, matches_cluster_complex, ExchangeRun, Seed};
use crate::error::{Error, Result};
use crate::matrix::ExchangeMatrix;
use crate::models::{verify_geometric_identities, ModelKind, PolygonModel};
use crate::rootsys::{RootId, RootSystem};

pub const SUITES: [&str; 8] = ["involution", "commutation", "dynkin", "counts", "loops", "denominators", "positivity", "plucker"];

const DYNKIN: &str = include_str!("../data/golden/dynkin.json");
const EXTENDED: &str = include_str!("../data/golden/extended.json");
const CYCLES: &str = include_str!("../data/golden/cycles.json");
const CROWNS: &str = include_str!("../data/golden/crowns.json");

fn parse(src: &str) -> Result<Vec<Value>> {
    match serde_json::from_str(src) {
        Ok(Value::Array(v)) => Ok(v),
        _ => Err(Error::Parse("golden file is not a JSON array".into())),
    }
}

fn field<'a>(v: &'a Value, k: &str) -> Result<&'a Value> {
    v.get(k).ok_or_else(|| Error::Parse(format!("golden entry lacks \"{k}\"")))
}

/// Every orientation class of every Dynkin diagram of rank ≤ 8, with the
/// expected type (B_n stands for B_n and C_n, which share a diagram).
pub fn golden_dynkin() -> Result<Vec<(String, Diagram)>> {
    parse(DYNKIN)?
        .iter()
        .map(|e| Ok((field(e, "type")?.as_str().unwrap_or_default().to_string(), Diagram::from_json(field(e, "diagram")?)?)))
        .collect()
}

/// Extended Dynkin trees with at most 9 vertices, in several orientations.
pub fn golden_extended() -> Result<Vec<(String, Diagram)>> {
    parse(EXTENDED)?
        .iter()
        .map(|e| Ok((field(e, "name")?.as_str().unwrap_or_default().to_string(), Diagram::from_json(field(e, "diagram")?)?)))
        .collect()
}

/// Unit-weight cycles of length 3..8 that are not cyclically oriented.
pub fn golden_cycles() -> Result<Vec<Diagram>> {
    parse(CYCLES)?.iter().map(|e| Diagram::from_json(field(e, "diagram")?)).collect()
}

#[derive(Clone, Debug)]
pub struct CrownInstance {
    pub p: usize,
    pub q: usize,
    pub r: usize,
    pub s: usize,
    pub crown: Diagram,
    pub tree: Diagram,
}

/// All crowns S^s_{p,q,r} with at most 9 vertices and their trees T_{p+r−1,q,s}.
pub fn golden_crowns() -> Result<Vec<CrownInstance>> {
    parse(CROWNS)?
        .iter()
        .map(|e| {
            let g = |k: &str| -> Result<usize> { Ok(field(e, k)?.as_u64().unwrap_or_default() as usize) };
            Ok(CrownInstance {
                p: g("p")?,
                q: g("q")?,
                r: g("r")?,
                s: g("s")?,
                crown: Diagram::from_json(field(e, "crown")?)?,
                tree: Diagram::from_json(field(e, "tree")?)?,
            })
        })
        .collect()
}

/// Random sign-skew-symmetric integer matrix with entries in [−bound, bound].
pub fn random_sign_skew(rng: &mut impl Rng, n: usize, bound: i64) -> ExchangeMatrix {
    let mut rows = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let b = rng.gen_range(-bound..=bound);
            if b != 0 {
                rows[i][j] = b;
                rows[j][i] = -b.signum() * rng.gen_range(1..=bound);
            }
        }
    }
    ExchangeMatrix::new(rows).expect("square matrix")
}

/// Random skew-symmetrizable matrix S·diag(d), S skew-symmetric.
pub fn random_skew_symmetrizable(rng: &mut impl Rng, n: usize) -> ExchangeMatrix {
    let d: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
    let mut rows = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let s = rng.gen_range(-2..=2);
            rows[i][j] = s * d[j];
            rows[j][i] = -s * d[i];
        }
    }
    ExchangeMatrix::new(rows).expect("square matrix")
}

#[derive(Clone, Debug, Default)]
pub struct SuiteOptions {
    pub ty: Option<CartanKillingType>,
    pub kind: Option<ModelKind>,
    pub n: Option<usize>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: String,
    pub checked: usize,
    pub failure: Option<String>,
    pub notes: Vec<String>,
}

impl SuiteReport {
    fn new(suite: &str) -> Self {
        SuiteReport { suite: suite.to_string(), checked: 0, failure: None, notes: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }

    fn fail(mut self, msg: String) -> Self {
        self.failure = Some(msg);
        self
    }

    pub fn to_json(&self) -> Value {
        json!({"suite": self.suite, "passed": self.passed(), "checked": self.checked, "counterexample": self.failure, "notes": self.notes})
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.failure {
            None => write!(f, "{}: pass ({} checked)", self.suite, self.checked)?,
            Some(m) => write!(f, "{}: FAIL after {} checks: {m}", self.suite, self.checked)?,
        }
        for n in &self.notes {
            write!(f, "\n  {n}")?;
        }
        Ok(())
    }
}

pub fn run_suite(name: &str, opts: &SuiteOptions) -> Result<SuiteReport> {
    match name {
        "involution" => Ok(involution(opts.seed)),
        "commutation" => commutation(opts.seed),
        "dynkin" => dynkin(),
        "counts" => counts(opts),
        "loops" => loops(opts),
        "denominators" => denominators(opts),
        "positivity" => positivity(opts),
        "plucker" => plucker(opts),
        _ => Err(Error::Parse(format!("unknown suite \"{name}\"; expected one of {}", SUITES.join(", ")))),
    }
}

fn involution(seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("involution");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..1000 {
        let n = rng.gen_range(2..=6);
        let b = random_sign_skew(&mut rng, n, 3);
        for k in 0..n {
            let back = b.mutate(k).and_then(|m| m.mutate(k));
            if back.as_ref() != Ok(&b) {
                return rep.fail(format!("mutation at {} of {}", k + 1, b.to_json()));
            }
            rep.checked += 1;
        }
    }
    rep
}

fn commutation(seed: u64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("commutation");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..500 {
        let n = rng.gen_range(3..=6);
        let b = random_skew_symmetrizable(&mut rng, n);
        let g = Diagram::of_matrix(&b)?;
        for k in 0..n {
            let lhs = Diagram::of_matrix(&b.mutate(k)?)?;
            if g.mutate(k).as_ref() != Ok(&lhs) {
                return Ok(rep.fail(format!("mutation at {} of {}", k + 1, b.to_json())));
            }
            rep.checked += 1;
        }
    }
    Ok(rep)
}

fn dynkin() -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("dynkin");
    let mut cl = Classifier::new();
    for (want, d) in golden_dynkin()? {
        let got = cl.recognize(&d).map(|t| t.to_string());
        if got.as_deref() != Some(want.as_str()) {
            return Ok(rep.fail(format!("{d} recognized as {got:?}, expected {want}")));
        }
        rep.checked += 1;
    }
    for (name, d) in golden_extended()? {
        if is_2_finite(&d) {
            return Ok(rep.fail(format!("{name} {d} reported 2-finite")));
        }
        rep.checked += 1;
    }
    for d in golden_cycles()? {
        if is_2_finite(&d) {
            return Ok(rep.fail(format!("cycle {d} reported 2-finite")));
        }
        rep.checked += 1;
    }
    Ok(rep)
}

fn types_or(opts: &SuiteOptions, default: &[&str]) -> Result<Vec<CartanKillingType>> {
    match &opts.ty {
        Some(t) => Ok(vec![t.clone()]),
        None => default.iter().map(|s| s.parse()).collect(),
    }
}

/// Maximal sets of pairwise compatible roots, by Bron–Kerbosch.
pub fn maximal_compatible_sets(rs: &RootSystem) -> Vec<Vec<RootId>> {
    fn go(rs: &RootSystem, r: &mut Vec<RootId>, p: Vec<RootId>, x: Vec<RootId>, out: &mut Vec<Vec<RootId>>) {
        if p.is_empty() && x.is_empty() {
            out.push(r.clone());
            return;
        }
        let mut p = p;
        let mut x = x;
        while let Some(v) = p.pop() {
            r.push(v);
            let keep = |s: &[RootId]| s.iter().copied().filter(|&u| rs.compatible(u, v)).collect::<Vec<_>>();
            go(rs, r, keep(&p), keep(&x), out);
            r.pop();
            x.push(v);
        }
    }
    let mut out = Vec::new();
    go(rs, &mut Vec::new(), (0..rs.len()).collect(), Vec::new(), &mut out);
    for c in &mut out {
        c.sort_unstable();
    }
    out.sort();
    out
}

fn counts(opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("counts");
    for ty in types_or(opts, &["A1xA1", "A2", "B2", "G2", "A3", "B3", "C3", "D4"])? {
        let rs = RootSystem::new(&ty)?;
        let brute = maximal_compatible_sets(&rs);
        let clusters: BTreeSet<&Vec<RootId>> = rs.clusters().iter().collect();
        let brute_set: BTreeSet<&Vec<RootId>> = brute.iter().collect();
        if clusters != brute_set {
            return Ok(rep.fail(format!("{ty}: {} clusters but {} maximal compatible sets", clusters.len(), brute.len())));
        }
        if ty.rank() == 2 {
            let g = rs.exchange_graph();
            let cycle = g.edges.len() == g.clusters.len() && (0..g.clusters.len()).all(|v| g.neighbors(v).len() == 2);
            if !cycle {
                return Ok(rep.fail(format!("{ty}: exchange graph is not a polygon")));
            }
        }
        rep.notes.push(format!("{ty}: {} clusters", clusters.len()));
        rep.checked += 1;
    }
    Ok(rep)
}

/// Coxeter number of the rank-2 system with a_ij a_ji = w.
fn rank2_coxeter(w: i64) -> Option<usize> {
    match w {
        0 => Some(2),
        1 => Some(3),
        2 => Some(4),
        3 => Some(6),
        _ => None,
    }
}

fn loops(opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("loops");
    for ty in types_or(opts, &["A3", "B3", "D4"])? {
        let rs = RootSystem::new(&ty)?;
        let mut lengths = BTreeSet::new();
        for l in rs.geodesic_loops() {
            if rank2_coxeter(l.weight).map(|h| h + 2) != Some(l.length) {
                return Ok(rep.fail(format!("{ty}: loop around {:?} has length {} and weight {}", l.face, l.length, l.weight)));
            }
            lengths.insert(l.length);
            rep.checked += 1;
        }
        rep.notes.push(format!("{ty}: loop lengths {lengths:?}"));
    }
    Ok(rep)
}

/// Engine run from (B(−Π), trivial coefficients).
pub fn root_run(rs: &RootSystem, seed_cap: usize) -> Result<ExchangeRun> {
    let start: Vec<RootId> = (0..rs.rank()).map(|i| rs.negative_simple(i)).collect();
    build_exchange_graph(&Seed::coefficient_free(rs.b_matrix_of_cluster(&start))?, seed_cap)
}

fn denominators(opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("denominators");
    for ty in types_or(opts, &["A3", "B3", "D4"])? {
        let rs = RootSystem::new(&ty)?;
        let run = root_run(&rs, 1_000_000)?;
        if !run.closed {
            return Ok(rep.fail(format!("{ty}: run did not close")));
        }
        for (i, v) in run.variables.iter().enumerate() {
            if let Err(e) = denominator_vector(v) {
                return Ok(rep.fail(format!("{ty}: variable {} ({}): {e}", i + 1, run.render_variable(i))));
            }
        }
        if let Err(e) = label_variables(&run, &rs) {
            return Ok(rep.fail(format!("{ty}: {e}")));
        }
        if !matches_cluster_complex(&run, &rs)? {
            return Ok(rep.fail(format!("{ty}: clusters differ from the cluster complex")));
        }
        rep.checked += run.variables.len();
        rep.notes.push(format!("{ty}: {} variables, {} seeds", run.variables.len(), run.seeds.len()));
    }
    Ok(rep)
}

fn positivity(opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("positivity");
    let tys = types_or(opts, &["A3", "B3", "D4"])?;
    let mut runs: Vec<(String, ExchangeRun)> = Vec::new();
    for ty in &tys {
        runs.push((format!("{ty}"), root_run(&RootSystem::new(ty)?, 1_000_000)?));
    }
    let models: Vec<(ModelKind, usize)> = match &opts.ty {
        None => vec![(ModelKind::A, 3), (ModelKind::B, 3)],
        Some(t) if t.is_irreducible() => {
            let (f, n) = t.components()[0];
            ModelKind::from_letter(f.letter()).filter(|k| n >= 2 || *k == ModelKind::A).into_iter().map(|k| (k, n)).collect()
        }
        Some(_) => Vec::new(),
    };
    for (k, n) in models {
        if let Ok(m) = PolygonModel::new(k, n) {
            runs.push((format!("{k}{n} special coefficients"), build_exchange_graph(&m.seed(m.snake())?, 1_000_000)?));
        }
    }
    for (name, run) in runs {
        for (i, v) in run.variables.iter().enumerate() {
            if !check_positivity(v) {
                return Ok(rep.fail(format!("{name}: variable {} = {}", i + 1, run.render_variable(i))));
            }
            rep.checked += 1;
        }
        rep.notes.push(format!("{name}: {} variables", run.variables.len()));
    }
    Ok(rep)
}

fn plucker(opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("plucker");
    let cases: Vec<(ModelKind, usize)> = match (opts.kind, opts.n, &opts.ty) {
        (Some(k), Some(n), _) => vec![(k, n)],
        (None, None, Some(t)) if t.is_irreducible() => {
            let (f, n) = t.components()[0];
            let k = ModelKind::from_letter(f.letter()).filter(|_| matches!(f, Family::A | Family::B | Family::C | Family::D));
            vec![(k.ok_or_else(|| Error::InvalidType(format!("{t} has no polygon model")))?, n)]
        }
        (Some(k), None, _) => default_plucker().into_iter().filter(|c| c.0 == k).collect(),
        (None, Some(_), _) => return Err(Error::Parse("--n needs --type".into())),
        _ => default_plucker(),
    };
    for (k, n) in cases {
        let r = verify_geometric_identities(k, n)?;
        rep.checked += r.checked;
        if let Some(f) = &r.failure {
            let w: Vec<String> = f.witness.iter().map(|(a, b)| format!("{a}={b}")).collect();
            return Ok(rep.fail(format!("{k}{n}: {} fails at {} ({} vs {})", f.identity, w.join(" "), f.lhs, f.rhs)));
        }
        rep.notes.push(format!("{k}{n}: {} identities", r.checked));
    }
    Ok(rep)
}

/// A with m = n+3 ≤ 8, B and C up to n = 4, D4.
pub fn default_plucker() -> Vec<(ModelKind, usize)> {
    let mut v: Vec<(ModelKind, usize)> = (1..=5).map(|n| (ModelKind::A, n)).collect();
    for n in 2..=4 {
        v.push((ModelKind::B, n));
        v.push((ModelKind::C, n));
    }
    v.push((ModelKind::D, 4));
    v
}
