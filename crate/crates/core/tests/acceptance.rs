//! Acceptance suite: one line per criterion, exit status 1 if any fails.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::{Duration, Instant};

use petgraph::graph::UnGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mutant::diagram::{is_2_finite, Classifier};
use mutant::engine::{build_exchange_graph, check_positivity, denominator_vector, ExchangeRun};
use mutant::models::{verify_geometric_identities, ModelKind, PolygonModel};
use mutant::verify::{default_plucker, golden_crowns, golden_cycles, golden_dynkin, golden_extended, maximal_compatible_sets, random_sign_skew, random_skew_symmetrizable, root_run};
use mutant::{Diagram, RootSystem};

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn n_pos(rs: &RootSystem) -> usize {
    rs.positive_roots().len()
}

/// h = 2|Φ+|/n for an irreducible system.
fn coxeter(rs: &RootSystem) -> usize {
    2 * n_pos(rs) / rs.rank()
}

/// s_i(v) = v − ⟨α_i^∨, v⟩ α_i in simple-root coordinates.
fn reflect(rs: &RootSystem, i: usize, v: &mut [i64]) {
    let p: i64 = (0..v.len()).map(|j| rs.cartan().get(i, j) * v[j]).sum();
    v[i] -= p;
}

/// A reduced word for w∘, found by driving 2ρ to −2ρ; then w∘ = −1 iff it
/// negates every simple root.
fn longest_is_minus_one(rs: &RootSystem) -> bool {
    let n = rs.rank();
    let mut v = vec![0i64; n];
    for r in rs.positive_roots() {
        for j in 0..n {
            v[j] += r[j];
        }
    }
    let mut word = Vec::new();
    while let Some(i) = (0..n).find(|&i| (0..n).map(|j| rs.cartan().get(i, j) * v[j]).sum::<i64>() > 0) {
        reflect(rs, i, &mut v);
        word.push(i);
    }
    (0..n).all(|j| {
        let mut a = vec![0i64; n];
        a[j] = 1;
        for &i in &word {
            reflect(rs, i, &mut a);
        }
        a.iter().enumerate().all(|(k, &c)| c == if k == j { -1 } else { 0 })
    })
}

fn graph(nodes: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> UnGraph<(), ()> {
    let mut g = UnGraph::new_undirected();
    let vs: Vec<_> = (0..nodes).map(|_| g.add_node(())).collect();
    for (a, b) in edges {
        g.add_edge(vs[a], vs[b], ());
    }
    g
}

fn c1_involution() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut checked = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(2..=6);
        let b = random_sign_skew(&mut rng, n, 3);
        for k in 0..n {
            let back = b.mutate(k).and_then(|m| m.mutate(k)).map_err(err)?;
            check(back == b, || format!("mutation at {} of {}", k + 1, b.to_json()))?;
            checked += 1;
        }
    }
    Ok(format!("1000 matrices, {checked} indices"))
}

fn c2_commutation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..500 {
        let n = rng.gen_range(3..=6);
        let b = random_skew_symmetrizable(&mut rng, n);
        let g = Diagram::of_matrix(&b).map_err(err)?;
        for k in 0..n {
            let lhs = Diagram::of_matrix(&b.mutate(k).map_err(err)?).map_err(err)?;
            check(g.mutate(k).map_err(err)? == lhs, || format!("mutation at {} of {}", k + 1, b.to_json()))?;
        }
    }
    Ok("500 matrices".into())
}

fn c3_dynkin() -> Outcome {
    let mut cl = Classifier::new();
    let dynkin = golden_dynkin().map_err(err)?;
    for (want, d) in &dynkin {
        let got = cl.recognize(d).map(|t| t.to_string());
        check(got.as_deref() == Some(want.as_str()), || format!("{d} recognized as {got:?}, expected {want}"))?;
    }
    let extended = golden_extended().map_err(err)?;
    for (name, d) in &extended {
        check(!is_2_finite(d), || format!("{name} {d} reported 2-finite"))?;
    }
    let cycles = golden_cycles().map_err(err)?;
    for d in &cycles {
        check(!is_2_finite(d), || format!("cycle {d} reported 2-finite"))?;
    }
    Ok(format!("{} Dynkin orientations recognized, {} extended trees and {} cycles rejected", dynkin.len(), extended.len(), cycles.len()))
}

fn underlying(d: &Diagram) -> Vec<(usize, usize, i64)> {
    let mut e = Vec::new();
    for i in 0..d.n() {
        for j in i + 1..d.n() {
            if d.uweight(i, j) > 0 {
                e.push((i, j, d.uweight(i, j) as i64));
            }
        }
    }
    e
}

fn is_same_tree(a: &Diagram, b: &Diagram) -> bool {
    let g = |d: &Diagram| {
        let mut g = UnGraph::<(), i64>::new_undirected();
        let vs: Vec<_> = (0..d.n()).map(|_| g.add_node(())).collect();
        for (i, j, w) in underlying(d) {
            g.add_edge(vs[i], vs[j], w);
        }
        g
    };
    let (ga, gb) = (g(a), g(b));
    ga.edge_count() + 1 == a.n() && petgraph::algo::is_isomorphic_matching(&ga, &gb, |_, _| true, |x, y| x == y)
}

fn c4_crowns() -> Outcome {
    let crowns = golden_crowns().map_err(err)?;
    for c in &crowns {
        let name = format!("S^{}_{{{},{},{}}}", c.s, c.p, c.q, c.r);
        check(Diagram::crown(c.p, c.q, c.r, c.s).is_isomorphic(&c.crown), || format!("{name}: corpus crown differs from the constructed one"))?;
        let reduced = Diagram::crown(c.p, c.q, c.r, c.s).mutate_seq(&Diagram::crown_reduction_sequence(c.s, c.r)).map_err(err)?;
        // orientations of a tree are all mutation-equivalent, so the underlying weighted tree decides
        check(is_same_tree(&reduced, &c.tree), || format!("{name}: reduction gives {reduced}, not T_{{{},{},{}}}", c.p + c.r - 1, c.q, c.s))?;
    }
    Ok(format!("{} instances", crowns.len()))
}

fn c5_counts() -> Outcome {
    for (t, want) in [("A1xA1", 4), ("A2", 5), ("B2", 6), ("G2", 8)] {
        let g = RootSystem::from_type_str(t).map_err(err)?.exchange_graph();
        let polygon = g.clusters.len() == want && g.edges.len() == want && (0..want).all(|v| g.neighbors(v).len() == 2) && {
            let pg = graph(want, g.edges.iter().map(|e| (e.a, e.b)));
            petgraph::algo::connected_components(&pg) == 1
        };
        check(polygon, || format!("{t}: {} clusters, {} edges, not a {want}-gon", g.clusters.len(), g.edges.len()))?;
    }
    let mut notes = Vec::new();
    for (t, want) in [("A3", 14), ("D4", 50)] {
        let rs = RootSystem::from_type_str(t).map_err(err)?;
        let brute = maximal_compatible_sets(&rs);
        let ours: BTreeSet<Vec<usize>> = rs.clusters().iter().cloned().collect();
        check(brute.len() == want && ours == brute.iter().cloned().collect(), || format!("{t}: {} clusters, {} maximal compatible sets, expected {want}", ours.len(), brute.len()))?;
        notes.push(format!("{t} {want}"));
    }
    Ok(format!("polygons 4/5/6/8; clusters {}", notes.join(", ")))
}

fn c6_loops() -> Outcome {
    let table: BTreeMap<i64, usize> = [(0, 2), (1, 3), (2, 4), (3, 6)].into();
    let mut notes = Vec::new();
    for t in ["A3", "B3", "D4"] {
        let rs = RootSystem::from_type_str(t).map_err(err)?;
        let loops = rs.geodesic_loops();
        check(!loops.is_empty(), || format!("{t}: no loops"))?;
        for l in &loops {
            let h = table.get(&l.weight).ok_or_else(|| format!("{t}: weight {}", l.weight))?;
            check(l.length == h + 2, || format!("{t}: loop {:?} of weight {} has length {}", l.face, l.weight, l.length))?;
        }
        notes.push(format!("{t} {}", loops.len()));
    }
    Ok(format!("loops checked: {}", notes.join(", ")))
}

struct Runs(Vec<(&'static str, RootSystem, ExchangeRun)>);

fn runs() -> Result<Runs, String> {
    let mut v = Vec::new();
    for t in ["A3", "B3", "D4"] {
        let rs = RootSystem::from_type_str(t).map_err(err)?;
        let run = root_run(&rs, 100_000).map_err(err)?;
        v.push((t, rs, run));
    }
    Ok(Runs(v))
}

fn c7_engine(runs: &Runs) -> Outcome {
    let stated: HashMap<&str, usize> = [("A3", 15), ("B3", 15), ("D4", 28)].into();
    let mut notes = Vec::new();
    for (t, rs, run) in &runs.0 {
        check(run.closed, || format!("{t}: run did not close"))?;
        let want = rs.rank() + n_pos(rs);
        check(run.variables.len() == want, || format!("{t}: {} variables, {want} almost positive roots", run.variables.len()))?;
        let g = rs.exchange_graph();
        let ours = graph(run.seeds.len(), run.edges().iter().map(|e| (e.a, e.b)));
        let theirs = graph(g.clusters.len(), g.edges.iter().map(|e| (e.a, e.b)));
        check(petgraph::algo::is_isomorphic(&ours, &theirs), || format!("{t}: exchange graph is not the dual graph of the complex"))?;
        notes.push(format!("{t} {} variables/{} seeds (stated {})", run.variables.len(), run.seeds.len(), stated[t]));
    }
    Ok(notes.join(", "))
}

fn c8_denominators(runs: &Runs) -> Outcome {
    for (t, rs, run) in &runs.0 {
        let mut seen = BTreeSet::new();
        for (i, v) in run.variables.iter().enumerate() {
            // denominator_vector fails when the numerator has no constant term
            let d = denominator_vector(v).map_err(|e| format!("{t}: variable {}: {e}", run.render_variable(i)))?;
            let id = rs.id(&d).ok_or_else(|| format!("{t}: denominator {d:?} is not an almost positive root"))?;
            check(seen.insert(id), || format!("{t}: denominator {d:?} repeated"))?;
        }
        check(seen.len() == rs.len(), || format!("{t}: {} of {} roots hit", seen.len(), rs.len()))?;
    }
    Ok("bijections onto the almost positive roots for A3, B3, D4".into())
}

fn c9_positivity(runs: &Runs) -> Outcome {
    let mut count = 0;
    for (t, _, run) in &runs.0 {
        for (i, v) in run.variables.iter().enumerate() {
            check(check_positivity(v), || format!("{t}: {}", run.render_variable(i)))?;
            count += 1;
        }
    }
    for (k, n) in [(ModelKind::A, 3), (ModelKind::B, 3)] {
        let m = PolygonModel::new(k, n).map_err(err)?;
        let run = build_exchange_graph(&m.seed(m.snake()).map_err(err)?, 100_000).map_err(err)?;
        check(run.closed, || format!("{k}{n}: special-coefficient run did not close"))?;
        for (i, v) in run.variables.iter().enumerate() {
            check(check_positivity(v), || format!("{k}{n} special: {}", run.render_variable(i)))?;
            count += 1;
        }
    }
    Ok(format!("{count} variables"))
}

fn c10_tau_orders() -> Outcome {
    let stated: [(&str, usize); 5] = [("A2", 5), ("A3", 6), ("B2", 3), ("D4", 3), ("G2", 4)];
    let mut notes = Vec::new();
    for (t, said) in stated {
        let rs = RootSystem::from_type_str(t).map_err(err)?;
        let perm: Vec<usize> = (0..rs.len()).map(|id| rs.tau_id(-1, rs.tau_id(1, id))).collect();
        let mut order = 1usize;
        for start in 0..perm.len() {
            let (mut x, mut len) = (perm[start], 1);
            while x != start {
                x = perm[x];
                len += 1;
            }
            order = num_integer::lcm(order, len);
        }
        let h = coxeter(&rs);
        let want = if longest_is_minus_one(&rs) { (h + 2) / 2 } else { h + 2 };
        check(order == want, || format!("{t}: order {order}, expected {want} from h = {h}"))?;
        notes.push(if order == said { format!("{t} {order}") } else { format!("{t} {order} (stated {said}; h = {h}, w0 = -1)") });
    }
    Ok(notes.join(", "))
}

/// Smallest k with the alternating τ-orbit of β, started at τ_ε, landing
/// in −Π after k steps and fixed by the next map.
fn k_counter(rs: &RootSystem, id: usize, eps: i8) -> usize {
    let (mut x, mut e, mut k) = (id, eps, 0);
    loop {
        if rs.tau_id(e, x) == x && rs.as_negative_simple(x).is_some() {
            return k;
        }
        x = rs.tau_id(e, x);
        e = -e;
        k += 1;
    }
}

fn c11_k_counters() -> Outcome {
    let types = ["A1", "A2", "A3", "A4", "B2", "B3", "B4", "C3", "C4", "D4", "F4", "G2"];
    let mut count = 0;
    for t in types {
        let rs = RootSystem::from_type_str(t).map_err(err)?;
        let h = coxeter(&rs);
        for id in 0..rs.len() {
            let (kp, km) = (k_counter(&rs, id, 1), k_counter(&rs, id, -1));
            check(kp + km == h + 1, || format!("{t} {}: {kp} + {km} != {}", rs.root_label(id), h + 1))?;
            check(rs.k_epsilon(id, 1) == kp && rs.k_epsilon(id, -1) == km, || format!("{t} {}: library counters disagree", rs.root_label(id)))?;
            count += 1;
        }
    }
    Ok(format!("{count} roots in {} types", types.len()))
}

fn c12_exceptional() -> Outcome {
    let listed: BTreeMap<&str, Vec<Vec<i64>>> = [
        ("E8", vec![vec![2, 3, 4, 6, 5, 4, 3, 2]]),
        ("F4", vec![vec![2, 3, 4, 2], vec![1, 2, 3, 2]]),
        ("G2", vec![vec![3, 2], vec![2, 1]]),
    ]
    .into();
    let mut types: Vec<String> = Vec::new();
    for n in 1..=8 {
        types.push(format!("A{n}"));
    }
    for n in 2..=8 {
        types.push(format!("B{n}"));
    }
    for n in 3..=8 {
        types.push(format!("C{n}"));
    }
    for n in 4..=8 {
        types.push(format!("D{n}"));
    }
    types.extend(["E6", "E7", "E8", "F4", "G2"].map(String::from));
    let mut total = 0;
    for t in &types {
        let rs = RootSystem::from_type_str(t).map_err(err)?;
        let got: BTreeSet<Vec<i64>> = rs.exceptional_roots().into_iter().collect();
        let want: BTreeSet<Vec<i64>> = listed.get(t.as_str()).cloned().unwrap_or_default().into_iter().collect();
        check(got == want, || format!("{t}: {got:?}, expected {want:?}"))?;
        total += got.len();
    }
    check(total == 5, || format!("{total} roots"))?;
    Ok(format!("5 roots over {} types", types.len()))
}

fn c13_identities() -> Outcome {
    let mut total = 0;
    for (k, n) in default_plucker() {
        let r = verify_geometric_identities(k, n).map_err(err)?;
        if let Some(f) = &r.failure {
            return Err(format!("{k}{n}: {} ({} vs {})", f.identity, f.lhs, f.rhs));
        }
        check(r.checked > 0, || format!("{k}{n}: nothing checked"))?;
        total += r.checked;
    }
    Ok(format!("{total} identity instances (A m<=8, B/C n<=4, D4)"))
}

fn c14_hexagon() -> Outcome {
    let m = PolygonModel::new(ModelKind::A, 3).map_err(err)?;
    let rs = m.root_system();
    let (ts, flips) = m.flip_graph().map_err(err)?;
    let g = rs.exchange_graph();
    let cluster_of = |t: &Vec<usize>| {
        let mut c: Vec<usize> = t.iter().map(|&o| m.root_of(o)).collect();
        c.sort_unstable();
        c
    };
    let key = |a: Vec<usize>, b: Vec<usize>, x: usize, y: usize| if a < b { (a, b, x, y) } else { (b, a, y, x) };
    let flip_edges: BTreeSet<_> = flips.iter().map(|&(i, j, o, n)| key(cluster_of(&ts[i]), cluster_of(&ts[j]), m.root_of(o), m.root_of(n))).collect();
    let complex_edges: BTreeSet<_> = g.edges.iter().map(|e| key(g.clusters[e.a].clone(), g.clusters[e.b].clone(), e.out, e.into)).collect();
    check(ts.len() == 14 && flip_edges == complex_edges, || "flip graph and complex differ".into())?;

    // walk the engine run alongside flips from the snake, matching variables to diagonals
    let run = build_exchange_graph(&m.seed(m.snake()).map_err(err)?, 10_000).map_err(err)?;
    check(run.closed && run.seeds.len() == 14, || format!("engine run has {} seeds", run.seeds.len()))?;
    let mut var_orbit: HashMap<usize, usize> = HashMap::new();
    let mut seen: HashMap<usize, Vec<usize>> = HashMap::from([(0, m.snake().to_vec())]);
    let mut queue = vec![0usize];
    while let Some(s) = queue.pop() {
        let orbits = seen[&s].clone();
        for (p, &o) in orbits.iter().enumerate() {
            let v = run.seed_vars[s][p];
            check(*var_orbit.entry(v).or_insert(o) == o, || format!("variable {} matched to two diagonals", run.render_variable(v)))?;
            let (b, pb) = run.neighbors[s][p].ok_or("open run")?;
            let flipped = m.flip(&orbits, o).map_err(err)?;
            let new = *flipped.iter().find(|x| !orbits.contains(x)).ok_or("flip kept every diagonal")?;
            let next: Vec<usize> = (0..orbits.len())
                .map(|q| if q == pb { new } else { orbits[run.seed_vars[s].iter().position(|&u| u == run.seed_vars[b][q]).unwrap()] })
                .collect();
            match seen.get(&b) {
                Some(prev) => check(*prev == next, || format!("seed {b} reached as two triangulations"))?,
                None => {
                    seen.insert(b, next);
                    queue.push(b);
                }
            }
        }
    }
    check(seen.len() == 14 && var_orbit.len() == 9, || format!("{} seeds and {} variables matched", seen.len(), var_orbit.len()))?;
    let engine_edges: BTreeSet<_> = run
        .edges()
        .iter()
        .map(|e| {
            let (x, y) = (var_orbit[&run.seed_vars[e.a][e.pa]], var_orbit[&run.seed_vars[e.b][e.pb]]);
            key(cluster_of(&seen[&e.a]), cluster_of(&seen[&e.b]), m.root_of(x), m.root_of(y))
        })
        .collect();
    check(engine_edges == complex_edges, || "engine graph labels differ from the complex".into())?;
    Ok(format!("14 triangulations, {} labelled edges agree in all three graphs", complex_edges.len()))
}

fn main() {
    let mut failed = 0;
    let mut report = |i: usize, limit: Option<u64>, f: &mut dyn FnMut() -> Outcome| {
        let t0 = Instant::now();
        let out = f();
        let dt = t0.elapsed();
        let over = limit.filter(|&s| dt > Duration::from_secs(s));
        let line = match (&out, over) {
            (Ok(msg), None) => format!("criterion {i:2}: pass ({msg}; {:.2}s)", dt.as_secs_f64()),
            (Ok(msg), Some(s)) => format!("criterion {i:2}: FAIL time {:.2}s over the {s}s limit ({msg})", dt.as_secs_f64()),
            (Err(msg), _) => format!("criterion {i:2}: FAIL {msg}"),
        };
        if out.is_err() || over.is_some() {
            failed += 1;
        }
        println!("{line}");
    };
    report(1, Some(1), &mut c1_involution);
    report(2, Some(5), &mut c2_commutation);
    report(3, Some(60), &mut c3_dynkin);
    report(4, Some(60), &mut c4_crowns);
    report(5, Some(10), &mut c5_counts);
    report(6, Some(30), &mut c6_loops);
    let mut shared: Option<Runs> = None;
    report(7, Some(120), &mut || {
        let r = runs()?;
        let out = c7_engine(&r);
        shared = Some(r);
        out
    });
    let shared = shared.ok_or("runs failed");
    report(8, None, &mut || c8_denominators(shared.as_ref().map_err(|e| e.to_string())?));
    report(9, None, &mut || c9_positivity(shared.as_ref().map_err(|e| e.to_string())?));
    report(10, Some(1), &mut c10_tau_orders);
    report(11, None, &mut c11_k_counters);
    report(12, Some(30), &mut c12_exceptional);
    report(13, Some(60), &mut c13_identities);
    report(14, None, &mut c14_hexagon);
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
