use std::collections::{BTreeSet, HashMap, VecDeque};

use num_bigint::BigInt;
use petgraph::graph::UnGraph;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mutant::diagram::{has_forbidden_triangle, mutation_class, recognize_type, tree_realization};
use mutant::engine::{build_exchange_graph, check_laurent_in_cluster, normalize_ratio, CoefficientPair, Seed, TropElement, TropSemifield};
use mutant::models::{ModelKind, PolygonModel};
use mutant::rootsys::determinant;
use mutant::verify::{random_skew_symmetrizable, root_run};
use mutant::{Diagram, ExchangeMatrix, Family, RootSystem};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn arb_matrix() -> impl Strategy<Value = ExchangeMatrix> {
    (1usize..=6).prop_flat_map(|n| prop::collection::vec(prop::collection::vec(-5i64..=5, n), n)).prop_map(|rows| ExchangeMatrix::new(rows).unwrap())
}

/// A random orientation of a Dynkin diagram of rank ≤ 6.
fn random_dynkin(r: &mut impl Rng) -> (Family, usize, Diagram) {
    let choices = [(Family::A, 2), (Family::A, 4), (Family::A, 5), (Family::B, 3), (Family::B, 4), (Family::C, 4), (Family::D, 4), (Family::D, 5), (Family::E, 6), (Family::F, 4), (Family::G, 2)];
    let (f, n) = choices[r.gen_range(0..choices.len())];
    let bits = r.gen_range(0..1u64 << Diagram::dynkin_edge_count(f, n).unwrap());
    (f, n, Diagram::dynkin(f, n, bits).unwrap())
}

fn random_walk(d: &Diagram, r: &mut impl Rng, steps: usize) -> Diagram {
    (0..steps).fold(d.clone(), |d, _| d.mutate(r.gen_range(0..d.n())).unwrap())
}

/// Chordless cycles of length ≥ 4 that are not cyclically oriented.
fn has_noncyclic_cycle(d: &Diagram) -> bool {
    let n = d.n();
    for mask in 0u32..1 << n {
        let vs: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        if vs.len() < 4 {
            continue;
        }
        let adj = |i: usize, j: usize| d.uweight(i, j) > 0;
        if !vs.iter().all(|&v| vs.iter().filter(|&&u| adj(u, v)).count() == 2) {
            continue;
        }
        // walk the cycle and count edges agreeing with the walk direction
        let mut order = vec![vs[0]];
        while order.len() < vs.len() {
            let last = *order.last().unwrap();
            let next = vs.iter().copied().find(|&u| adj(last, u) && !order.contains(&u));
            match next {
                Some(u) => order.push(u),
                None => break,
            }
        }
        if order.len() < vs.len() {
            continue; // disjoint union of cycles
        }
        let k = order.len();
        let forward = (0..k).filter(|&i| d.weight(order[i], order[(i + 1) % k]) > 0).count();
        if forward != 0 && forward != k {
            return true;
        }
    }
    false
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn matrix_mutation_is_an_involution(b in arb_matrix(), k in 0usize..6) {
        let k = k % b.n();
        prop_assert_eq!(b.mutate(k).unwrap().mutate(k).unwrap(), b);
    }

    #[test]
    fn mutation_keeps_the_symmetrizer(seed: u64, k in 0usize..6) {
        let b = random_skew_symmetrizable(&mut rng(seed), 3 + (seed % 4) as usize);
        let k = k % b.n();
        let d = b.skew_symmetrizer().unwrap();
        let m = b.mutate(k).unwrap();
        for i in 0..b.n() {
            for j in 0..b.n() {
                prop_assert_eq!(&d[i] * m.get(i, j), -(&d[j] * m.get(j, i)));
            }
        }
    }

    #[test]
    fn diagram_mutation_commutes(seed: u64, k in 0usize..6) {
        let b = random_skew_symmetrizable(&mut rng(seed), 3 + (seed % 4) as usize);
        let k = k % b.n();
        let lhs = Diagram::of_matrix(&b.mutate(k).unwrap()).unwrap();
        prop_assert_eq!(Diagram::of_matrix(&b).unwrap().mutate(k).unwrap(), lhs);
    }

    #[test]
    fn laws_inside_finite_classes(seed: u64, steps in 0usize..12) {
        let mut r = rng(seed);
        let (f, n, d) = random_dynkin(&mut r);
        let m = random_walk(&d, &mut r, steps);
        prop_assert!(!has_forbidden_triangle(&m), "{m}");
        prop_assert!(!has_noncyclic_cycle(&m), "{m}");
        prop_assert!(m.max_weight() <= 3);
        let t = recognize_type(&m).unwrap();
        let want = if f == Family::C { Family::B } else { f };
        prop_assert_eq!(t.components(), &[(want, n)][..]);
    }

    #[test]
    fn cartan_counterpart_is_symmetrizable(seed: u64, steps in 0usize..6) {
        let mut r = rng(seed);
        let (_, _, d) = random_dynkin(&mut r);
        let b = tree_realization(&d);
        let b = (0..steps).fold(b, |b, _| { let k = r.gen_range(0..b.n()); b.mutate(k).unwrap() });
        let dd = b.skew_symmetrizer().unwrap();
        let a = b.cartan_counterpart();
        if recognize_type(&Diagram::of_matrix(&b).unwrap()).is_some() && a.is_valid() {
            for i in 0..a.n() {
                for j in 0..a.n() {
                    prop_assert_eq!(&dd[i] * BigInt::from(a.get(i, j)), &dd[j] * BigInt::from(a.get(j, i)));
                }
            }
        }
    }

    #[test]
    fn seed_mutation_is_an_involution(seed: u64, k in 0usize..6) {
        let mut r = rng(seed);
        let n = 2 + (seed % 4) as usize;
        let b = random_skew_symmetrizable(&mut r, n);
        let m = 3;
        let sf = TropSemifield::new((1..=m).map(|i| format!("q{i}")).collect());
        let coeffs: Vec<CoefficientPair> = (0..n).map(|_| normalize_ratio(&TropElement((0..m).map(|_| r.gen_range(-2..=2)).collect()))).collect();
        let s = Seed::initial(b, sf, coeffs).unwrap();
        let k = k % n;
        let back = s.mutate(k).unwrap().mutate(k).unwrap();
        prop_assert_eq!(back.cluster, s.cluster.clone());
        prop_assert_eq!(back.coeffs, s.coeffs.clone());
        prop_assert_eq!(back.matrix.to_i64_rows(), s.matrix.to_i64_rows());
    }
}

#[test]
fn symmetrized_mutation_commutes() {
    let mut r = rng(7);
    for _ in 0..1000 {
        let n = r.gen_range(2..=6);
        let b = random_skew_symmetrizable(&mut r, n);
        let k = r.gen_range(0..n);
        assert_eq!(b.symmetrized().unwrap().mutate(k).unwrap(), b.mutate(k).unwrap().symmetrized().unwrap());
    }
}

#[test]
fn rank_two_classes() {
    for (w, t) in [(0, "A1×A1"), (1, "A2"), (2, "B2"), (3, "G2")] {
        let d = if w == 0 { Diagram::empty(2) } else { Diagram::path(&[w]) };
        let c = mutation_class(&d, 3, 100).unwrap();
        assert!(c.closed);
        assert_eq!(c.members.len(), 1);
        assert_eq!(recognize_type(&d).unwrap().to_string(), t);
    }
}

const TYPES: [&str; 9] = ["A2", "A3", "B2", "B3", "C3", "D4", "G2", "F4", "A2xA1"];

/// s_i(v) = v − (Σ_j a_ij v_j) α_i.
fn reflect(rs: &RootSystem, i: usize, v: &[i64]) -> Vec<i64> {
    let mut out = v.to_vec();
    out[i] -= (0..v.len()).map(|j| rs.cartan().get(i, j) * v[j]).sum::<i64>();
    out
}

#[test]
fn tau_involutions() {
    for t in TYPES {
        let rs = RootSystem::from_type_str(t).unwrap();
        let n = rs.rank();
        for eps in [1i8, -1] {
            for id in 0..rs.len() {
                assert_eq!(rs.tau_id(eps, rs.tau_id(eps, id)), id);
                let v = rs.root(id).clone();
                let fixed = rs.as_negative_simple(id).is_some_and(|i| rs.eps(i) == -eps);
                let want = if fixed { v.clone() } else { (0..n).filter(|&i| rs.eps(i) == eps).fold(v.clone(), |w, i| reflect(&rs, i, &w)) };
                assert_eq!(rs.tau(eps, &v), want, "{t} {eps} {v:?}");
            }
        }
    }
}

#[test]
fn compatibility_relation_is_symmetric() {
    for t in TYPES {
        let rs = RootSystem::from_type_str(t).unwrap();
        for a in 0..rs.len() {
            for b in 0..rs.len() {
                assert_eq!(rs.compatibility_degree(a, b) == 0, rs.compatibility_degree(b, a) == 0);
            }
        }
    }
}

fn connected(vs: &[usize], adj: &dyn Fn(usize, usize) -> bool) -> bool {
    if vs.is_empty() {
        return true;
    }
    let mut seen = BTreeSet::from([vs[0]]);
    let mut q = VecDeque::from([vs[0]]);
    while let Some(v) = q.pop_front() {
        for &u in vs {
            if !seen.contains(&u) && adj(u, v) {
                seen.insert(u);
                q.push_back(u);
            }
        }
    }
    seen.len() == vs.len()
}

#[test]
fn pseudomanifold() {
    for t in ["A3", "B3", "C3", "D4", "G2", "A2xA1"] {
        let rs = RootSystem::from_type_str(t).unwrap();
        let n = rs.rank();
        let cs = rs.clusters();
        let mut walls: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut faces: BTreeSet<Vec<usize>> = BTreeSet::new();
        for c in cs {
            assert_eq!(c.len(), n);
            let rows: Vec<Vec<i64>> = c.iter().map(|&r| rs.root(r).clone()).collect();
            assert_eq!(determinant(&rows).abs(), 1, "{t} {c:?}");
            for skip in 0..n {
                let w: Vec<usize> = c.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &r)| r).collect();
                *walls.entry(w).or_insert(0) += 1;
            }
            for mask in 0u32..(1 << n) - 1 {
                faces.insert(c.iter().enumerate().filter(|&(i, _)| mask >> i & 1 == 1).map(|(_, &r)| r).collect());
            }
        }
        assert!(walls.values().all(|&k| k == 2), "{t}");
        let share = |a: usize, b: usize| cs[a].iter().filter(|r| cs[b].contains(r)).count() == n - 1;
        for f in faces {
            let star: Vec<usize> = (0..cs.len()).filter(|&i| f.iter().all(|r| cs[i].contains(r))).collect();
            assert!(connected(&star, &share), "{t}: link of {f:?}");
        }
    }
}

#[test]
fn exchange_matrices_of_clusters() {
    for t in ["A3", "B3", "C3", "D4", "G2", "B2xA1"] {
        let rs = RootSystem::from_type_str(t).unwrap();
        for e in rs.exchange_graph().edges {
            let c = rs.clusters()[e.a].clone();
            let k = c.iter().position(|&r| r == e.out).unwrap();
            let mut d = c.clone();
            d[k] = e.into;
            assert_eq!(rs.b_matrix_of_cluster(&c).mutate(k).unwrap().to_i64_rows(), rs.b_matrix_of_cluster(&d).to_i64_rows(), "{t}");
        }
        for c in rs.clusters() {
            let b = rs.b_matrix_of_cluster(c);
            let partner: Vec<usize> = c.iter().map(|&a| rs.adjacent_cluster(c, a).1).collect();
            for p in 0..c.len() {
                for q in 0..c.len() {
                    if p != q {
                        assert_eq!(b.entry(p, q) == 0, rs.compatible(partner[p], partner[q]), "{t}");
                    }
                }
            }
            for eps in [1i8, -1] {
                let tc: Vec<usize> = c.iter().map(|&a| rs.tau_id(eps, a)).collect();
                let tb = rs.b_matrix_of_cluster(&tc);
                for p in 0..c.len() {
                    for q in 0..c.len() {
                        assert_eq!(tb.entry(p, q), -b.entry(p, q), "{t}");
                    }
                }
            }
        }
    }
}

#[test]
fn laurent_in_random_clusters() {
    let mut r = rng(11);
    for t in ["A3", "B3", "D4"] {
        let rs = RootSystem::from_type_str(t).unwrap();
        let run = root_run(&rs, 10_000).unwrap();
        for _ in 0..3 {
            let s = r.gen_range(1..run.seeds.len());
            assert!(check_laurent_in_cluster(&run, s, 10_000).unwrap(), "{t} seed {s}");
        }
    }
}

fn unlabeled(edges: &[(usize, usize)], n: usize) -> UnGraph<(), ()> {
    let mut g = UnGraph::new_undirected();
    let vs: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for &(a, b) in edges {
        g.add_edge(vs[a], vs[b], ());
    }
    g
}

#[test]
fn exchange_graph_ignores_coefficients() {
    for (k, n) in [(ModelKind::A, 3), (ModelKind::B, 3), (ModelKind::C, 3), (ModelKind::D, 4)] {
        let m = PolygonModel::new(k, n).unwrap();
        let special = build_exchange_graph(&m.seed(m.snake()).unwrap(), 10_000).unwrap();
        let free = build_exchange_graph(&Seed::coefficient_free(special.seeds[0].matrix.clone()).unwrap(), 10_000).unwrap();
        let ea: Vec<(usize, usize)> = special.edges().iter().map(|e| (e.a, e.b)).collect();
        let eb: Vec<(usize, usize)> = free.edges().iter().map(|e| (e.a, e.b)).collect();
        assert!(petgraph::algo::is_isomorphic(&unlabeled(&ea, special.seeds.len()), &unlabeled(&eb, free.seeds.len())), "{k}{n}");
    }
}

fn catalan(k: u64) -> u64 {
    (0..k).fold(1, |c, i| c * 2 * (2 * i + 1) / (i + 2))
}

#[test]
fn model_coherence() {
    let mut cases: Vec<(ModelKind, usize)> = (1..=5).map(|n| (ModelKind::A, n)).collect();
    for n in 2..=4 {
        cases.push((ModelKind::B, n));
        if n >= 3 {
            cases.push((ModelKind::C, n));
        }
    }
    cases.push((ModelKind::D, 4));
    for (k, n) in cases {
        let m = PolygonModel::new(k, n).unwrap();
        let rs = m.root_system();
        let (ts, edges) = m.flip_graph().unwrap();
        let cluster = |t: &Vec<usize>| {
            let mut c: Vec<usize> = t.iter().map(|&o| m.root_of(o)).collect();
            c.sort_unstable();
            c
        };
        let ours: BTreeSet<(Vec<usize>, Vec<usize>, usize, usize)> = edges
            .iter()
            .map(|&(i, j, out, into)| {
                let (a, b, x, y) = (cluster(&ts[i]), cluster(&ts[j]), m.root_of(out), m.root_of(into));
                if a < b { (a, b, x, y) } else { (b, a, y, x) }
            })
            .collect();
        let g = rs.exchange_graph();
        let theirs: BTreeSet<(Vec<usize>, Vec<usize>, usize, usize)> = g
            .edges
            .iter()
            .map(|e| {
                let (a, b) = (g.clusters[e.a].clone(), g.clusters[e.b].clone());
                if a < b { (a, b, e.out, e.into) } else { (b, a, e.into, e.out) }
            })
            .collect();
        assert_eq!(ours, theirs, "{k}{n}");
        if k == ModelKind::A {
            assert_eq!(ts.len() as u64, catalan(n as u64 + 1));
        }
        assert!(m.check_mutation_rule().unwrap() > 0);
    }
    assert_eq!(PolygonModel::new(ModelKind::A, 2).unwrap().triangulations().unwrap().len(), 5);
}
