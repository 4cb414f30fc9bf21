//! Acceptance suite. Prints one PASS/FAIL line per criterion and fails if any criterion fails.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polylift_core::circulation::{
    find_circulation, hoffman_feasible_flow, hoffman_feasible_subsets, CapacityBounds, HoffmanVerdict,
};
use polylift_core::descriptions::{
    blossom_system, edge_polytope_system, qxy_system, qxyz_system, small_clique_system, vande_vate_system,
    InequalitySystem,
};
use polylift_core::exactnum::affine_dimension;
use polylift_core::families::{enum_edge_vertices, enum_matchings, enum_path_sets, enum_small_cliques, VRep};
use polylift_core::graphcore::bipartite_count;
use polylift_core::lifting::{
    check_section_enforcing, Lifting, MatchingLifting, OrbisackLifting, PathSetLifting, SectionFailure,
    SmallCliqueLifting,
};
use polylift_core::orbisack::{
    enum_feasible_tau, enum_orbisack_vertices, first_violation, lift_y, lifted_xy_vertices, lifted_xyz_vertices,
    orbisack_system, separate_block, separate_block_brute, OrbMatrix,
};
use polylift_core::verify::{check_completeness_with_cap, classify_constraints, dd_vertices_with_cap, ConstraintClass};
use polylift_core::{Digraph, ExtendedRational, Graph, Rational};

const CAP: usize = 24;

type Criterion = (&'static str, fn() -> String);

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize, density: f64) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(density) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges).unwrap()
}

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// One representative per isomorphism class of graphs on `n` nodes.
fn nonisomorphic_graphs(n: usize) -> Vec<Graph> {
    let all = pairs(n);
    let index = |u: usize, v: usize| all.iter().position(|&e| e == (u.min(v), u.max(v))).unwrap();
    let perms = permutations(n);
    let images: Vec<Vec<usize>> = perms.iter().map(|p| all.iter().map(|&(u, v)| index(p[u], p[v])).collect()).collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u32..1 << all.len() {
        let canon = images
            .iter()
            .map(|img| (0..all.len()).filter(|&e| mask >> e & 1 == 1).map(|e| 1u32 << img[e]).sum::<u32>())
            .min()
            .unwrap();
        if seen.insert(canon) {
            let edges = (0..all.len()).filter(|&e| mask >> e & 1 == 1).map(|e| all[e]);
            out.push(Graph::new(n, edges).unwrap());
        }
    }
    out
}

fn assert_complete(sys: &InequalitySystem, v: &VRep, what: &str) {
    let r = check_completeness_with_cap(sys, v, CAP).unwrap_or_else(|e| panic!("{what}: {e}"));
    assert!(r.is_complete(), "{what}: {r:?}");
}

/// Isolated node 0, triangle {1,2,3}, isolated edge {4,5}.
fn counterexample_graph() -> Graph {
    Graph::new(6, [(1, 2), (1, 3), (2, 3), (4, 5)]).unwrap()
}

fn c1_matching() -> String {
    let mut count = 0;
    for n in 1..=5 {
        for g in nonisomorphic_graphs(n) {
            assert_complete(&blossom_system(&g).unwrap(), &enum_matchings(&g).unwrap(), &format!("{g:?}"));
            count += 1;
        }
    }
    let mut r = rng(1);
    for _ in 0..100 {
        let n = r.gen_range(6..=7);
        let density = r.gen_range(0.3..0.8);
        let g = random_graph(&mut r, n, density);
        assert_complete(&blossom_system(&g).unwrap(), &enum_matchings(&g).unwrap(), &format!("{g:?}"));
    }
    format!("{count} non-isomorphic graphs on <=5 nodes, 100 random on 6-7 nodes")
}

/// A DAG on `n` nodes with source 0, arcs following a random topological order.
fn random_dag(rng: &mut ChaCha8Rng, n: usize) -> (Digraph, usize, usize) {
    let mut order: Vec<usize> = (1..n).collect();
    order.shuffle(rng);
    order.insert(0, 0);
    let mut arcs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(0.5) {
                arcs.push((order[i], order[j]));
            }
        }
    }
    let t = rng.gen_range(1..n);
    (Digraph::new(n, arcs).unwrap(), 0, t)
}

fn c2_paths() -> String {
    let mut r = rng(2);
    let mut nonempty = 0;
    for k in 0..600 {
        let n = if k < 500 { r.gen_range(2..=5) } else { r.gen_range(6..=7) };
        let (d, s, t) = random_dag(&mut r, n);
        let v = enum_path_sets(&d, s, t).unwrap();
        nonempty += usize::from(!v.is_empty());
        assert_complete(&vande_vate_system(&d, s, t).unwrap(), &v, &format!("{d:?} s={s} t={t}"));
    }
    format!("500 sampled DAGs on <=5 nodes, 100 on 6-7 nodes ({nonempty} with an s-t path)")
}

fn classes(sys: &InequalitySystem, v: &VRep) -> Vec<ConstraintClass> {
    classify_constraints(sys, v).unwrap()
}

fn c3_small_clique() -> String {
    let mut r = rng(3);
    let mut graphs = vec![counterexample_graph()];
    while graphs.len() < 300 {
        let n = r.gen_range(1..=6);
        let density = r.gen_range(0.1..0.9);
        graphs.push(random_graph(&mut r, n, density));
    }
    let mut filtered = 0;
    for g in &graphs {
        let v = enum_small_cliques(g);
        let full = small_clique_system(g, false).unwrap();
        let irr = small_clique_system(g, true).unwrap();
        assert_complete(&full, &v, &format!("full {g:?}"));
        assert_complete(&irr, &v, &format!("irredundant {g:?}"));
        assert!(classes(&irr, &v).iter().all(|&c| c == ConstraintClass::Facet), "{g:?}");
        let kept: BTreeSet<&str> = irr.constraints.iter().map(|c| c.tag.as_str()).collect();
        for (c, class) in full.constraints.iter().zip(classes(&full, &v)) {
            if !kept.contains(c.tag.as_str()) {
                assert_ne!(class, ConstraintClass::Facet, "{g:?} {}", c.tag);
                filtered += 1;
            }
        }
    }
    let g = counterexample_graph();
    let full = small_clique_system(&g, false).unwrap();
    let i = full.constraints.iter().position(|c| c.tag == "stable T={0}").unwrap();
    assert_ne!(classes(&full, &enum_small_cliques(&g))[i], ConstraintClass::Facet);
    format!("300 graphs on <=6 nodes, {filtered} filtered constraints non-facet, counterexample non-facet")
}

fn c4_edge_polytope() -> String {
    let mut r = rng(4);
    let mut graphs = vec![
        counterexample_graph(),
        Graph::new(5, [(0, 1), (2, 3)]).unwrap(),
        Graph::new(6, [(0, 1), (1, 2), (3, 4)]).unwrap(),
        Graph::complete(2),
    ];
    while graphs.len() < 300 {
        let n = r.gen_range(2..=6);
        let density = r.gen_range(0.15..0.9);
        let g = random_graph(&mut r, n, density);
        if g.edge_count() > 0 {
            graphs.push(g);
        }
    }
    let (mut isolated, mut multi) = (0, 0);
    for g in &graphs {
        isolated += usize::from(!g.isolated_nodes().is_empty());
        multi += usize::from(bipartite_count(g) - g.isolated_nodes().len() >= 2);
        let v = enum_edge_vertices(g);
        let sys = edge_polytope_system(g).unwrap();
        assert_complete(&sys, &v, &format!("{g:?}"));
        assert!(classes(&sys, &v).iter().all(|&c| c != ConstraintClass::Redundant), "{g:?}");
    }
    format!("300 graphs on <=6 nodes ({isolated} with isolated nodes, {multi} with >=2 bipartite components)")
}

fn c5_orbisack() -> String {
    for p in 1..=5u32 {
        let v = enum_orbisack_vertices(p as usize).unwrap();
        assert_eq!(v.len(), (1usize << (p - 1)) * ((1 << p) + 1), "p={p}");
        assert_eq!(enum_feasible_tau(p as usize).unwrap().len(), 1 + (3usize.pow(p - 1) - 1) / 2, "p={p}");
        let sys = orbisack_system(p as usize, false).unwrap();
        assert_complete(&sys, &v, &format!("p={p}"));
        let redundant: Vec<&str> = sys
            .constraints
            .iter()
            .zip(classes(&sys, &v))
            .filter(|(_, k)| *k == ConstraintClass::Redundant)
            .map(|(c, _)| c.tag.as_str())
            .collect();
        assert_eq!(redundant, ["lower x_1_1", "upper x_1_2"], "p={p}");
    }
    "p=1..5 vertex and block counts, completeness, exactly two redundant bounds".into()
}

fn c6_extended() -> String {
    for p in 1..=4 {
        for (sys, lifted) in [
            (qxyz_system(p).unwrap(), lifted_xyz_vertices(p).unwrap()),
            (qxy_system(p).unwrap(), lifted_xy_vertices(p).unwrap()),
        ] {
            let dd = dd_vertices_with_cap(&sys, CAP).unwrap();
            assert_eq!(dd, lifted, "p={p}");
            assert!(dd.points().iter().flatten().all(Rational::is_integer), "p={p}");
        }
    }
    "p=1..4, both extended systems have exactly the lifted integral vertices".into()
}

fn c7_separation() -> String {
    let mut r = rng(7);
    let mut violated = 0;
    for _ in 0..10_000 {
        let p = r.gen_range(2..=6);
        let flat: Vec<Rational> = (0..2 * p)
            .map(|_| {
                let d = r.gen_range(1..=16);
                Rational::new(r.gen_range(0..=d), d).unwrap()
            })
            .collect();
        let x = OrbMatrix::from_flat(&flat).unwrap();
        let fast = separate_block(&x).unwrap();
        let brute = separate_block_brute(&x).unwrap();
        assert_eq!(fast.is_some(), brute.is_some(), "{x}");
        if let Some(b) = fast {
            violated += 1;
            assert!(b.is_violated_by(&x), "{x}");
            let lift = lift_y(&x).unwrap();
            let i_star = first_violation(&x, &lift.y).unwrap();
            let prefix: Rational = lift.y[..i_star - 1].iter().sum();
            assert_eq!(&b.beta - &b.lhs(&x), &(x.get(i_star, 1) - x.get(i_star, 2)) + &prefix, "{x}");
        }
    }
    format!("10000 points with p=2..6, {violated} separated, all agree with brute force")
}

fn random_bound(r: &mut ChaCha8Rng) -> (ExtendedRational, ExtendedRational) {
    let d = r.gen_range(1..=4);
    let lo = Rational::new(r.gen_range(-6..=6), d).unwrap();
    let hi = &lo + &Rational::new(r.gen_range(0..=8), d).unwrap();
    match r.gen_range(0..10) {
        0 => (ExtendedRational::NegInf, hi.into()),
        1 => (lo.into(), ExtendedRational::PosInf),
        2 => (ExtendedRational::NegInf, ExtendedRational::PosInf),
        _ => (lo.into(), hi.into()),
    }
}

fn c8_hoffman() -> String {
    let mut r = rng(8);
    let mut feasible = 0;
    for _ in 0..1000 {
        let n = r.gen_range(2..=10);
        let density = r.gen_range(0.1..0.5);
        let arcs: Vec<(usize, usize)> =
            (0..n).flat_map(|u| (0..n).map(move |v| (u, v))).filter(|&(u, v)| u != v).collect();
        let arcs: Vec<(usize, usize)> = arcs.into_iter().filter(|_| r.gen_bool(density)).collect();
        let (lower, upper) = (0..arcs.len()).map(|_| random_bound(&mut r)).unzip();
        let d = Digraph::new(n, arcs).unwrap();
        let cb = CapacityBounds::new(lower, upper).unwrap();
        let subsets = hoffman_feasible_subsets(&d, &cb).unwrap();
        let flow = hoffman_feasible_flow(&d, &cb).unwrap();
        assert_eq!(subsets.is_feasible(), flow.is_feasible());
        if let HoffmanVerdict::Infeasible { witness } = &flow {
            assert!(polylift_core::circulation::violates_hoffman(&d, &cb, witness).unwrap());
        }
        match find_circulation(&d, &cb).unwrap() {
            Some(c) => {
                assert!(subsets.is_feasible() && c.is_valid(&d, &cb));
                feasible += 1;
            }
            None => assert!(!subsets.is_feasible()),
        }
    }
    format!("1000 instances on <=10 nodes, {feasible} feasible, oracles agree")
}

fn enforced(l: &dyn Lifting, sys: &InequalitySystem, what: &str) -> usize {
    let report = check_section_enforcing(l, sys, 100, 9).unwrap();
    assert!(report.passed(), "{what}: {:?}", report.counterexample);
    report.checked
}

fn c9_sections() -> String {
    let mut checked = 0;
    for g in [Graph::complete(3), Graph::complete(4), Graph::new(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap()]
    {
        checked += enforced(&MatchingLifting::new(g.clone()).unwrap(), &blossom_system(&g).unwrap(), "matching");
    }
    for (d, s, t) in [
        (Digraph::new(4, [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]).unwrap(), 0, 3),
        (Digraph::new(5, [(0, 1), (0, 2), (1, 3), (2, 3), (3, 4), (1, 4)]).unwrap(), 0, 4),
    ] {
        let l = PathSetLifting::new(d.clone(), s, t).unwrap();
        checked += enforced(&l, &vande_vate_system(&d, s, t).unwrap(), "pathset");
    }
    for g in
        [counterexample_graph(), Graph::complete(4), Graph::new(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap()]
    {
        let l = SmallCliqueLifting::new(g.clone());
        checked += enforced(&l, &small_clique_system(&g, true).unwrap(), "smallclique");
    }
    for p in 1..=3 {
        checked += enforced(&OrbisackLifting::new(p).unwrap(), &orbisack_system(p, false).unwrap(), "orbisack");
    }

    let k3 = Graph::complete(3);
    let no_odd = blossom_system(&k3).unwrap().without_tag_prefix("odd-set");
    let report = check_section_enforcing(&MatchingLifting::new(k3).unwrap(), &no_odd, 0, 0).unwrap();
    let half = Rational::new(1, 2).unwrap();
    let ce = report.counterexample.expect("K3 without odd-set constraints must fail");
    assert_eq!(ce.point, vec![half.clone(); 3]);
    assert!(matches!(ce.failure, SectionFailure::NotInExtension(_)));

    let no_blocks = orbisack_system(2, false).unwrap().without_tag_prefix("block");
    let report = check_section_enforcing(&OrbisackLifting::new(2).unwrap(), &no_blocks, 0, 0).unwrap();
    let ce = report.counterexample.expect("p=2 without block inequalities must fail");
    let fmt: Vec<String> = ce.point.iter().map(ToString::to_string).collect();
    format!("{checked} points lifted on 11 fixtures; counterexamples K3 (1/2,1/2,1/2), p=2 ({})", fmt.join(","))
}

fn c10_dimensions() -> String {
    let mut r = rng(10);
    for _ in 0..200 {
        let n = r.gen_range(1..=8);
        let density = r.gen_range(0.1..0.9);
        let g = random_graph(&mut r, n, density);
        let small = enum_small_cliques(&g);
        assert_eq!(affine_dimension(small.points()).unwrap(), n as isize, "{g:?}");
        let edge = enum_edge_vertices(&g);
        assert_eq!(affine_dimension(edge.points()).unwrap(), n as isize - bipartite_count(&g) as isize - 1, "{g:?}");
    }
    "200 random graphs on <=8 nodes".into()
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("matching completeness", c1_matching),
        ("path-set completeness", c2_paths),
        ("small-clique completeness and irredundancy", c3_small_clique),
        ("edge-polytope completeness, no redundancy", c4_edge_polytope),
        ("orbisack description", c5_orbisack),
        ("extended orbisack systems integral", c6_extended),
        ("separation oracle vs brute force", c7_separation),
        ("Hoffman subset vs flow", c8_hoffman),
        ("section enforcement", c9_sections),
        ("dimension formulas", c10_dimensions),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail} [{secs:.1}s]", i + 1),
            Err(e) => {
                failed += 1;
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("criterion {:>2} FAIL {name}: {msg} [{secs:.1}s]", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
