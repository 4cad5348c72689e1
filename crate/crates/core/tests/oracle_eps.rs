mod common;

use std::collections::HashMap;

use num_rational::Ratio;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{floyd, random_graph, subsets_upto};
use vsdo::expath::{segment, ExpathSolver, GeometricScale};
use vsdo::graph::shortest_path;
use vsdo::hierarchy::HierarchyPath;
use vsdo::oracle_eps::EpsParams;
use vsdo::{EpsConfig, EpsOracle, Mode, Vertex, Weight, WeightedGraph, INF};

fn r(p: u128, q: u128) -> Ratio<u128> {
    Ratio::new(p, q)
}

fn config(d: usize, eps: Ratio<u128>, mode: Mode, threshold: Option<u64>) -> EpsConfig {
    let mut c = EpsConfig::new(d, eps, mode);
    c.threshold = threshold;
    c
}

struct Exact<'a> {
    g: &'a WeightedGraph,
    cache: HashMap<Vec<Vertex>, Vec<Vec<Weight>>>,
}

impl<'a> Exact<'a> {
    fn new(g: &'a WeightedGraph) -> Self {
        Self { g, cache: HashMap::new() }
    }

    fn dist(&mut self, d: &[Vertex], u: Vertex, v: Vertex) -> Weight {
        let mut key = d.to_vec();
        key.sort_unstable();
        let g = self.g;
        self.cache.entry(key.clone()).or_insert_with(|| floyd(g, &key))[u as usize][v as usize]
    }
}

fn check_answer(o: &EpsOracle, exact: &mut Exact, u: Vertex, v: Vertex, d: &[Vertex]) {
    let want = exact.dist(d, u, v);
    let ans = o.query_with_path(u, v, d).unwrap();
    if want == INF {
        assert_eq!(ans.estimate, INF);
        assert!(ans.path.is_none());
        return;
    }
    assert!(ans.estimate >= want, "{u}->{v} D={d:?}: {} < {want}", ans.estimate);
    assert!(o.params.within_stretch(ans.estimate, want), "{u}->{v} D={d:?}: {} vs {want}", ans.estimate);
    let p = ans.path.unwrap();
    assert_eq!(p.vertices.first(), Some(&u));
    assert_eq!(p.vertices.last(), Some(&v));
    assert_eq!(p.weigh(&o.graph), Some(ans.estimate));
    assert!(p.vertices.iter().all(|x| !d.contains(x)));
    assert!(ans.h_size as u128 <= o.params.hbound);
}

fn all_vertices(n: usize) -> Vec<Vertex> {
    (0..n as Vertex).collect()
}

#[test]
fn sandwich_exhaustive_small() {
    let g = random_graph(11, 9, 20, 42);
    let mut exact = Exact::new(&g);
    for mode in Mode::ALL {
        let o = EpsOracle::build(g.clone(), &config(2, r(1, 2), mode, None)).unwrap();
        for d in subsets_upto(&all_vertices(11), 2) {
            for u in 0..11 {
                for v in 0..11 {
                    if d.contains(&u) || d.contains(&v) {
                        continue;
                    }
                    check_answer(&o, &mut exact, u, v, &d);
                }
            }
        }
    }
}

#[test]
fn sandwich_exhaustive_multi_level() {
    let g = random_graph(16, 10, 30, 7);
    let mut exact = Exact::new(&g);
    for (mode, eps) in [(Mode::Explicit, r(1, 4)), (Mode::Expath, r(1, 1)), (Mode::Bipath, r(1, 2))] {
        let o = EpsOracle::build(g.clone(), &config(2, eps, mode, Some(3))).unwrap();
        assert!(o.hierarchy.len() > 1);
        let pairs: Vec<(Vertex, Vertex)> = (0..16).flat_map(|u| [(u, (u * 7 + 3) % 16), (u, 15 - u)]).collect();
        for d in subsets_upto(&all_vertices(16), 2) {
            for &(u, v) in &pairs {
                if !d.contains(&u) && !d.contains(&v) {
                    check_answer(&o, &mut exact, u, v, &d);
                }
            }
        }
    }
}

#[test]
fn sandwich_sampled_larger() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (n, d, threshold) in [(60, 2, None), (40, 3, Some(4))] {
        let g = random_graph(n, n, 50, n as u64);
        let mut exact = Exact::new(&g);
        for mode in Mode::ALL {
            for eps in [r(1, 1), r(1, 4)] {
                let o = EpsOracle::build(g.clone(), &config(d, eps, mode, threshold)).unwrap();
                for _ in 0..60 {
                    let u = rng.random_range(0..n as Vertex);
                    let v = rng.random_range(0..n as Vertex);
                    let fails: Vec<Vertex> = (0..d)
                        .map(|_| rng.random_range(0..n as Vertex))
                        .filter(|&f| f != u && f != v)
                        .collect();
                    check_answer(&o, &mut exact, u, v, &fails);
                }
            }
        }
    }
}

/// Every stored node holds the optimum of its kind in `G - avoid`, and children
/// extend `avoid` by the failing segment's vertices at or above the level.
fn check_forests(o: &EpsOracle) {
    let g = &o.graph;
    let scale = o.scale();
    for h in 0..o.hierarchy.len() {
        let hp = o.hierarchy_path(h);
        let lg = o.level_graphs(h);
        let forest = o.forest(h);
        let mut solver = (o.mode() != Mode::Explicit).then(|| ExpathSolver::new(g, lg, scale, o.mode().path_kind()));
        for node in &forest.nodes {
            assert!(node.depth as usize <= o.params.d);
            let (u, v) = (node.path.source, node.path.target);
            match &mut solver {
                None => {
                    let sp = shortest_path(g, &node.avoid, u, v).unwrap();
                    assert_eq!(node.path.length, sp.length);
                }
                Some(s) => {
                    let again = s.solve(&node.avoid, u, v);
                    assert_eq!(node.path.length, again.length);
                    node.path.validate(g, lg, &node.avoid, &scale).unwrap();
                }
            }
            if !node.path.is_finite() {
                assert!(node.children.is_empty());
                continue;
            }
            let walk = node.path.expand(lg).unwrap();
            assert!(walk.vertices.iter().all(|x| !node.avoid.contains(x)));
            let sp = segment(&walk, g, scale);
            for (&(seg, l), &c) in &node.children {
                let child = &forest.nodes[c as usize];
                let mut want = node.avoid.clone();
                want.extend(sp.vertices_of(seg).into_iter().filter(|&x| hp.in_u(l as usize, x)));
                want.sort_unstable();
                want.dedup();
                assert_eq!(child.avoid, want);
                assert_eq!(child.depth, node.depth + 1);
                assert!(child.path.length >= node.path.length);
            }
        }
    }
}

#[test]
fn eager_forests_hold_optimal_paths() {
    let g = random_graph(14, 8, 25, 3);
    for mode in Mode::ALL {
        let mut c = config(2, r(1, 2), mode, Some(3));
        c.eager = true;
        let o = EpsOracle::build(g.clone(), &c).unwrap();
        assert!(o.node_count() > 0);
        check_forests(&o);
    }
}

#[test]
fn lazy_forests_hold_optimal_paths() {
    let g = random_graph(30, 30, 40, 12);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for mode in Mode::ALL {
        let o = EpsOracle::build(g.clone(), &config(2, r(1, 2), mode, Some(4))).unwrap();
        for _ in 0..80 {
            let (u, v) = (rng.random_range(0..30), rng.random_range(0..30));
            let d: Vec<Vertex> = (0..2).map(|_| rng.random_range(0..30)).filter(|&f| f != u && f != v).collect();
            o.query(u, v, &d).unwrap();
        }
        check_forests(&o);
    }
}

#[test]
fn lazy_and_eager_agree() {
    let g = random_graph(16, 12, 30, 21);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for mode in Mode::ALL {
        let lazy = EpsOracle::build(g.clone(), &config(2, r(1, 2), mode, Some(3))).unwrap();
        let mut c = config(2, r(1, 2), mode, Some(3));
        c.eager = true;
        let eager = EpsOracle::build(g.clone(), &c).unwrap();
        for _ in 0..120 {
            let (u, v) = (rng.random_range(0..16), rng.random_range(0..16));
            let d: Vec<Vertex> = (0..2).map(|_| rng.random_range(0..16)).filter(|&f| f != u && f != v).collect();
            let (a, b) = (lazy.query_with_path(u, v, &d).unwrap(), eager.query_with_path(u, v, &d).unwrap());
            assert_eq!((a.estimate, a.path), (b.estimate, b.path));
        }
    }
}

#[test]
fn dec_tree_bounds_and_monotonicity() {
    let g = random_graph(30, 25, 40, 5);
    let mut exact = Exact::new(&g);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for mode in Mode::ALL {
        let o = EpsOracle::build(g.clone(), &config(2, r(1, 2), mode, Some(4))).unwrap();
        for _ in 0..150 {
            let (u, v) = (rng.random_range(0..30), rng.random_range(0..30));
            if u == v {
                continue;
            }
            let d: Vec<Vertex> = (0..2).map(|_| rng.random_range(0..30)).filter(|&f| f != u && f != v).collect();
            let (w, h) = o.dec_tree(u, v, &d).unwrap();
            assert!(w >= exact.dist(&d, u, v));
            let (w0, _) = o.dec_tree(u, v, &[]).unwrap();
            assert_eq!(w0, exact.dist(&[], u, v));
            assert!(w >= w0);
            if w != INF {
                let p = o.node_path(h).unwrap();
                assert_eq!(p.length, w);
                assert!(p.vertices.iter().all(|x| !d.contains(x)));
            }
            // failures off the root path leave the root answer in place
            let root = shortest_path(&g, &[], u, v).unwrap();
            let off: Vec<Vertex> = d.iter().copied().filter(|f| !root.vertices.contains(f)).collect();
            if mode == Mode::Explicit {
                assert_eq!(o.dec_tree(u, v, &off).unwrap().0, w0);
            }
        }
    }
}

/// `N(f)` recomputed from the trees of the chosen hierarchy path.
fn neighbourhood(o: &EpsOracle, hp: &HierarchyPath, d: &[Vertex]) -> Vec<Vertex> {
    let mut out = Vec::new();
    for (_, t) in hp.trees(&o.hierarchy) {
        for &f in d {
            let Some(i) = t.local(f) else { continue };
            if let Some(p) = t.parent_of(i) {
                out.push(t.verts[p]);
            }
            for c in 0..t.len() {
                if t.parent_of(c) == Some(i) && t.trunk[c] {
                    out.push(t.verts[c]);
                }
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out.retain(|x| !d.contains(x));
    out
}

#[test]
fn aux_vertices_follow_definition_and_bound() {
    for (n, threshold) in [(20, Some(3)), (40, None), (30, Some(4))] {
        let g = random_graph(n, n / 2, 30, n as u64 + 1);
        let o = EpsOracle::build(g.clone(), &config(2, r(1, 2), Mode::Explicit, threshold)).unwrap();
        for d in subsets_upto(&all_vertices(n), 2).into_iter().step_by(3) {
            let (u, v) = ((0..n as Vertex).find(|x| !d.contains(x)).unwrap(), (0..n as Vertex).rev().find(|x| !d.contains(x)).unwrap());
            let vh = o.aux_vertices(u, v, &d).unwrap();
            assert!(vh.len() as u128 <= o.params.hbound);
            assert_eq!(&vh[..2], &[u, v]);
            let hp = o.hierarchy.find_path(&d).unwrap();
            let mut want = neighbourhood(&o, &hp, &d);
            want.retain(|&x| x != u && x != v);
            assert_eq!(&vh[2..], &want[..]);
            if d.is_empty() {
                assert_eq!(vh.len(), 2);
                let h = o.aux_graph(u, v, &d).unwrap();
                assert_eq!(h.weights[1], shortest_path(&g, &[], u, v).unwrap().length);
            }
        }
    }
}

#[test]
fn non_trunk_leaf_failure_contributes_only_parents() {
    let g = random_graph(24, 10, 20, 8);
    let o = EpsOracle::build(g, &config(2, r(1, 2), Mode::Explicit, Some(3))).unwrap();
    let hp = o.hierarchy.find_path(&[]).unwrap();
    for f in 0..24 {
        let trees: Vec<_> = hp.trees(&o.hierarchy).filter(|(_, t)| t.contains(f)).collect();
        let isolated = trees.iter().all(|(_, t)| {
            let i = t.local(f).unwrap();
            t.size[i] == 1 && !t.trunk[i]
        });
        if !isolated || trees.is_empty() {
            continue;
        }
        let hp_f = o.hierarchy.find_path(&[f]).unwrap();
        let mut parents: Vec<Vertex> = hp_f
            .trees(&o.hierarchy)
            .filter_map(|(_, t)| t.local(f).and_then(|i| t.parent_of(i)).map(|p| t.verts[p]))
            .collect();
        parents.sort_unstable();
        parents.dedup();
        assert_eq!(neighbourhood(&o, &hp_f, &[f]), parents);
    }
}

/// For a failure `f` and a vertex `x` of level at least `l(f)`, some vertex of
/// `V(H)` is within `(2k-1)` times the failure-free-interior `x`-`f` distance.
#[test]
fn ball_bound_holds() {
    let mut checked = 0;
    for seed in 0..4 {
        let n = 22;
        let g = random_graph(n, 12, 30, seed + 50);
        let o = EpsOracle::build(g.clone(), &config(2, r(1, 2), Mode::Explicit, Some(3))).unwrap();
        let k = o.params.k as Weight;
        for d in subsets_upto(&all_vertices(n), 2) {
            if d.is_empty() {
                continue;
            }
            let hp = o.hierarchy.find_path(&d).unwrap();
            let nb = neighbourhood(&o, &hp, &d);
            let in_gd = floyd(&g, &d);
            for &f in &d {
                let others: Vec<Vertex> = d.iter().copied().filter(|&y| y != f).collect();
                let reach = floyd(&g, &others);
                for x in 0..n as Vertex {
                    if d.contains(&x) || hp.level(x) < hp.level(f) || reach[x as usize][f as usize] == INF {
                        continue;
                    }
                    let bound = (2 * k - 1) * reach[x as usize][f as usize];
                    let best = nb.iter().map(|&w| in_gd[x as usize][w as usize]).min().unwrap_or(INF);
                    assert!(best <= bound, "x={x} f={f} D={d:?}: {best} > {bound}");
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 1000);
}

/// `dist·q ≤ p·bound` with `ε = p/q`.
fn le_scaled(dist: Weight, eps: Ratio<u128>, bound: Weight) -> bool {
    dist as u128 * eps.denom() <= eps.numer() * bound as u128
}

fn is_far(p: &[Vertex], prefix: &[Weight], vh: &[Vertex], gd: &[Vec<Weight>], eps: Ratio<u128>) -> bool {
    let total = *prefix.last().unwrap();
    for i in 1..p.len() - 1 {
        let near = prefix[i].min(total - prefix[i]);
        if vh.iter().any(|&w| le_scaled(gd[p[i] as usize][w as usize], eps, near)) {
            return false;
        }
    }
    true
}

fn is_level_shortest(g: &WeightedGraph, hp: &HierarchyPath, seq: &[Vertex], span: Weight) -> bool {
    if seq.len() == 1 {
        return true;
    }
    let lg = hp.level_graphs(g);
    (1..=hp.p()).any(|l| {
        seq.iter().all(|&x| hp.level(x) as usize <= l) && lg.get(l as u8).dist(seq[0], *seq.last().unwrap()) == span
    })
}

fn prefix_of(g: &WeightedGraph, p: &[Vertex]) -> Vec<Weight> {
    let mut out = vec![0];
    for e in p.windows(2) {
        out.push(out.last().unwrap() + g.weight(e[0], e[1]).unwrap());
    }
    out
}

/// Far-away shortest paths between `V(H)` vertices are segment expaths, and
/// far-away two-leg paths are segment bipaths.
#[test]
fn structural_bounds_on_small_instances() {
    let (mut far_paths, mut far_bipaths) = (0, 0);
    for seed in 0..3 {
        let n = 18;
        let g = random_graph(n, 10, 1000, seed + 70);
        let o = EpsOracle::build(g.clone(), &config(2, r(1, 2), Mode::Explicit, Some(3))).unwrap();
        let k = o.params.k as u128;
        for eps3 in [r(1, 1), r(1, 2), r(1, 8)] {
            let eps4 = eps3 / (4 * k - 2);
            let scale = GeometricScale::new(*eps4.numer(), *eps4.denom());
            for d in subsets_upto(&all_vertices(n), 2).into_iter().filter(|d| !d.is_empty()).step_by(5) {
                let hp = o.hierarchy.find_path(&d).unwrap();
                let gd = floyd(&g, &d);
                let mut vh = neighbourhood(&o, &hp, &d);
                let candidates = vh.clone();
                for &u in &candidates {
                    for &v in &candidates {
                        if u >= v || gd[u as usize][v as usize] == INF {
                            continue;
                        }
                        vh.clear();
                        vh.extend(candidates.iter().copied());
                        let p = shortest_path(&g, &d, u, v).unwrap();
                        let prefix = prefix_of(&g, &p.vertices);
                        if !is_far(&p.vertices, &prefix, &vh, &gd, eps3) {
                            continue;
                        }
                        far_paths += 1;
                        let sp = segment(&p, &g, scale);
                        for seg in sp.segments() {
                            let seq = &p.vertices[seg.clone()];
                            assert!(is_level_shortest(&g, &hp, seq, sp.span(&seg)), "segment {seq:?} of {u}->{v} D={d:?}");
                        }
                    }
                }
            }
            // two-leg version with ε₁ and ε₅ = ε₁/(4k-2)
            let eps1 = eps3;
            let eps5 = eps1 / (4 * k - 2);
            let scale5 = GeometricScale::new(*eps5.numer(), *eps5.denom());
            for d in subsets_upto(&all_vertices(n), 2).into_iter().filter(|d| !d.is_empty()).step_by(7) {
                let hp = o.hierarchy.find_path(&d).unwrap();
                let gd = floyd(&g, &d);
                let vh = neighbourhood(&o, &hp, &d);
                let free: Vec<Vertex> = (0..n as Vertex).filter(|x| !d.contains(x)).collect();
                for (i, &u) in free.iter().enumerate().step_by(2) {
                    let v = free[(i + 3) % free.len()];
                    let w = free[(i + 7) % free.len()];
                    if gd[u as usize][v as usize] == INF || gd[v as usize][w as usize] == INF || u == v || v == w {
                        continue;
                    }
                    let mut p = shortest_path(&g, &d, u, v).unwrap();
                    p.extend(&shortest_path(&g, &d, v, w).unwrap());
                    if !p.is_simple() {
                        continue;
                    }
                    let prefix = prefix_of(&g, &p.vertices);
                    if !is_far(&p.vertices, &prefix, &vh, &gd, eps1) {
                        continue;
                    }
                    far_bipaths += 1;
                    let sp = segment(&p, &g, scale5);
                    for seg in sp.segments() {
                        let seq = &p.vertices[seg.clone()];
                        let pre = &prefix[seg.clone()];
                        let ok = (0..seq.len()).any(|r| {
                            is_level_shortest(&g, &hp, &seq[..=r], pre[r] - pre[0])
                                && is_level_shortest(&g, &hp, &seq[r..], pre[seq.len() - 1] - pre[r])
                        });
                        assert!(ok, "bipath segment {seq:?} D={d:?}");
                    }
                }
            }
        }
    }
    assert!(far_paths > 0 && far_bipaths > 0, "{far_paths} {far_bipaths}");
}

#[test]
fn trivial_queries() {
    let g = random_graph(15, 10, 9, 1);
    let o = EpsOracle::build(g.clone(), &config(2, r(1, 2), Mode::Expath, None)).unwrap();
    assert_eq!(o.query(4, 4, &[1, 2]).unwrap(), 0);
    for u in 0..15 {
        for v in 0..15 {
            assert_eq!(o.query(u, v, &[]).unwrap(), shortest_path(&g, &[], u, v).unwrap().length);
        }
    }
}

#[test]
fn disconnected_pairs_are_infinite() {
    let g = WeightedGraph::new(7, vec![(0, 1, 2), (1, 2, 2), (2, 3, 1), (4, 5, 1), (5, 6, 1)]).unwrap();
    for mode in Mode::ALL {
        let mut c = config(1, r(1, 2), mode, None);
        c.eager = true;
        let o = EpsOracle::build(g.clone(), &c).unwrap();
        assert_eq!(o.query(0, 5, &[]).unwrap(), INF);
        assert_eq!(o.query(0, 3, &[1]).unwrap(), INF);
        assert_eq!(o.query(0, 3, &[4]).unwrap(), 5);
        let (w, _) = o.dec_tree(0, 6, &[]).unwrap();
        assert_eq!(w, INF);
    }
}

#[test]
fn invalid_queries_and_configs() {
    let g = random_graph(12, 6, 9, 2);
    let o = EpsOracle::build(g.clone(), &config(2, r(1, 2), Mode::Explicit, None)).unwrap();
    assert!(o.query(0, 1, &[0]).is_err());
    assert!(o.query(0, 1, &[2, 3, 4]).is_err());
    assert!(o.query(0, 99, &[]).is_err());
    assert!(o.query(0, 1, &[77]).is_err());
    assert!(EpsOracle::build(g.clone(), &config(2, r(3, 2), Mode::Explicit, None)).is_err());
    assert!(EpsOracle::build(g.clone(), &config(2, r(0, 1), Mode::Explicit, None)).is_err());
    let mut c = config(2, r(1, 2), Mode::Explicit, None);
    c.eager = true;
    c.mem_budget = Some(1000);
    assert!(matches!(EpsOracle::build(g, &c), Err(vsdo::Error::Budget(_))));
}

#[test]
fn derived_parameters() {
    let cover = vsdo::tree_cover::CoverParams::new(100, 2, 1).unwrap();
    let p = EpsParams::new(r(1, 2), Mode::Bipath, &cover, 3).unwrap();
    let k = cover.k as u128;
    assert_eq!(p.eps1, r(1, 5));
    assert_eq!(p.eps2, r(1, 5) / (2 * k - 1));
    let hb = 2 * 3 * cover.trees_per_vertex() as u128 * (cover.s as u128 + 1) + 2;
    assert_eq!(p.hbound, hb);
    assert_eq!(p.eps3, r(1, 2) / (2 * hb));
    assert_eq!(p.eps4, p.eps3 / (4 * k - 2));
    assert_eq!(p.eps5, p.eps1 / (4 * k - 2));
    assert!(p.within_stretch(15, 10) && !p.within_stretch(16, 10));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn sandwich_on_random_graphs(n in 5usize..14, extra in 0usize..10, seed in 0u64..10_000, mode_i in 0usize..3, s in 3u64..6) {
        let g = random_graph(n, extra, 15, seed);
        let mode = Mode::ALL[mode_i];
        let o = EpsOracle::build(g.clone(), &config(2, r(1, 3), mode, Some(s))).unwrap();
        let mut exact = Exact::new(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..40 {
            let (u, v) = (rng.random_range(0..n as Vertex), rng.random_range(0..n as Vertex));
            let d: Vec<Vertex> = (0..2).map(|_| rng.random_range(0..n as Vertex)).filter(|&f| f != u && f != v).collect();
            check_answer(&o, &mut exact, u, v, &d);
        }
    }
}
