mod common;

use common::floyd;
use num_rational::Ratio;
use proptest::prelude::*;

use vsdo::graph::shortest_path;
use vsdo::harness::{
    brute_force, evaluate, format_queries, generate, parse_queries, path_queries, random_queries, verify, AnyOracle,
    GenSpec, GraphKind, QueryRecord, MAGIC, SCHEMA_VERSION, VERSION,
};
use vsdo::reductions::ScaledGraphFamily;
use vsdo::{EpsConfig, EpsOracle, Error, Mode, PolyConfig, PolyOracle, Vertex, Weight, WeightedGraph, INF};

fn graph(kind: GraphKind, n: usize, seed: u64, w: Weight) -> WeightedGraph {
    generate(&GenSpec::new(kind, n, seed, w)).unwrap()
}

fn eps_config(mode: Mode) -> EpsConfig {
    EpsConfig::new(2, Ratio::new(1, 2), mode)
}

fn all_oracles(g: &WeightedGraph) -> Vec<AnyOracle> {
    let mut out: Vec<AnyOracle> =
        Mode::ALL.iter().map(|&m| AnyOracle::Eps(EpsOracle::build(g.clone(), &eps_config(m)).unwrap())).collect();
    out.push(AnyOracle::Poly(PolyOracle::build(g.clone(), &PolyConfig::new(2)).unwrap()));
    out
}

#[test]
fn brute_force_agrees_with_shortest_path() {
    for kind in GraphKind::ALL {
        for seed in 0..4 {
            let g = graph(kind, 40, seed, 30);
            let dist_cache: Vec<QueryRecord> = random_queries(&g, 3, 60, seed);
            for q in &dist_cache {
                let bf = brute_force(&g, q.u, q.v, &q.failures).unwrap();
                assert_eq!(Some(bf), q.expected);
                let p = shortest_path(&g, &q.failures, q.u, q.v).unwrap();
                assert_eq!(p.length, bf);
                assert_eq!(bf, floyd(&g, &q.failures)[q.u as usize][q.v as usize]);
            }
        }
    }
}

#[test]
fn brute_force_edge_cases() {
    let g = WeightedGraph::new(5, vec![(0, 1, 2), (1, 2, 3), (2, 3, 1), (3, 4, 4)]).unwrap();
    assert_eq!(brute_force(&g, 3, 3, &[1]).unwrap(), 0);
    assert_eq!(brute_force(&g, 0, 4, &[2]).unwrap(), INF);
    assert_eq!(brute_force(&g, 0, 4, &[]).unwrap(), 10);
    assert!(brute_force(&g, 0, 4, &[0]).is_err());
    assert!(brute_force(&g, 0, 9, &[]).is_err());
    assert!(brute_force(&g, 0, 1, &[7]).is_err());
}

#[test]
fn generators_are_deterministic_and_connected() {
    for kind in GraphKind::ALL {
        assert_eq!(kind.to_string().parse::<GraphKind>().unwrap(), kind);
        for seed in 0..5 {
            let mut spec = GenSpec::new(kind, 50, seed, 40);
            spec.min_weight = 5;
            let a = generate(&spec).unwrap();
            let b = generate(&spec).unwrap();
            assert_eq!(a.to_text(), b.to_text());
            assert!(a.n() >= 3 && a.n() <= 50);
            assert!(a.edges().iter().all(|e| (5..=40).contains(&e.2)));
            let dist = floyd(&a, &[]);
            assert!(dist.iter().flatten().all(|&x| x != INF));
        }
    }
    assert!("ring".parse::<GraphKind>().is_err());
    assert!(generate(&GenSpec::new(GraphKind::Grid, 2, 0, 5)).is_err());
    let mut bad = GenSpec::new(GraphKind::Grid, 10, 0, 5);
    bad.min_weight = 6;
    assert!(generate(&bad).is_err());
    bad.min_weight = 0;
    assert!(generate(&bad).is_err());
}

#[test]
fn grid_and_power_law_shapes() {
    let g = graph(GraphKind::Grid, 16, 0, 1);
    assert_eq!((g.n(), g.m()), (16, 24));
    for v in 0..16u32 {
        let deg = g.neighbors(v).len();
        let (r, c) = (v / 4, v % 4);
        let expect = 4 - usize::from(r == 0) - usize::from(r == 3) - usize::from(c == 0) - usize::from(c == 3);
        assert_eq!(deg, expect);
    }
    let p = graph(GraphKind::PowerLaw, 200, 3, 1);
    assert_eq!(p.n(), 200);
    assert_eq!(p.m(), 1 + 2 * 198);
    let max_deg = (0..200).map(|v| p.neighbors(v).len()).max().unwrap();
    assert!(max_deg > 15, "preferential attachment should grow hubs, max degree {max_deg}");
}

#[test]
fn star_augmented_matches_reference_family() {
    // v_0 hub, rim path v_1..v_n, n = 12
    let n = 12;
    let g = graph(GraphKind::StarAugmented, n + 1, 0, 1);
    let mut want: Vec<(Vertex, Vertex)> = (1..=n as Vertex).map(|i| (0, i)).collect();
    want.extend((1..n as Vertex).map(|i| (i, i + 1)));
    want.sort_unstable();
    let mut got: Vec<(Vertex, Vertex)> = g.edges().iter().map(|e| (e.0.min(e.1), e.0.max(e.1))).collect();
    got.sort_unstable();
    assert_eq!(got, want);
    assert!(g.edges().iter().all(|e| e.2 == 1));
    assert_eq!(brute_force(&g, 1, n as Vertex, &[0]).unwrap(), n as Weight - 1);
}

#[test]
fn query_files_round_trip() {
    let text = "# workload\n0 4 |\n1 3 | 2 | 7\n\n2 0 | 1 3 | inf\n";
    let qs = parse_queries(text).unwrap();
    assert_eq!(
        qs,
        vec![
            QueryRecord { u: 0, v: 4, failures: vec![], expected: None },
            QueryRecord { u: 1, v: 3, failures: vec![2], expected: Some(7) },
            QueryRecord { u: 2, v: 0, failures: vec![1, 3], expected: Some(INF) },
        ]
    );
    let out = format_queries(&qs);
    assert_eq!(out, "0 4 |\n1 3 | 2 | 7\n2 0 | 1 3 | inf\n");
    assert_eq!(parse_queries(&out).unwrap(), qs);
    let g = graph(GraphKind::ErdosRenyi, 30, 1, 9);
    let gen = random_queries(&g, 2, 50, 4);
    assert_eq!(parse_queries(&format_queries(&gen)).unwrap(), gen);
}

#[test]
fn query_file_errors_carry_line_numbers() {
    for (text, line) in [("0 1 |\n0 |\n", 2), ("# c\n\n0 x |\n", 3), ("0 1 | 2 | 3 | 4\n", 1), ("0 1\n", 1), ("0 1 | 2 | far\n", 1)] {
        match parse_queries(text) {
            Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
            other => panic!("{text:?} gave {other:?}"),
        }
    }
}

#[test]
fn generated_workloads_respect_contracts() {
    let g = graph(GraphKind::PowerLaw, 60, 2, 20);
    for qs in [random_queries(&g, 3, 100, 9), path_queries(&g, 3, 100, 9)] {
        assert_eq!(qs.len(), 100);
        for q in &qs {
            assert!(q.failures.len() <= 3);
            assert!(!q.failures.contains(&q.u) && !q.failures.contains(&q.v));
            assert!(q.failures.windows(2).all(|w| w[0] < w[1]));
            assert_eq!(q.expected, Some(brute_force(&g, q.u, q.v, &q.failures).unwrap()));
        }
    }
    assert_eq!(random_queries(&g, 2, 20, 5), random_queries(&g, 2, 20, 5));
}

#[test]
fn snapshots_round_trip_bit_identically() {
    let g = graph(GraphKind::ErdosRenyi, 24, 7, 50);
    let workload = random_queries(&g, 2, 40, 1);
    let wide = WeightedGraph::new(
        g.n(),
        g.edges().iter().map(|&(a, b, w)| (a, b, w * (g.n() as Weight).pow(3))).collect(),
    )
    .unwrap();
    let mut oracles = all_oracles(&g);
    oracles.push(AnyOracle::ScaledEps(
        ScaledGraphFamily::build(&wide, |h| EpsOracle::build(h.clone(), &eps_config(Mode::Bipath))).unwrap(),
    ));
    oracles.push(AnyOracle::ScaledPoly(
        ScaledGraphFamily::build(&wide, |h| PolyOracle::build(h.clone(), &PolyConfig::new(2))).unwrap(),
    ));
    let dir = std::env::temp_dir().join(format!("vsdo-harness-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for (i, o) in oracles.iter().enumerate() {
        let bytes = o.to_bytes().unwrap();
        assert_eq!(&bytes[..4], MAGIC);
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), VERSION);
        let back = AnyOracle::from_bytes(&bytes).unwrap();
        assert_eq!(back.to_bytes().unwrap(), bytes);
        let file = dir.join(format!("o{i}.snap"));
        o.save(&file).unwrap();
        assert_eq!(std::fs::read(&file).unwrap(), bytes);
        let loaded = AnyOracle::load(&file).unwrap();
        assert_eq!(loaded.name(), o.name());
        for q in &workload {
            assert_eq!(loaded.query(q.u, q.v, &q.failures, true).unwrap(), o.query(q.u, q.v, &q.failures, true).unwrap());
        }
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn corrupt_snapshots_are_rejected() {
    let g = graph(GraphKind::Grid, 9, 0, 3);
    let o = AnyOracle::Poly(PolyOracle::build(g, &PolyConfig::new(1)).unwrap());
    let bytes = o.to_bytes().unwrap();
    let mut magic = bytes.clone();
    magic[0] = b'X';
    let mut version = bytes.clone();
    version[4] = 99;
    for bad in [&magic[..], &version[..], &bytes[..6], &bytes[..bytes.len() / 2]] {
        assert!(matches!(AnyOracle::from_bytes(bad), Err(Error::Snapshot(_))));
    }
}

#[test]
fn answers_carry_valid_paths() {
    let g = graph(GraphKind::PowerLaw, 30, 5, 25);
    for o in all_oracles(&g) {
        for q in random_queries(&g, 2, 40, 3) {
            let a = o.query(q.u, q.v, &q.failures, true).unwrap();
            let exact = q.expected.unwrap();
            assert!(o.within_contract(a.estimate, exact), "{} {}", o.name(), q.to_line());
            if let Some(p) = a.path {
                assert_eq!(p.vertices.first(), Some(&q.u));
                assert_eq!(p.vertices.last(), Some(&q.v));
                assert!(p.vertices.iter().all(|x| !q.failures.contains(x)));
                assert_eq!(p.weigh(&g), Some(p.length));
                if let AnyOracle::Eps(_) = o {
                    assert_eq!(a.estimate, Some(Ratio::from_integer(p.length as u128)));
                }
            } else if exact != INF {
                assert!(!matches!(o, AnyOracle::Poly(_)), "poly answered without a certificate");
            }
        }
    }
}

#[test]
fn evaluation_reports() {
    let g = graph(GraphKind::ErdosRenyi, 30, 11, 40);
    let mut qs = random_queries(&g, 2, 50, 6);
    qs[0].expected = None;
    for o in all_oracles(&g) {
        let one = evaluate(&o, &qs, 1).unwrap();
        let three = evaluate(&o, &qs, 3).unwrap();
        assert_eq!(one.schema_version, SCHEMA_VERSION);
        assert_eq!(one.violations, 0, "{}", o.name());
        assert_eq!(one.queries.len(), qs.len());
        assert_eq!((one.n, one.d), (30, 2));
        assert!(one.max_ratio >= 1.0 && one.max_ratio <= one.stretch_bound);
        assert!(one.mean_ratio >= 1.0 && one.mean_ratio <= one.max_ratio);
        for (a, (b, q)) in one.queries.iter().zip(three.queries.iter().zip(&qs)) {
            assert_eq!((a.u, a.v, &a.failures, &a.estimate, a.exact, a.ok), (b.u, b.v, &b.failures, &b.estimate, b.exact, b.ok));
            let exact = brute_force(&g, q.u, q.v, &q.failures).unwrap();
            assert_eq!(a.exact, (exact != INF).then_some(exact));
        }
        let json = serde_json::to_string(&one).unwrap();
        let back: vsdo::harness::EvalReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.queries.len(), one.queries.len());
        assert_eq!(back.violations, 0);
    }
    // a wrong expected value is flagged as a violation
    let o = AnyOracle::Eps(EpsOracle::build(g.clone(), &eps_config(Mode::Explicit)).unwrap());
    let q = qs.iter().find(|q| q.expected.is_some_and(|e| e != INF && e > 0)).unwrap().clone();
    let lie = QueryRecord { expected: Some(q.expected.unwrap() * 3), ..q };
    assert_eq!(evaluate(&o, &[lie], 1).unwrap().violations, 1);
}

#[test]
fn verify_passes_and_catches_tampering() {
    let g = graph(GraphKind::Grid, 20, 2, 9);
    for o in all_oracles(&g) {
        let r = verify(&o, 30, 1).unwrap();
        assert!(r.passed(), "{}: {:?}", o.name(), r.checks);
        assert!(r.checks.iter().all(|c| c.checked > 0));
    }
    let wide = WeightedGraph::new(g.n(), g.edges().iter().map(|&(a, b, w)| (a, b, w * 9000)).collect()).unwrap();
    let fam = ScaledGraphFamily::build(&wide, |h| EpsOracle::build(h.clone(), &eps_config(Mode::Expath))).unwrap();
    assert!(verify(&AnyOracle::ScaledEps(fam), 20, 2).unwrap().passed());
    // stored paths only exist in an eagerly built forest
    let mut cfg = eps_config(Mode::Explicit);
    cfg.eager = true;
    let mut o = EpsOracle::build(g.clone(), &cfg).unwrap();
    assert!(verify(&AnyOracle::Eps(o.clone()), 10, 1).unwrap().passed());
    o.graph = WeightedGraph::new(g.n(), g.edges().iter().map(|&(a, b, w)| (a, b, w + 1)).collect()).unwrap();
    assert!(!verify(&AnyOracle::Eps(o), 10, 1).unwrap().passed());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generator_replay(kind_ix in 0usize..4, n in 3usize..80, seed in 0u64..1_000_000, w in 1u64..1000) {
        let spec = GenSpec::new(GraphKind::ALL[kind_ix], n, seed, w);
        let a = generate(&spec).unwrap();
        prop_assert_eq!(a.to_text(), generate(&spec).unwrap().to_text());
        prop_assert_eq!(WeightedGraph::parse(&a.to_text()).unwrap().to_text(), a.to_text());
        prop_assert!(a.edges().iter().all(|e| e.2 >= 1 && e.2 <= w));
    }

    #[test]
    fn query_line_round_trip(u in 0u32..1000, v in 0u32..1000, f in proptest::collection::vec(0u32..1000, 0..4), e in proptest::option::of(0u64..1_000_000)) {
        let q = QueryRecord { u, v, failures: f, expected: e };
        prop_assert_eq!(parse_queries(&q.to_line()).unwrap(), vec![q]);
    }
}
