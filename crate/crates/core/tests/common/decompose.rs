use std::collections::HashMap;

use num_bigint::BigUint;

use vsdo::expath::{ExpathSolver, GeometricScale, PathKind};
use vsdo::hierarchy::{HierarchyPath, HierarchyTree};
use vsdo::tree_cover::CoverParams;
use vsdo::{Vertex, Weight, WeightedGraph, INF};

use super::{canonical_by_enumeration, simple_paths};

/// `(1 + p/q)^k ≥ l`, in exact integers.
pub fn cap_ok(p: u128, q: u128, k: u64, l: Weight) -> bool {
    let lhs = BigUint::from(p + q).pow(k as u32);
    let rhs = BigUint::from(l) * BigUint::from(q).pow(k as u32);
    lhs >= rhs
}

/// Smallest `B` with `(1 + p/q)^B ≥ nW`.
pub fn diameter_index(g: &WeightedGraph, p: u128, q: u128) -> u64 {
    let nw = g.n() as Weight * g.edges().iter().map(|e| e.2).max().unwrap();
    (0..).find(|&b| cap_ok(p, q, b, nw)).unwrap()
}

/// Decides membership of a vertex sequence in the family of expaths or bipaths
/// by reachability over (position, slot), straight from the definition.
pub struct Decomposer<'a> {
    g: &'a WeightedGraph,
    levels: Vec<u8>,
    p: usize,
    eps: (u128, u128),
    b: u64,
    bipath: bool,
    canon: HashMap<(u8, Vertex, Vertex), Option<Vec<Vertex>>>,
}

impl<'a> Decomposer<'a> {
    pub fn new(g: &'a WeightedGraph, hp: &HierarchyPath, eps: (u128, u128), bipath: bool) -> Self {
        let levels = (0..g.n() as Vertex).map(|v| hp.level(v)).collect();
        let b = diameter_index(g, eps.0, eps.1);
        Self { g, levels, p: hp.p(), eps, b, bipath, canon: HashMap::new() }
    }

    /// Whether `seq` is the canonical shortest path of some level.
    fn is_level_path(&mut self, seq: &[Vertex]) -> bool {
        if seq.len() == 1 {
            return true;
        }
        let (a, z) = (seq[0], *seq.last().unwrap());
        for l in 1..=self.p as u8 {
            if seq.iter().any(|&v| self.levels[v as usize] > l) {
                continue;
            }
            let levels = &self.levels;
            let g = self.g;
            let c = self.canon.entry((l, a, z)).or_insert_with(|| {
                let removed: Vec<Vertex> = (0..g.n() as Vertex).filter(|&v| levels[v as usize] > l).collect();
                canonical_by_enumeration(g, &removed, a, z).map(|x| x.0)
            });
            if c.as_deref() == Some(seq) {
                return true;
            }
        }
        false
    }

    fn is_piece(&mut self, seq: &[Vertex]) -> bool {
        if !self.bipath {
            return self.is_level_path(seq);
        }
        (0..seq.len()).any(|r| self.is_level_path(&seq[..=r]) && self.is_level_path(&seq[r..]))
    }

    pub fn accepts(&mut self, seq: &[Vertex]) -> bool {
        let m = seq.len();
        let mut prefix = vec![0; m];
        for i in 1..m {
            prefix[i] = prefix[i - 1] + self.g.weight(seq[i - 1], seq[i]).unwrap();
        }
        let total = prefix[m - 1];
        let (p, q) = self.eps;
        let b = self.b;
        let mut at = vec![false; m];
        at[0] = true;
        for k in 0..=2 * b + 1 {
            // optional edge e_k
            let mut after = at.clone();
            for i in 0..m - 1 {
                if at[i] {
                    after[i + 1] = true;
                }
            }
            // piece P_k, possibly a single vertex, capped at its far end (first half) or near end (second half)
            let cap = |from: usize, to: usize| {
                if k <= b {
                    cap_ok(p, q, k, prefix[to])
                } else {
                    cap_ok(p, q, 2 * b + 1 - k, total - prefix[from])
                }
            };
            let mut next = vec![false; m];
            for i in 0..m {
                if !after[i] {
                    continue;
                }
                for j in i..m {
                    if !next[j] && cap(i, j) && self.is_piece(&seq[i..=j]) {
                        next[j] = true;
                    }
                }
            }
            at = next;
        }
        at[m - 1] || (m >= 2 && at[m - 2])
    }
}

/// Minimum over all decomposable simple paths in `G - avoid`.
pub fn oracle_min(dec: &mut Decomposer, avoid: &[Vertex], s: Vertex, t: Vertex) -> Weight {
    let mut best = INF;
    let mut paths = simple_paths(dec.g, avoid, s, t);
    paths.sort_by_key(|p| p.1);
    for (seq, len) in paths {
        if len >= best {
            break;
        }
        if dec.accepts(&seq) {
            best = len;
        }
    }
    best
}

pub fn level_paths(g: &WeightedGraph, threshold: Option<u64>) -> Vec<HierarchyPath> {
    let mut params = CoverParams::new(g.n(), 2, 1).unwrap();
    if let Some(s) = threshold {
        params = params.with_threshold(s);
    }
    match HierarchyTree::build(g, &params) {
        Ok(h) => (0..h.len()).map(|id| h.path_to(id)).collect(),
        Err(_) => Vec::new(),
    }
}

/// Outcome of comparing the DP with the exhaustive oracle over all pairs.
#[derive(Debug, Default)]
pub struct Comparison {
    pub pairs: usize,
    /// DP walks that revisit a vertex; those may undercut every simple decomposable path.
    pub non_simple: usize,
    pub violations: Vec<String>,
}

pub fn compare_with_oracle(g: &WeightedGraph, hp: &HierarchyPath, eps: (u128, u128), avoid: &[Vertex], kind: PathKind) -> Comparison {
    let lg = hp.level_graphs(g);
    let scale = GeometricScale::new(eps.0, eps.1);
    let mut solver = ExpathSolver::new(g, &lg, scale, kind);
    let mut dec = Decomposer::new(g, hp, eps, kind == PathKind::Bipath);
    let mut out = Comparison::default();
    for s in 0..g.n() as Vertex {
        for t in 0..g.n() as Vertex {
            if s == t || avoid.contains(&s) || avoid.contains(&t) {
                continue;
            }
            out.pairs += 1;
            let cp = solver.solve(avoid, s, t);
            let want = oracle_min(&mut dec, avoid, s, t);
            let mut bad = |msg: String| out.violations.push(format!("{s}->{t} avoid {avoid:?}: {msg}"));
            if !cp.is_finite() {
                if want != INF {
                    bad(format!("dp found nothing, oracle {want}"));
                }
                continue;
            }
            if let Err(e) = cp.validate(g, &lg, avoid, &scale) {
                bad(format!("invalid dp result: {e}"));
                continue;
            }
            let walk = cp.expand(&lg).unwrap();
            if !dec.accepts(&walk.vertices) {
                bad("dp result is not decomposable".into());
            } else if cp.length > want {
                bad(format!("dp {} > oracle {want}", cp.length));
            } else if walk.is_simple() {
                if cp.length != want {
                    bad(format!("dp {} ≠ oracle {want}", cp.length));
                }
            } else {
                out.non_simple += 1;
            }
        }
    }
    out
}
