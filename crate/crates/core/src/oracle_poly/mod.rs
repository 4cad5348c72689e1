//! The polylogarithmic-stretch decision oracle over pruned tree covers, and
//! its distance wrapper.

mod decide;
mod family;
mod level;
mod range;

pub use decide::{affected_decomposition, certificate_bound, decide, AffectedDecomposition, Decision, RNode};
pub use family::{ExplicitDag, FamilyReach, XyFamily};
pub use level::{CoveringIndex, PolyLevel, PrunedTree};
pub use range::EdgeRangeTable;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::{Path, Vertex, Weight, WeightedGraph};
use crate::hierarchy::{HierarchyPath, HierarchyTree};
use crate::reductions::binary_search_decision;
use crate::tree_cover::CoverParams;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolyConfig {
    pub d: usize,
    pub c: u32,
    /// Overrides the high pseudo-degree threshold `s`.
    pub threshold: Option<u64>,
    pub seed: u64,
}

impl PolyConfig {
    pub fn new(d: usize) -> Self {
        Self { d, c: 1, threshold: None, seed: 0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolyOracle {
    pub graph: WeightedGraph,
    pub config: PolyConfig,
    pub cover: CoverParams,
    pub hierarchy: HierarchyTree,
    /// `⌈log₂(nW)⌉`
    pub top: u32,
    /// `d·p·⌈2e ln²n⌉·(s+1) + 2`
    pub r_bound: u128,
    /// `(12k−4)·r_bound − 4k + 2`
    pub a: u128,
    paths: Vec<HierarchyPath>,
    /// Per hierarchy node, per `i`, the structures for `ρ = 2^i`.
    levels: Vec<Vec<PolyLevel>>,
}

#[derive(Debug, Clone)]
pub struct PolyAnswer {
    /// `A·2^i`, `None` when `u` and `v` are disconnected in `G − D`.
    pub estimate: Option<u128>,
    /// Smallest `i` answering YES.
    pub index: Option<u32>,
    pub calls: u32,
}

impl PolyOracle {
    pub fn build(graph: WeightedGraph, config: &PolyConfig) -> Result<Self> {
        let mut cover = CoverParams::new(graph.n(), config.d, config.c)?.with_seed(config.seed);
        if let Some(s) = config.threshold {
            cover = cover.with_threshold(s);
        }
        let hierarchy = HierarchyTree::build(&graph, &cover)?;
        let p = hierarchy.depth() + 1;
        let top = ceil_log2(graph.diameter_bound());
        let r_bound = cover.d as u128 * p as u128 * cover.trees_per_vertex() as u128 * (cover.s as u128 + 1) + 2;
        let k = cover.k as u128;
        let a = (12 * k - 4) * r_bound - 4 * k + 2;
        let paths: Vec<HierarchyPath> = (0..hierarchy.len()).map(|i| hierarchy.path_to(i)).collect();
        let levels = paths
            .iter()
            .map(|hp| (0..=top).map(|i| Self::level_for(&graph, &hierarchy, hp, cover.k, 1 << i)).collect())
            .collect();
        Ok(Self { graph, config: config.clone(), cover, hierarchy, top, r_bound, a, paths, levels })
    }

    fn level_for(g: &WeightedGraph, h: &HierarchyTree, hp: &HierarchyPath, k: usize, rho: Weight) -> PolyLevel {
        let mut own = vec![u32::MAX; g.n()];
        let mut count = 0u32;
        for (level, t) in hp.trees(h) {
            if hp.level(t.root) as usize == level {
                own[t.root as usize] = count;
            }
            count += 1;
        }
        PolyLevel::build(g, hp.trees(h), &own, k, rho)
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn k(&self) -> usize {
        self.cover.k
    }

    pub fn hierarchy_path(&self, node: usize) -> &HierarchyPath {
        &self.paths[node]
    }

    /// Stored structures of one hierarchy node for `ρ = 2^i`.
    pub fn level(&self, node: usize, i: u32) -> &PolyLevel {
        &self.levels[node][i as usize]
    }

    pub fn stored_positions(&self) -> usize {
        self.levels.iter().flatten().map(|l| l.lambda.len()).sum()
    }

    fn check_query(&self, u: Vertex, v: Vertex, failures: &[Vertex]) -> Result<(Vec<Vertex>, usize)> {
        self.graph.check_vertex(u)?;
        self.graph.check_vertex(v)?;
        let mut d = failures.to_vec();
        for &f in &d {
            self.graph.check_vertex(f)?;
        }
        d.sort_unstable();
        d.dedup();
        if d.contains(&u) || d.contains(&v) {
            return Err(invalid("query endpoint is in the failure set"));
        }
        if d.len() > self.config.d {
            return Err(Error::TooManyFailures { got: d.len(), max: self.config.d });
        }
        let node = self.hierarchy.find_path(&d)?.node;
        Ok((d, node))
    }

    /// The decision oracle for `ρ = 2^i`.
    pub fn decide(&self, u: Vertex, v: Vertex, failures: &[Vertex], i: u32, want_path: bool) -> Result<Decision> {
        if i > self.top {
            return Err(invalid(format!("ρ index {i} exceeds the top index {}", self.top)));
        }
        let (d, node) = self.check_query(u, v, failures)?;
        Ok(decide(&self.graph, &self.levels[node][i as usize], u, v, &d, want_path))
    }

    /// The decision oracle for an arbitrary `ρ ≥ 1`, building its structures if not stored.
    pub fn decide_rho(&self, u: Vertex, v: Vertex, failures: &[Vertex], rho: Weight, want_path: bool) -> Result<Decision> {
        if rho == 0 {
            return Err(invalid("ρ must be at least 1"));
        }
        if rho.is_power_of_two() && rho.trailing_zeros() <= self.top {
            return self.decide(u, v, failures, rho.trailing_zeros(), want_path);
        }
        let (d, node) = self.check_query(u, v, failures)?;
        let level = Self::level_for(&self.graph, &self.hierarchy, &self.paths[node], self.cover.k, rho);
        Ok(decide(&self.graph, &level, u, v, &d, want_path))
    }

    /// `A·2^i` for the smallest YES index `i` found by binary search.
    pub fn query(&self, u: Vertex, v: Vertex, failures: &[Vertex]) -> Result<PolyAnswer> {
        let (d, node) = self.check_query(u, v, failures)?;
        if u == v {
            return Ok(PolyAnswer { estimate: Some(0), index: Some(0), calls: 0 });
        }
        let search = binary_search_decision(self.top, |i| {
            Ok(decide(&self.graph, &self.levels[node][i as usize], u, v, &d, false).yes)
        })?;
        Ok(PolyAnswer {
            estimate: search.index.map(|i| self.a << i),
            index: search.index,
            calls: search.calls,
        })
    }

    /// A `D`-avoiding path certified by the smallest YES level.
    pub fn query_path(&self, u: Vertex, v: Vertex, failures: &[Vertex]) -> Result<Option<Path>> {
        let ans = self.query(u, v, failures)?;
        match ans.index {
            None => Ok(None),
            Some(i) => Ok(self.decide(u, v, failures, i, true)?.certificate),
        }
    }
}

/// `⌈log₂ x⌉` for `x ≥ 1`.
pub fn ceil_log2(x: Weight) -> u32 {
    x.max(1).next_power_of_two().trailing_zeros()
}
