//! Weight-range reduction to polynomially bounded weights and the monotone
//! binary search shared by the distance wrappers.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::{Vertex, Weight, WeightedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Search {
    /// Smallest index answering YES, `None` if even `top` answers NO.
    pub index: Option<u32>,
    pub calls: u32,
}

/// Binary search over `0..=top` with sentinels NO at `−1` and YES at `top + 1`.
pub fn binary_search_decision(top: u32, mut yes: impl FnMut(u32) -> Result<bool>) -> Result<Search> {
    let (mut l, mut r) = (-1i64, top as i64 + 1);
    let mut calls = 0;
    while r - l > 1 {
        let m = (l + r) / 2;
        calls += 1;
        if yes(m as u32)? {
            r = m;
        } else {
            l = m;
        }
    }
    Ok(Search { index: (r <= top as i64).then_some(r as u32), calls })
}

/// `⌈log₂(top + 2)⌉ + 1`
pub fn search_call_bound(top: u32) -> u32 {
    (top as u64 + 2).next_power_of_two().trailing_zeros() + 1
}

/// An oracle usable inside the scaled family; `None` means disconnected.
pub trait InnerOracle {
    fn estimate(&self, u: Vertex, v: Vertex, failures: &[Vertex]) -> Result<Option<u128>>;
}

/// Exact distances by Dijkstra, isolating the reduction's own error.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExactInner(pub WeightedGraph);

impl InnerOracle for ExactInner {
    fn estimate(&self, u: Vertex, v: Vertex, failures: &[Vertex]) -> Result<Option<u128>> {
        let d = crate::harness::brute_force(&self.0, u, v, failures)?;
        Ok((d != crate::graph::INF).then_some(d as u128))
    }
}

impl InnerOracle for crate::oracle_eps::EpsOracle {
    fn estimate(&self, u: Vertex, v: Vertex, failures: &[Vertex]) -> Result<Option<u128>> {
        let d = self.query(u, v, failures)?;
        Ok((d != crate::graph::INF).then_some(d as u128))
    }
}

impl InnerOracle for crate::oracle_poly::PolyOracle {
    fn estimate(&self, u: Vertex, v: Vertex, failures: &[Vertex]) -> Result<Option<u128>> {
        Ok(self.query(u, v, failures)?.estimate)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScaledLevel<O> {
    pub index: u32,
    pub graph: WeightedGraph,
    pub oracle: O,
}

/// The graphs `G̃^i`: edges of weight `≤ n^{i+1}`, rescaled into `[1, n³]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScaledGraphFamily<O> {
    /// The original graph.
    pub graph: WeightedGraph,
    pub n: u64,
    /// `false` when `W ≤ n³` and the single level is `G` itself.
    pub scaled: bool,
    pub levels: Vec<ScaledLevel<O>>,
}

fn pow(n: u64, e: u32) -> u128 {
    (n as u128).pow(e)
}

/// Edges and weights of `G̃^i`.
pub fn scaled_graph(g: &WeightedGraph, i: u32) -> Result<WeightedGraph> {
    let n = g.n() as u64;
    let cap = pow(n, i + 1);
    let edges = g
        .edges()
        .iter()
        .filter(|e| e.2 as u128 <= cap)
        .map(|&(a, b, w)| {
            let w = if i < 2 { w as u128 * pow(n, 2 - i) } else { (w as u128).div_ceil(pow(n, i - 2)) };
            (a, b, w as Weight)
        })
        .collect();
    WeightedGraph::new(g.n(), edges)
}

/// Smallest `t` with `n^t ≥ W`.
fn log_n_ceil(n: u64, w: Weight) -> u32 {
    let mut t = 0;
    while pow(n, t) < w as u128 {
        t += 1;
    }
    t
}

impl<O: InnerOracle> ScaledGraphFamily<O> {
    pub fn build(g: &WeightedGraph, mut inner: impl FnMut(&WeightedGraph) -> Result<O>) -> Result<Self> {
        let n = (g.n() as u64).max(2);
        if g.max_weight() as u128 <= pow(n, 3) {
            let oracle = inner(g)?;
            return Ok(Self { graph: g.clone(), n, scaled: false, levels: vec![ScaledLevel { index: 0, graph: g.clone(), oracle }] });
        }
        let top = log_n_ceil(n, g.max_weight());
        let levels = (0..=top)
            .map(|i| {
                let graph = scaled_graph(g, i)?;
                let oracle = inner(&graph)?;
                Ok(ScaledLevel { index: i, graph, oracle })
            })
            .collect::<Result<_>>()?;
        Ok(Self { graph: g.clone(), n, scaled: true, levels })
    }

    pub fn top(&self) -> u32 {
        self.levels.len() as u32 - 1
    }

    /// Scales a level-`i` estimate back: `x·n^{i−2}`.
    fn unscale(&self, i: u32, x: u128) -> Ratio<u128> {
        if !self.scaled {
            return Ratio::from_integer(x);
        }
        if i >= 2 {
            Ratio::from_integer(x * pow(self.n, i - 2))
        } else {
            Ratio::new(x, pow(self.n, 2 - i))
        }
    }

    /// Estimate of `δ_{G−D}(u, v)` and the levels queried, `None` if disconnected.
    pub fn query(&self, u: Vertex, v: Vertex, failures: &[Vertex]) -> Result<(Option<Ratio<u128>>, Vec<u32>)> {
        let mut touched = Vec::new();
        let mut est = vec![None; self.levels.len()];
        let mut ask = |i: u32, touched: &mut Vec<u32>| -> Result<Option<u128>> {
            if est[i as usize].is_none() {
                touched.push(i);
                est[i as usize] = Some(self.levels[i as usize].oracle.estimate(u, v, failures)?);
            }
            Ok(est[i as usize].unwrap())
        };
        let search = binary_search_decision(self.top(), |i| Ok(ask(i, &mut touched)?.is_some()))?;
        let Some(i) = search.index else { return Ok((None, touched)) };
        let first = self.unscale(i, ask(i, &mut touched)?.expect("connected at the found level"));
        let ans = if i < self.top() {
            let next = ask(i + 1, &mut touched)?.expect("edge sets are monotone");
            first.min(self.unscale(i + 1, next))
        } else {
            first
        };
        Ok((Some(ans), touched))
    }
}
