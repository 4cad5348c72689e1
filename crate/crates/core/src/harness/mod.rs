//! Verification baseline, workload generators, query files, evaluation reports and snapshots.

mod eval;
mod generate;
mod snapshot;
mod verify;

pub use eval::{evaluate, EvalReport, QueryResult, SCHEMA_VERSION};
pub use generate::{generate, GenSpec, GraphKind};
pub use snapshot::{AnyOracle, Answer, MAGIC, VERSION};
pub use verify::{verify, Check, VerifyReport};

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::{Vertex, Weight, WeightedGraph, INF};

/// Exact `δ_{G−D}(u, v)` by plain Dijkstra.
pub fn brute_force(g: &WeightedGraph, u: Vertex, v: Vertex, failures: &[Vertex]) -> Result<Weight> {
    g.check_vertex(u)?;
    g.check_vertex(v)?;
    let mut dead = vec![false; g.n()];
    for &f in failures {
        g.check_vertex(f)?;
        dead[f as usize] = true;
    }
    if dead[u as usize] || dead[v as usize] {
        return Err(invalid("query endpoint is in the failure set"));
    }
    let mut dist = vec![INF; g.n()];
    let mut heap = BinaryHeap::new();
    dist[u as usize] = 0;
    heap.push(Reverse((0, u)));
    while let Some(Reverse((d, x))) = heap.pop() {
        if x == v {
            return Ok(d);
        }
        if d > dist[x as usize] {
            continue;
        }
        for &(y, w) in g.neighbors(x) {
            if !dead[y as usize] && d + w < dist[y as usize] {
                dist[y as usize] = d + w;
                heap.push(Reverse((d + w, y)));
            }
        }
    }
    Ok(INF)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub u: Vertex,
    pub v: Vertex,
    pub failures: Vec<Vertex>,
    pub expected: Option<Weight>,
}

impl QueryRecord {
    pub fn to_line(&self) -> String {
        let mut s = format!("{} {} |", self.u, self.v);
        for f in &self.failures {
            let _ = write!(s, " {f}");
        }
        if let Some(e) = self.expected {
            let _ = write!(s, " | {}", if e == INF { "inf".to_string() } else { e.to_string() });
        }
        s
    }
}

/// Parses query lines `u v | f1 f2 … [| expected]`; `#` starts a comment line.
pub fn parse_queries(text: &str) -> Result<Vec<QueryRecord>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let err = |msg: String| Error::Parse { line, msg };
        let parts: Vec<&str> = l.split('|').collect();
        if parts.len() < 2 || parts.len() > 3 {
            return Err(err("expected `u v | failures [| expected]`".into()));
        }
        let num = |x: &str| x.parse::<Vertex>().map_err(|_| err(format!("not a vertex id: {x:?}")));
        let ends: Vec<&str> = parts[0].split_whitespace().collect();
        if ends.len() != 2 {
            return Err(err(format!("expected two endpoints, found {}", ends.len())));
        }
        let failures = parts[1].split_whitespace().map(num).collect::<Result<Vec<_>>>()?;
        let expected = match parts.get(2).map(|x| x.trim()) {
            None => None,
            Some("inf") => Some(INF),
            Some(x) => Some(x.parse::<Weight>().map_err(|_| err(format!("not a distance: {x:?}")))?),
        };
        out.push(QueryRecord { u: num(ends[0])?, v: num(ends[1])?, failures, expected });
    }
    Ok(out)
}

pub fn format_queries(qs: &[QueryRecord]) -> String {
    qs.iter().map(|q| q.to_line() + "\n").collect()
}

/// Random queries with `|D| ≤ d`, endpoints outside `D`, expected distances filled in.
pub fn random_queries(g: &WeightedGraph, d: usize, count: usize, seed: u64) -> Vec<QueryRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.n() as Vertex;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut all: Vec<Vertex> = (0..n).collect();
        all.shuffle(&mut rng);
        let size = rng.random_range(0..=d.min(n as usize - 2));
        let failures: Vec<Vertex> = {
            let mut f = all[2..2 + size].to_vec();
            f.sort_unstable();
            f
        };
        let (u, v) = (all[0], all[1]);
        let expected = brute_force(g, u, v, &failures).ok();
        out.push(QueryRecord { u, v, failures, expected });
    }
    out
}

/// Failure sets near the `u`-`v` shortest path, which stress decision trees more than uniform ones.
pub fn path_queries(g: &WeightedGraph, d: usize, count: usize, seed: u64) -> Vec<QueryRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.n() as Vertex;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u == v {
            continue;
        }
        let p = crate::graph::shortest_path(g, &[], u, v).expect("valid endpoints");
        let mut pool: Vec<Vertex> = p.vertices.iter().copied().filter(|&x| x != u && x != v).collect();
        for &x in &p.vertices {
            pool.extend(g.neighbors(x).iter().map(|e| e.0).filter(|&y| y != u && y != v));
        }
        pool.sort_unstable();
        pool.dedup();
        pool.shuffle(&mut rng);
        let size = rng.random_range(0..=d).min(pool.len());
        let mut failures = pool[..size].to_vec();
        failures.sort_unstable();
        let expected = brute_force(g, u, v, &failures).ok();
        out.push(QueryRecord { u, v, failures, expected });
    }
    out
}
