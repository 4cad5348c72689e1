//! Weighted undirected graphs with canonical (unique) shortest paths.

mod apsp;
mod dijkstra;

pub use apsp::AllPairs;
pub use dijkstra::{canonical_sssp, Sssp, SsspOptions};

use std::cmp::Ordering;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub type Vertex = u32;
pub type Weight = u64;

/// Length of a path that does not exist.
pub const INF: Weight = Weight::MAX;
pub(crate) const NONE: Vertex = Vertex::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<(Vertex, Vertex, Weight)>,
    offsets: Vec<usize>,
    adj: Vec<(Vertex, Weight)>,
    max_weight: Weight,
}

impl WeightedGraph {
    /// Builds a graph, rejecting loops, duplicate pairs, zero weights and `n < 3`.
    pub fn new(n: usize, edges: Vec<(Vertex, Vertex, Weight)>) -> Result<Self> {
        if n < 3 {
            return Err(invalid(format!("graph needs at least 3 vertices, got {n}")));
        }
        if n >= NONE as usize {
            return Err(invalid("too many vertices"));
        }
        let mut seen = std::collections::HashSet::with_capacity(edges.len());
        let mut degree = vec![0usize; n];
        for &(u, v, w) in &edges {
            for x in [u, v] {
                if x as usize >= n {
                    return Err(Error::InvalidVertex(x));
                }
            }
            if u == v {
                return Err(invalid(format!("self-loop at vertex {u}")));
            }
            if w == 0 {
                return Err(invalid(format!("edge ({u}, {v}) has weight 0")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(invalid(format!("duplicate edge ({u}, {v})")));
            }
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for v in 0..n {
            offsets[v + 1] = offsets[v] + degree[v];
        }
        let mut fill = offsets.clone();
        let mut adj = vec![(0, 0); offsets[n]];
        for &(u, v, w) in &edges {
            adj[fill[u as usize]] = (v, w);
            fill[u as usize] += 1;
            adj[fill[v as usize]] = (u, w);
            fill[v as usize] += 1;
        }
        for v in 0..n {
            adj[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        let max_weight = edges.iter().map(|e| e.2).max().unwrap_or(1);
        Ok(Self { n, edges, offsets, adj, max_weight })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(Vertex, Vertex, Weight)] {
        &self.edges
    }

    /// Neighbours of `v` sorted by vertex id.
    pub fn neighbors(&self, v: Vertex) -> &[(Vertex, Weight)] {
        let v = v as usize;
        &self.adj[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn weight(&self, u: Vertex, v: Vertex) -> Option<Weight> {
        let nb = self.neighbors(u);
        nb.binary_search_by_key(&v, |e| e.0).ok().map(|i| nb[i].1)
    }

    pub fn max_weight(&self) -> Weight {
        self.max_weight
    }

    /// `n·W`, an upper bound on every finite distance.
    pub fn diameter_bound(&self) -> Weight {
        self.n as Weight * self.max_weight
    }

    pub fn check_vertex(&self, v: Vertex) -> Result<()> {
        if (v as usize) < self.n {
            Ok(())
        } else {
            Err(Error::InvalidVertex(v))
        }
    }

    /// Parses the text format: `n m` followed by `m` lines `u v w`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hl, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty input".into() })?;
        let head = parse_fields::<usize>(header, 2, hl)?;
        let (n, m) = (head[0], head[1]);
        let mut edges = Vec::with_capacity(m);
        let mut seen = std::collections::HashSet::with_capacity(m);
        for (line, l) in lines.by_ref().take(m) {
            let f = parse_fields::<u64>(l, 3, line)?;
            let (u, v, w) = (f[0], f[1], f[2]);
            let err = |msg: String| Error::Parse { line, msg };
            if u >= n as u64 || v >= n as u64 {
                return Err(err(format!("vertex id out of range 0..{n}")));
            }
            if u == v {
                return Err(err(format!("self-loop at vertex {u}")));
            }
            if w == 0 {
                return Err(err("weight must be at least 1".into()));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(err(format!("duplicate edge ({u}, {v})")));
            }
            edges.push((u as Vertex, v as Vertex, w));
        }
        if edges.len() != m {
            return Err(Error::Parse { line: hl, msg: format!("expected {m} edges, found {}", edges.len()) });
        }
        if let Some((line, _)) = lines.next() {
            return Err(Error::Parse { line, msg: "trailing content after edge list".into() });
        }
        Self::new(n, edges)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.edges.len());
        for &(u, v, w) in &self.edges {
            let _ = writeln!(s, "{u} {v} {w}");
        }
        s
    }

    pub fn mask(&self, set: &[Vertex]) -> Vec<bool> {
        let mut m = vec![false; self.n];
        for &v in set {
            m[v as usize] = true;
        }
        m
    }
}

fn parse_fields<T: std::str::FromStr>(l: &str, count: usize, line: usize) -> Result<Vec<T>> {
    let f: Vec<&str> = l.split_whitespace().collect();
    if f.len() != count {
        return Err(Error::Parse { line, msg: format!("expected {count} fields, found {}", f.len()) });
    }
    f.iter()
        .map(|x| x.parse::<T>().map_err(|_| Error::Parse { line, msg: format!("not a non-negative integer: {x:?}") }))
        .collect()
}

/// A path given by its vertex sequence; `length == INF` marks "no path".
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Path {
    pub vertices: Vec<Vertex>,
    pub length: Weight,
}

impl Path {
    pub fn unreachable() -> Self {
        Path { vertices: Vec::new(), length: INF }
    }

    pub fn trivial(v: Vertex) -> Self {
        Path { vertices: vec![v], length: 0 }
    }

    pub fn is_finite(&self) -> bool {
        self.length != INF
    }

    pub fn hops(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn key(&self) -> PathKey<'_> {
        PathKey { length: self.length, hops: self.hops(), vertices: &self.vertices }
    }

    /// Sum of edge weights, or `None` if some consecutive pair is not an edge.
    pub fn weigh(&self, g: &WeightedGraph) -> Option<Weight> {
        self.vertices.windows(2).try_fold(0, |acc, e| Some(acc + g.weight(e[0], e[1])?))
    }

    pub fn is_simple(&self) -> bool {
        let mut seen = std::collections::HashSet::with_capacity(self.vertices.len());
        self.vertices.iter().all(|v| seen.insert(*v))
    }

    /// Appends `other`, which must start where `self` ends.
    pub fn extend(&mut self, other: &Path) {
        debug_assert_eq!(self.vertices.last(), other.vertices.first());
        self.vertices.extend_from_slice(&other.vertices[1..]);
        self.length += other.length;
    }

    /// Removes cycles, keeping the first visit of every vertex.
    pub fn loop_erased(&self, g: &WeightedGraph) -> Path {
        let mut out: Vec<Vertex> = Vec::with_capacity(self.vertices.len());
        let mut pos = std::collections::HashMap::new();
        for &v in &self.vertices {
            if let Some(&i) = pos.get(&v) {
                for x in out.drain(i + 1..) {
                    pos.remove(&x);
                }
            } else {
                pos.insert(v, out.len());
                out.push(v);
            }
        }
        let mut p = Path { vertices: out, length: 0 };
        p.length = p.weigh(g).expect("sub-walk of a walk");
        p
    }
}

/// Total order on paths with the same endpoints: length, hop count, then vertex sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathKey<'a> {
    pub length: Weight,
    pub hops: usize,
    pub vertices: &'a [Vertex],
}

impl Ord for PathKey<'_> {
    fn cmp(&self, o: &Self) -> Ordering {
        (self.length, self.hops, self.vertices).cmp(&(o.length, o.hops, o.vertices))
    }
}

impl PartialOrd for PathKey<'_> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// The canonical shortest `u`-`v` path in `g - forbidden`.
pub fn shortest_path(g: &WeightedGraph, forbidden: &[Vertex], u: Vertex, v: Vertex) -> Result<Path> {
    g.check_vertex(u)?;
    g.check_vertex(v)?;
    for &f in forbidden {
        g.check_vertex(f)?;
    }
    if forbidden.contains(&u) || forbidden.contains(&v) {
        return Err(invalid("query endpoint is forbidden"));
    }
    let blocked = g.mask(forbidden);
    let sp = canonical_sssp(g, u, SsspOptions { blocked: Some(&blocked), target: Some(v), ..Default::default() });
    Ok(sp.path_to(v))
}
