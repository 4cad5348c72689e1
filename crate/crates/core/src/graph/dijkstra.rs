use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::{Path, Vertex, Weight, WeightedGraph, INF, NONE};

#[derive(Debug, Clone, Copy, Default)]
pub struct SsspOptions<'a> {
    /// Vertices that may not be entered.
    pub blocked: Option<&'a [bool]>,
    /// A vertex is only reached if its distance is strictly below its limit.
    pub limit: Option<&'a [Weight]>,
    /// Stop once this vertex is settled.
    pub target: Option<Vertex>,
}

/// Canonical shortest-path tree from one source.
#[derive(Debug, Clone)]
pub struct Sssp {
    pub source: Vertex,
    pub dist: Vec<Weight>,
    pub hops: Vec<u32>,
    pub parent: Vec<Vertex>,
    /// Settled vertices in settling order.
    pub order: Vec<Vertex>,
}

impl Sssp {
    pub fn path_to(&self, v: Vertex) -> Path {
        if self.dist[v as usize] == INF {
            return Path::unreachable();
        }
        let mut vertices = vec![v];
        let mut x = v;
        while x != self.source {
            x = self.parent[x as usize];
            vertices.push(x);
        }
        vertices.reverse();
        Path { vertices, length: self.dist[v as usize] }
    }
}

/// Dijkstra under the order (length, hops, lexicographic vertex sequence).
///
/// Every candidate parent of a vertex is settled before the vertex itself, so
/// ties in (length, hops) are resolved by comparing the two settled tree paths
/// at the point where they diverge.
pub fn canonical_sssp(g: &WeightedGraph, source: Vertex, opts: SsspOptions<'_>) -> Sssp {
    let n = g.n();
    let mut dist = vec![INF; n];
    let mut hops = vec![u32::MAX; n];
    let mut parent = vec![NONE; n];
    let mut done = vec![false; n];
    let mut order = Vec::new();
    let mut heap = BinaryHeap::new();
    dist[source as usize] = 0;
    hops[source as usize] = 0;
    heap.push(Reverse((0, 0u32, source)));
    while let Some(Reverse((d, h, x))) = heap.pop() {
        let xi = x as usize;
        if done[xi] || d != dist[xi] || h != hops[xi] {
            continue;
        }
        done[xi] = true;
        order.push(x);
        if opts.target == Some(x) {
            break;
        }
        for &(y, w) in g.neighbors(x) {
            let yi = y as usize;
            if done[yi] || opts.blocked.is_some_and(|b| b[yi]) {
                continue;
            }
            let nd = d + w;
            if opts.limit.is_some_and(|l| nd >= l[yi]) {
                continue;
            }
            let nh = h + 1;
            if (nd, nh) < (dist[yi], hops[yi]) {
                dist[yi] = nd;
                hops[yi] = nh;
                parent[yi] = x;
                heap.push(Reverse((nd, nh, y)));
            } else if (nd, nh) == (dist[yi], hops[yi]) && lex_less(&parent, x, parent[yi]) {
                parent[yi] = x;
            }
        }
    }
    for v in 0..n {
        if !done[v] {
            dist[v] = INF;
            parent[v] = NONE;
        }
    }
    Sssp { source, dist, hops, parent, order }
}

/// Whether the tree path to `a` is lexicographically smaller than the tree
/// path to `b`; both must have the same hop count.
fn lex_less(parent: &[Vertex], a: Vertex, b: Vertex) -> bool {
    let (mut x, mut y) = (a, b);
    while x != y {
        let (px, py) = (parent[x as usize], parent[y as usize]);
        if px == py {
            return x < y;
        }
        x = px;
        y = py;
    }
    false
}
