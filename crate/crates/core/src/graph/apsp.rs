use serde::{Deserialize, Serialize};

use super::{canonical_sssp, Path, SsspOptions, Vertex, Weight, WeightedGraph, INF, NONE};

/// Distances and canonical shortest-path trees of an induced subgraph.
///
/// Row `s` stores, for every `t`, the distance, the predecessor of `t` on the
/// canonical `s`-`t` path, and the preorder interval of `t` in the tree rooted
/// at `s`, which turns path membership into an ancestor test.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AllPairs {
    n: usize,
    member: Vec<bool>,
    dist: Vec<Weight>,
    parent: Vec<Vertex>,
    pre: Vec<u32>,
    end: Vec<u32>,
}

impl AllPairs {
    pub fn new(g: &WeightedGraph, induced_on: &[bool]) -> Self {
        let n = g.n();
        assert_eq!(induced_on.len(), n);
        let blocked: Vec<bool> = induced_on.iter().map(|b| !b).collect();
        let mut dist = vec![INF; n * n];
        let mut parent = vec![NONE; n * n];
        let mut pre = vec![u32::MAX; n * n];
        let mut end = vec![0; n * n];
        let mut children: Vec<Vec<Vertex>> = vec![Vec::new(); n];
        for s in 0..n {
            if !induced_on[s] {
                continue;
            }
            let sp = canonical_sssp(g, s as Vertex, SsspOptions { blocked: Some(&blocked), ..Default::default() });
            let row = s * n;
            dist[row..row + n].copy_from_slice(&sp.dist);
            parent[row..row + n].copy_from_slice(&sp.parent);
            for c in children.iter_mut() {
                c.clear();
            }
            for &v in &sp.order[1..] {
                children[sp.parent[v as usize] as usize].push(v);
            }
            // iterative preorder numbering
            let mut counter = 0u32;
            let mut stack: Vec<(Vertex, usize)> = vec![(s as Vertex, 0)];
            pre[row + s] = 0;
            counter += 1;
            while let Some(top) = stack.last_mut() {
                let (x, i) = *top;
                if i < children[x as usize].len() {
                    top.1 += 1;
                    let c = children[x as usize][i];
                    pre[row + c as usize] = counter;
                    counter += 1;
                    stack.push((c, 0));
                } else {
                    end[row + x as usize] = counter;
                    stack.pop();
                }
            }
        }
        Self { n, member: induced_on.to_vec(), dist, parent, pre, end }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.member[v as usize]
    }

    #[inline]
    pub fn dist(&self, s: Vertex, t: Vertex) -> Weight {
        self.dist[s as usize * self.n + t as usize]
    }

    pub fn dist_row(&self, s: Vertex) -> &[Weight] {
        &self.dist[s as usize * self.n..(s as usize + 1) * self.n]
    }

    pub fn parent(&self, s: Vertex, t: Vertex) -> Vertex {
        self.parent[s as usize * self.n + t as usize]
    }

    /// Whether `x` lies on the canonical `u`-`v` path (endpoints included).
    #[inline]
    pub fn on_path(&self, x: Vertex, u: Vertex, v: Vertex) -> bool {
        let row = u as usize * self.n;
        let (pu, pv) = (self.pre[row + x as usize], self.pre[row + v as usize]);
        if pu == u32::MAX || pv == u32::MAX {
            return false;
        }
        pu <= pv && pv < self.end[row + x as usize]
    }

    /// Preorder number of `x` in the tree rooted at `u`, `u32::MAX` if unreachable.
    #[inline]
    pub fn preorder(&self, u: Vertex, x: Vertex) -> u32 {
        self.pre[u as usize * self.n + x as usize]
    }

    /// Preorder interval of the subtree of `x` in the tree rooted at `u`.
    pub fn subtree(&self, u: Vertex, x: Vertex) -> Option<(u32, u32)> {
        let i = u as usize * self.n + x as usize;
        (self.pre[i] != u32::MAX).then(|| (self.pre[i], self.end[i]))
    }

    pub fn path(&self, u: Vertex, v: Vertex) -> Path {
        let d = self.dist(u, v);
        if d == INF {
            return Path::unreachable();
        }
        let mut vertices = vec![v];
        let mut x = v;
        while x != u {
            x = self.parent(u, x);
            vertices.push(x);
        }
        vertices.reverse();
        Path { vertices, length: d }
    }

    /// Appends the canonical `u`-`v` path without its first vertex.
    pub fn append_path(&self, u: Vertex, v: Vertex, out: &mut Vec<Vertex>) {
        let start = out.len();
        let mut x = v;
        while x != u {
            out.push(x);
            x = self.parent(u, x);
        }
        out[start..].reverse();
    }
}
