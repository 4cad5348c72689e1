use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::graph::{Vertex, Weight, WeightedGraph};
use crate::tree_cover::CoverTree;

/// A cover tree restricted to vertices of depth at most `(2k−1)ρ`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PrunedTree {
    /// 1-based level of the cover the tree came from.
    pub level: usize,
    pub root: Vertex,
    pub verts: Vec<Vertex>,
    pub parent: Vec<u32>,
    pub depth: Vec<Weight>,
    pub hop_depth: Vec<u32>,
    pub size: Vec<u32>,
    pub trunk: Vec<bool>,
    /// Offset of the tree's preorder inside `Λ`.
    pub offset: u32,
    lookup: Vec<(Vertex, u32)>,
}

impl PrunedTree {
    pub fn prune(t: &CoverTree, level: usize, limit: Weight, offset: u32) -> Self {
        let mut remap = vec![u32::MAX; t.len()];
        let mut out = PrunedTree {
            level,
            root: t.root,
            verts: Vec::new(),
            parent: Vec::new(),
            depth: Vec::new(),
            hop_depth: Vec::new(),
            size: Vec::new(),
            trunk: Vec::new(),
            offset,
            lookup: Vec::new(),
        };
        for i in 0..t.len() {
            if t.depth[i] > limit {
                continue;
            }
            remap[i] = out.verts.len() as u32;
            out.verts.push(t.verts[i]);
            out.parent.push(t.parent_of(i).map_or(u32::MAX, |p| remap[p]));
            out.depth.push(t.depth[i]);
            out.hop_depth.push(t.hop_depth[i]);
            out.trunk.push(t.trunk[i]);
        }
        let m = out.verts.len();
        out.size = vec![1; m];
        for i in (1..m).rev() {
            let p = out.parent[i] as usize;
            out.size[p] += out.size[i];
        }
        out.lookup = out.verts.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
        out.lookup.sort_unstable();
        out
    }

    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    pub fn local(&self, v: Vertex) -> Option<usize> {
        self.lookup.binary_search_by_key(&v, |e| e.0).ok().map(|i| self.lookup[i].1 as usize)
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.local(v).is_some()
    }

    pub fn is_ancestor(&self, a: usize, b: usize) -> bool {
        a <= b && b < a + self.size[a] as usize
    }

    pub fn children(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let end = i + self.size[i] as usize;
        let mut j = i + 1;
        std::iter::from_fn(move || {
            (j < end).then(|| {
                let c = j;
                j += self.size[c] as usize;
                c
            })
        })
    }

    /// Vertex sequence of the tree path between two local indices.
    pub fn path(&self, a: usize, b: usize) -> Vec<Vertex> {
        let (mut x, mut y) = (a, b);
        let mut left = Vec::new();
        let mut right = Vec::new();
        while x != y {
            if self.hop_depth[x] >= self.hop_depth[y] {
                left.push(self.verts[x]);
                x = self.parent[x] as usize;
            } else {
                right.push(self.verts[y]);
                y = self.parent[y] as usize;
            }
        }
        left.push(self.verts[x]);
        left.extend(right.into_iter().rev());
        left
    }
}

/// Dyadic intervals over `[0, len)`, stored as the nodes of a perfect segment tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoveringIndex {
    pub len: usize,
    pub width: usize,
}

impl CoveringIndex {
    pub fn new(len: usize) -> Self {
        Self { len, width: len.max(1).next_power_of_two() }
    }

    /// Number of node slots (`1..slots` are used).
    pub fn slots(&self) -> usize {
        2 * self.width
    }

    /// Positions `[l, r)` covered by a node.
    pub fn interval(&self, node: usize) -> (usize, usize) {
        let depth = usize::BITS - 1 - node.leading_zeros();
        let span = self.width >> depth;
        let l = (node - (1 << depth)) * span;
        (l, l + span)
    }

    pub fn leaf(&self, pos: usize) -> usize {
        self.width + pos
    }

    /// The `O(log |Λ|)` disjoint members whose union is `[l, r)`.
    pub fn decompose(&self, l: usize, r: usize) -> Vec<usize> {
        let mut left = Vec::new();
        let mut right = Vec::new();
        let (mut a, mut b) = (l + self.width, r + self.width);
        while a < b {
            if a & 1 == 1 {
                left.push(a);
                a += 1;
            }
            if b & 1 == 1 {
                b -= 1;
                right.push(b);
            }
            a >>= 1;
            b >>= 1;
        }
        left.extend(right.into_iter().rev());
        left
    }
}

/// Everything precomputed for one hierarchy node and one `ρ`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolyLevel {
    pub rho: Weight,
    pub trees: Vec<PrunedTree>,
    /// `Λ`: the vertex at every position.
    pub lambda: Vec<Vertex>,
    /// Tree owning every position.
    pub owner: Vec<u32>,
    pub cover: CoveringIndex,
    /// Per vertex, the pruned trees containing it.
    pub containing: Vec<Bits>,
    /// Per tree, the trees sharing a vertex with it.
    pub overlap: Vec<Bits>,
    /// Per covering node: vertices of the interval.
    pub node_verts: Vec<Bits>,
    /// Per covering node: vertices of the interval and their light neighbours.
    pub node_closure: Vec<Bits>,
    /// Per covering node: trees with a light edge from the interval.
    pub node_adj: Vec<Bits>,
    /// Position of the root of every source's own tree at its level.
    pub own_root: Vec<u32>,
}

impl PolyLevel {
    /// `trees` are the cover trees of the hierarchy path with their level;
    /// `own` maps a vertex to the index (into `trees`) of its own tree.
    pub fn build<'a>(
        g: &WeightedGraph,
        trees: impl IntoIterator<Item = (usize, &'a CoverTree)>,
        own: &[u32],
        k: usize,
        rho: Weight,
    ) -> Self {
        let n = g.n();
        let limit = (2 * k as Weight - 1).saturating_mul(rho);
        let mut pruned = Vec::new();
        let mut lambda = Vec::new();
        let mut owner = Vec::new();
        for (level, t) in trees {
            let pt = PrunedTree::prune(t, level, limit, lambda.len() as u32);
            owner.extend(std::iter::repeat_n(pruned.len() as u32, pt.len()));
            lambda.extend_from_slice(&pt.verts);
            pruned.push(pt);
        }
        let nt = pruned.len();
        let mut containing = vec![Bits::new(nt); n];
        for (i, t) in pruned.iter().enumerate() {
            for &v in &t.verts {
                containing[v as usize].set(i);
            }
        }
        let overlap = pruned
            .iter()
            .map(|t| {
                let mut b = Bits::new(nt);
                for &v in &t.verts {
                    b.or_with(&containing[v as usize]);
                }
                b
            })
            .collect();
        let cover = CoveringIndex::new(lambda.len());
        let slots = cover.slots();
        let mut node_verts = vec![Bits::new(n); slots];
        let mut node_closure = vec![Bits::new(n); slots];
        let mut node_adj = vec![Bits::new(nt); slots];
        for (pos, &a) in lambda.iter().enumerate() {
            let leaf = cover.leaf(pos);
            node_verts[leaf].set(a as usize);
            node_closure[leaf].set(a as usize);
            for &(b, w) in g.neighbors(a) {
                if w <= rho {
                    node_closure[leaf].set(b as usize);
                    node_adj[leaf].or_with(&containing[b as usize]);
                }
            }
        }
        for x in (1..cover.width).rev() {
            for table in [&mut node_verts, &mut node_closure, &mut node_adj] {
                let mut b = table[2 * x].clone();
                b.or_with(&table[2 * x + 1]);
                table[x] = b;
            }
        }
        let own_root = own.iter().map(|&t| if t == u32::MAX { u32::MAX } else { pruned[t as usize].offset }).collect();
        Self {
            rho,
            trees: pruned,
            lambda,
            owner,
            cover,
            containing,
            overlap,
            node_verts,
            node_closure,
            node_adj,
            own_root,
        }
    }

    /// Whether `E′ ∩ (I¹ × I²)` is nonempty for two covering members.
    pub fn edge_range_nonempty(&self, a: usize, b: usize) -> bool {
        self.node_closure[a].intersects(&self.node_verts[b])
    }

    /// Whether `I¹` reaches `I²` in `H` with the trees in `banned` removed.
    pub fn reach(&self, a: usize, b: usize, banned: &Bits) -> bool {
        let mut first = self.node_adj[a].clone();
        first.and_not(banned);
        let mut second = Bits::new(self.trees.len());
        for t in first.ones() {
            second.or_with(&self.overlap[t]);
        }
        second.and_not(banned);
        second.intersects(&self.node_adj[b])
    }
}
