//! The high-degree hierarchy: recursive extraction of high pseudo-degree vertices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AllPairs, Path, Vertex, WeightedGraph};
use crate::tree_cover::{build_cover, CoverParams, CoverTree, TreeCoverIndex};

const MAX_DEPTH: usize = 40;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HierarchyNode {
    /// The vertex set `U`, sorted.
    pub set: Vec<Vertex>,
    pub depth: usize,
    pub parent: Option<(usize, usize)>,
    /// `𝒯(U)`
    pub cover: TreeCoverIndex,
    pub hi: Vec<Vertex>,
    /// Child node ids for `W_1..W_d`; empty for a leaf.
    pub children: Vec<usize>,
    /// `𝒯_{W_j}(U)` per child (`None` when `U ⊆ W_j`).
    pub edge_covers: Vec<Option<TreeCoverIndex>>,
    /// Smallest `j` with `v ∈ W_j`, 0 if none.
    pub first_child: Vec<u8>,
}

impl HierarchyNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HierarchyTree {
    pub params: CoverParams,
    pub nodes: Vec<HierarchyNode>,
}

impl HierarchyTree {
    pub fn build(g: &WeightedGraph, params: &CoverParams) -> Result<Self> {
        let n = g.n();
        let mut nodes: Vec<HierarchyNode> = Vec::new();
        let mut work = vec![((0..n as Vertex).collect::<Vec<_>>(), 0usize, None::<(usize, usize)>)];
        while let Some((set, depth, parent)) = work.pop() {
            if depth > MAX_DEPTH {
                return Err(Error::Internal("hierarchy does not shrink; threshold too small".into()));
            }
            let id = nodes.len();
            if let Some((p, j)) = parent {
                nodes[p].children[j] = id;
            }
            let cover = build_cover(g, &set, &[], params)?;
            let hi = cover.high_pdeg_set(params.s);
            let mut node = HierarchyNode {
                set: set.clone(),
                depth,
                parent,
                cover,
                hi: hi.clone(),
                children: Vec::new(),
                edge_covers: Vec::new(),
                first_child: vec![0; n],
            };
            if !hi.is_empty() {
                let mut w = hi;
                let mut ws = Vec::with_capacity(params.d);
                for j in 1..=params.d {
                    if j > 1 {
                        let prev = node.edge_covers[j - 2].as_ref();
                        if let Some(c) = prev {
                            w.extend(c.high_pdeg_set(params.s));
                            w.sort_unstable();
                            w.dedup();
                        }
                    }
                    let rest: Vec<Vertex> = set.iter().copied().filter(|v| w.binary_search(v).is_err()).collect();
                    let ec = if rest.is_empty() { None } else { Some(build_cover(g, &rest, &w, params)?) };
                    node.edge_covers.push(ec);
                    for &v in &w {
                        if node.first_child[v as usize] == 0 {
                            node.first_child[v as usize] = j as u8;
                        }
                    }
                    ws.push(w.clone());
                }
                node.children = vec![usize::MAX; params.d];
                for (j, wj) in ws.into_iter().enumerate().rev() {
                    work.push((wj, depth + 1, Some((id, j))));
                }
            }
            nodes.push(node);
        }
        Ok(Self { params: *params, nodes })
    }

    pub fn root(&self) -> &HierarchyNode {
        &self.nodes[0]
    }

    pub fn depth(&self) -> usize {
        self.nodes.iter().map(|x| x.depth).max().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Root-to-node path chosen for the failure set `D`.
    pub fn find_path(&self, failures: &[Vertex]) -> Result<HierarchyPath> {
        let d = self.params.d;
        if failures.len() > d {
            return Err(Error::TooManyFailures { got: failures.len(), max: d });
        }
        let mut at = 0usize;
        loop {
            let node = &self.nodes[at];
            if node.is_leaf() {
                break;
            }
            let mut present = vec![false; d + 2];
            for &f in failures {
                present[node.first_child[f as usize] as usize] = true;
            }
            // minimal j with D ∩ (W_{j+1} ∖ W_j) = ∅
            let j = (0..=d).find(|&j| !present[j + 1]).expect("W_{d+1} = W_d");
            if j == 0 {
                break;
            }
            at = node.children[j - 1];
        }
        Ok(self.path_to(at))
    }

    pub fn path_to(&self, node: usize) -> HierarchyPath {
        let n = self.params.n;
        let mut chain = vec![(node, None)];
        let mut at = node;
        while let Some((p, j)) = self.nodes[at].parent {
            chain.push((p, Some(j)));
            at = p;
        }
        chain.reverse();
        // chain[i] = (node U_{i+1}, child index taken out of it)
        let nodes: Vec<usize> = chain.iter().map(|c| c.0).collect();
        let edges: Vec<Option<usize>> = chain.iter().map(|c| c.1).collect();
        let p = nodes.len();
        let mut level = vec![1u8; n];
        let mut member = vec![vec![false; n]; p];
        for (i, &id) in nodes.iter().enumerate() {
            for &v in &self.nodes[id].set {
                member[i][v as usize] = true;
                level[v as usize] = (i + 1) as u8;
            }
        }
        HierarchyPath { node, nodes, edges, level, member }
    }
}

/// A root-to-node path `U_1 = V, …, U_p` of the hierarchy.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HierarchyPath {
    pub node: usize,
    pub nodes: Vec<usize>,
    /// Child index taken out of `U_i` (none for `U_p`).
    edges: Vec<Option<usize>>,
    level: Vec<u8>,
    member: Vec<Vec<bool>>,
}

impl HierarchyPath {
    pub fn p(&self) -> usize {
        self.nodes.len()
    }

    /// `l(v)`, the largest `i` with `v ∈ U_i` (1-based).
    pub fn level(&self, v: Vertex) -> u8 {
        self.level[v as usize]
    }

    /// Whether `v ∈ U_i` for 1-based `i`.
    pub fn in_u(&self, i: usize, v: Vertex) -> bool {
        self.member[i - 1][v as usize]
    }

    /// Vertex mask of `G_ℓ`.
    pub fn level_mask(&self, l: usize) -> Vec<bool> {
        self.level.iter().map(|&x| (x as usize) <= l).collect()
    }

    /// The cover `𝒯_{U_{i+1}}(U_i)` for 1-based `i`.
    pub fn cover<'h>(&self, h: &'h HierarchyTree, i: usize) -> Option<&'h TreeCoverIndex> {
        let node = &h.nodes[self.nodes[i - 1]];
        match self.edges[i - 1] {
            Some(j) => node.edge_covers[j].as_ref(),
            None => Some(&node.cover),
        }
    }

    /// All trees of `𝒯 = ∪ 𝒯_{U_{i+1}}(U_i)` with their level.
    pub fn trees<'h>(&self, h: &'h HierarchyTree) -> impl Iterator<Item = (usize, &'h CoverTree)> + 'h {
        let covers: Vec<(usize, &'h TreeCoverIndex)> =
            (1..=self.p()).filter_map(|i| self.cover(h, i).map(|c| (i, c))).collect();
        covers.into_iter().flat_map(|(i, c)| c.trees.iter().map(move |t| (i, t)))
    }

    /// `T_ℓ(x, y)` and the tree path from `x` to `y`.
    pub fn level_tree_lookup<'h>(
        &self,
        h: &'h HierarchyTree,
        l: usize,
        x: Vertex,
        y: Vertex,
    ) -> Result<(&'h CoverTree, Path)> {
        if self.level(x) as usize != l || self.level(y) as usize > l {
            return Err(crate::error::invalid("level lookup needs l(x) = ℓ and l(y) ≤ ℓ"));
        }
        let cover = self.cover(h, l).ok_or(Error::NotCovered(x, y))?;
        let root = cover.cover_tree_for(x, y)?;
        let t = cover.tree(root).expect("root has a tree");
        let (a, b) = (t.local(x).expect("x in tree"), t.local(y).expect("y in tree"));
        let vertices = t.path(a, b);
        Ok((t, Path { vertices, length: t.path_length(a, b) }))
    }

    /// Distance matrices of `G_1, …, G_p`.
    pub fn level_graphs(&self, g: &WeightedGraph) -> LevelGraphs {
        let levels = (1..=self.p()).map(|l| AllPairs::new(g, &self.level_mask(l))).collect();
        LevelGraphs { levels, level: self.level.clone() }
    }
}

/// Distance matrices of the level subgraphs `G_ℓ` along one hierarchy path.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LevelGraphs {
    levels: Vec<AllPairs>,
    level: Vec<u8>,
}

impl LevelGraphs {
    pub fn p(&self) -> usize {
        self.levels.len()
    }

    /// `G_ℓ` for 1-based `ℓ`.
    pub fn get(&self, l: u8) -> &AllPairs {
        &self.levels[l as usize - 1]
    }

    pub fn level(&self, v: Vertex) -> u8 {
        self.level[v as usize]
    }
}
