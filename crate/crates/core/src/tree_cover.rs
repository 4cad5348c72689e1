//! Source-restricted tree covers built from Thorup–Zwick style clusters.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::{canonical_sssp, SsspOptions, Vertex, Weight, WeightedGraph, INF, NONE};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverParams {
    pub n: usize,
    pub d: usize,
    pub c: u32,
    pub k: usize,
    pub s: u64,
    /// Seed of the fallback sampled hitting sets.
    #[serde(default)]
    pub seed: u64,
}

impl CoverParams {
    pub fn new(n: usize, d: usize, c: u32) -> Result<Self> {
        if n < 3 {
            return Err(invalid("n must be at least 3"));
        }
        if d < 1 || c < 1 {
            return Err(invalid("d and c must be at least 1"));
        }
        let ln = (n as f64).ln();
        let k = ln.ceil() as usize;
        let s = (4.0 * std::f64::consts::E * (d as f64).powi(c as i32 + 1) * ln * ln).floor() as u64 + 1;
        Ok(Self { n, d, c, k: k.max(1), s, seed: 0 })
    }

    /// Replaces the high-degree threshold, e.g. to exercise deep hierarchies on small graphs.
    pub fn with_threshold(mut self, s: u64) -> Self {
        self.s = s.max(2);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn ln_n(&self) -> f64 {
        (self.n as f64).ln()
    }

    /// Size of the neighbourhoods `N_{i+1}(v)` hit by each sample level.
    pub fn neighbourhood_size(&self) -> usize {
        ((self.n as f64).powf(1.0 / self.k as f64) * (self.ln_n() + 1.0)).ceil() as usize
    }

    /// Bound on the number of trees containing one vertex.
    pub fn membership_bound(&self) -> usize {
        (self.k as f64 * (self.n as f64).powf(1.0 / self.k as f64) * (self.ln_n() + 1.0)).ceil() as usize
    }

    /// `⌈2e ln² n⌉`
    pub fn trees_per_vertex(&self) -> u64 {
        (2.0 * std::f64::consts::E * self.ln_n() * self.ln_n()).ceil() as u64
    }

    /// Upper bound on `|Hi|` for a cover with `sources` source vertices.
    pub fn hi_bound(&self, sources: usize) -> f64 {
        sources as f64 / (2.0 * (self.d as f64).powi(self.c as i32 + 1))
    }

    /// `⌊(1/c) log_d n⌋`
    pub fn depth_bound(&self) -> usize {
        if self.d < 2 {
            return usize::MAX;
        }
        let mut depth = 0;
        // largest h with d^{c h} <= n
        let mut p: u128 = 1;
        let step = (self.d as u128).pow(self.c);
        while p * step <= self.n as u128 {
            p *= step;
            depth += 1;
        }
        depth
    }
}

/// One cluster tree, vertices stored in preorder.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverTree {
    pub root: Vertex,
    pub verts: Vec<Vertex>,
    /// Local index of the parent; `NONE` for the root.
    pub parent: Vec<u32>,
    pub depth: Vec<Weight>,
    pub hop_depth: Vec<u32>,
    pub size: Vec<u32>,
    pub trunk: Vec<bool>,
    pub pdeg: Vec<u32>,
    lookup: Vec<(Vertex, u32)>,
}

impl CoverTree {
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

    pub fn parent_of(&self, i: usize) -> Option<usize> {
        (self.parent[i] != NONE).then(|| self.parent[i] as usize)
    }

    pub fn children(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let end = i + self.size[i] as usize;
        let mut j = i + 1;
        std::iter::from_fn(move || {
            if j < end {
                let c = j;
                j += self.size[c] as usize;
                Some(c)
            } else {
                None
            }
        })
    }

    pub fn is_ancestor(&self, a: usize, b: usize) -> bool {
        a <= b && b < a + self.size[a] as usize
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

    /// `dep(a) + dep(b) - 2 dep(lca)`
    pub fn path_length(&self, a: usize, b: usize) -> Weight {
        let (mut x, mut y) = (a, b);
        while x != y {
            if self.hop_depth[x] >= self.hop_depth[y] {
                x = self.parent[x] as usize;
            } else {
                y = self.parent[y] as usize;
            }
        }
        self.depth[a] + self.depth[b] - 2 * self.depth[x]
    }

    fn from_sssp(root: Vertex, order: &[Vertex], parent_of: &[Vertex], dist: &[Weight], is_source: &[bool]) -> Self {
        let mut kids: std::collections::HashMap<Vertex, Vec<Vertex>> = std::collections::HashMap::new();
        for &v in &order[1..] {
            kids.entry(parent_of[v as usize]).or_default().push(v);
        }
        for c in kids.values_mut() {
            c.sort_unstable();
        }
        let m = order.len();
        let mut verts = Vec::with_capacity(m);
        let mut parent = Vec::with_capacity(m);
        let mut hop_depth = Vec::with_capacity(m);
        let mut stack = vec![(root, NONE, 0u32)];
        while let Some((v, p, h)) = stack.pop() {
            verts.push(v);
            parent.push(p);
            hop_depth.push(h);
            let me = (verts.len() - 1) as u32;
            if let Some(cs) = kids.get(&v) {
                for &c in cs.iter().rev() {
                    stack.push((c, me, h + 1));
                }
            }
        }
        let depth: Vec<Weight> = verts.iter().map(|&v| dist[v as usize]).collect();
        let mut size = vec![1u32; m];
        let mut has_source: Vec<bool> = verts.iter().map(|&v| is_source[v as usize]).collect();
        for i in (1..m).rev() {
            let p = parent[i] as usize;
            size[p] += size[i];
            if has_source[i] {
                has_source[p] = true;
            }
        }
        // a vertex is on a tree path between two sources iff its subtree holds a source
        // (the root is itself a source)
        let trunk = has_source;
        let mut pdeg = vec![0u32; m];
        for i in 1..m {
            if trunk[i] {
                pdeg[i] += 1;
                pdeg[parent[i] as usize] += 1;
            }
        }
        let mut lookup: Vec<(Vertex, u32)> = verts.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
        lookup.sort_unstable();
        CoverTree { root, verts, parent, depth, hop_depth, size, trunk, pdeg, lookup }
    }
}

/// A `(S∖R)`-restricted tree cover of `G - R`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeCoverIndex {
    pub n: usize,
    pub k: usize,
    pub sources: Vec<Vertex>,
    pub removed: Vec<bool>,
    /// Sample level of each source (largest `i` with `v ∈ A_i`), `-1` otherwise.
    pub level: Vec<i32>,
    pub trees: Vec<CoverTree>,
    tree_of_root: Vec<u32>,
    /// `B(v)` as (tree, local index) pairs.
    pub bunches: Vec<Vec<(u32, u32)>>,
    /// Nearest `A_i` vertex to each vertex, ties towards higher level then smaller id.
    pivots: Vec<Vec<Vertex>>,
}

impl TreeCoverIndex {
    pub fn tree(&self, root: Vertex) -> Option<&CoverTree> {
        let t = self.tree_of_root[root as usize];
        (t != NONE).then(|| &self.trees[t as usize])
    }

    pub fn tree_index(&self, root: Vertex) -> Option<usize> {
        let t = self.tree_of_root[root as usize];
        (t != NONE).then_some(t as usize)
    }

    pub fn is_source(&self, v: Vertex) -> bool {
        self.level[v as usize] >= 0
    }

    /// Local index of `v` in the tree rooted at `w`, if `w ∈ B(v)`.
    pub fn position(&self, w: Vertex, v: Vertex) -> Option<(usize, usize)> {
        let t = self.tree_index(w)? as u32;
        self.bunches[v as usize].iter().find(|e| e.0 == t).map(|e| (t as usize, e.1 as usize))
    }

    /// Number of bunch entries per vertex.
    pub fn memberships(&self, v: Vertex) -> usize {
        self.bunches[v as usize].len()
    }

    /// Root of a tree containing both `u` and `v` with `dep(u)+dep(v) <= (2k-1) δ(u,v)`.
    pub fn cover_tree_for(&self, u: Vertex, v: Vertex) -> Result<Vertex> {
        if !self.is_source(u) || self.removed[v as usize] {
            return Err(invalid("cover lookup needs u in S∖R and v outside R"));
        }
        if u == v {
            return Ok(u);
        }
        let mut w = u;
        let (mut known, mut check) = (u, v);
        for _ in 0..=2 * self.k {
            if self.position(w, check).is_some() {
                return Ok(w);
            }
            let next = self.level[w as usize] as usize + 1;
            if next >= self.pivots.len() {
                break;
            }
            w = self.pivots[next][check as usize];
            if w == NONE {
                break;
            }
            std::mem::swap(&mut known, &mut check);
            debug_assert!(self.position(w, known).is_some());
        }
        Err(Error::NotCovered(u, v))
    }

    /// Vertices whose pseudo-degree exceeds `s` in at least one tree.
    pub fn high_pdeg_set(&self, s: u64) -> Vec<Vertex> {
        let mut hi = vec![false; self.n];
        for t in &self.trees {
            for (i, &v) in t.verts.iter().enumerate() {
                if t.pdeg[i] as u64 > s {
                    hi[v as usize] = true;
                }
            }
        }
        (0..self.n as Vertex).filter(|&v| hi[v as usize]).collect()
    }
}

pub fn build_cover(g: &WeightedGraph, sources: &[Vertex], removed: &[Vertex], params: &CoverParams) -> Result<TreeCoverIndex> {
    let n = g.n();
    let removed_mask = g.mask(removed);
    let mut a0: Vec<Vertex> = sources.iter().copied().filter(|&v| !removed_mask[v as usize]).collect();
    a0.sort_unstable();
    a0.dedup();
    if a0.is_empty() {
        return Err(invalid("tree cover needs a nonempty source set"));
    }
    for &v in &a0 {
        g.check_vertex(v)?;
    }
    let k = params.k;
    let levels = sample_levels(g, &a0, &removed_mask, params);
    let mut level = vec![-1i32; n];
    for (i, a) in levels.iter().enumerate() {
        for &v in a {
            level[v as usize] = i as i32;
        }
    }
    // pivots[i][v] and δ(v, A_i); A_k = ∅
    let mut pivots = Vec::with_capacity(k);
    let mut pivot_dist = Vec::with_capacity(k + 1);
    for a in &levels {
        let (p, d) = nearest_sources(g, a, &level, &removed_mask);
        pivots.push(p);
        pivot_dist.push(d);
    }
    pivot_dist.push(vec![INF; n]);
    let is_source: Vec<bool> = level.iter().map(|&l| l >= 0).collect();
    let mut trees = Vec::with_capacity(a0.len());
    let mut tree_of_root = vec![NONE; n];
    let mut bunches: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
    for &w in &a0 {
        let i = level[w as usize] as usize;
        let sp = canonical_sssp(
            g,
            w,
            SsspOptions { blocked: Some(&removed_mask), limit: Some(&pivot_dist[i + 1]), target: None },
        );
        let t = CoverTree::from_sssp(w, &sp.order, &sp.parent, &sp.dist, &is_source);
        let id = trees.len() as u32;
        tree_of_root[w as usize] = id;
        for (j, &v) in t.verts.iter().enumerate() {
            bunches[v as usize].push((id, j as u32));
        }
        trees.push(t);
    }
    Ok(TreeCoverIndex {
        n,
        k,
        sources: a0,
        removed: removed_mask,
        level,
        trees,
        tree_of_root,
        bunches,
        pivots,
    })
}

/// `A_0 ⊇ A_1 ⊇ … ⊇ A_{k-1}`, each a hitting set of the full-size neighbourhoods of the previous level.
fn sample_levels(g: &WeightedGraph, a0: &[Vertex], removed: &[bool], params: &CoverParams) -> Vec<Vec<Vertex>> {
    let k = params.k;
    let nb = params.neighbourhood_size();
    let shrink = (params.n as f64).powf(1.0 / k as f64);
    let mut levels = vec![a0.to_vec()];
    for i in 0..k - 1 {
        let cur = &levels[i];
        if cur.len() <= nb {
            break;
        }
        let sets = neighbourhoods(g, cur, removed, nb);
        let limit = cur.len() as f64 / shrink;
        let mut next = greedy_hitting_set(cur, &sets);
        if next.len() as f64 > limit + 1e-9 {
            for attempt in 0..32u64 {
                let cand = sampled_hitting_set(cur, &sets, 1.0 / shrink, params.seed ^ ((i as u64) << 32 | attempt));
                if cand.len() as f64 <= limit + 1e-9 {
                    next = cand;
                    break;
                }
            }
        }
        if next.is_empty() {
            break;
        }
        levels.push(next);
    }
    levels
}

/// For each vertex outside `R`, its `nb` closest members of `set` if it has that many.
fn neighbourhoods(g: &WeightedGraph, set: &[Vertex], removed: &[bool], nb: usize) -> Vec<Vec<Vertex>> {
    let n = g.n();
    let mut member = vec![false; n];
    for &v in set {
        member[v as usize] = true;
    }
    let mut dist = vec![INF; n];
    let mut touched = Vec::new();
    let mut out = Vec::new();
    for s in 0..n as Vertex {
        if removed[s as usize] {
            continue;
        }
        let mut found = Vec::with_capacity(nb);
        let mut heap = BinaryHeap::new();
        dist[s as usize] = 0;
        touched.push(s);
        heap.push(Reverse((0, s)));
        while let Some(Reverse((d, x))) = heap.pop() {
            if d != dist[x as usize] {
                continue;
            }
            if member[x as usize] {
                found.push(x);
                if found.len() == nb {
                    break;
                }
            }
            for &(y, w) in g.neighbors(x) {
                if removed[y as usize] {
                    continue;
                }
                let nd = d + w;
                if nd < dist[y as usize] {
                    if dist[y as usize] == INF {
                        touched.push(y);
                    }
                    dist[y as usize] = nd;
                    heap.push(Reverse((nd, y)));
                }
            }
        }
        for t in touched.drain(..) {
            dist[t as usize] = INF;
        }
        if found.len() == nb {
            out.push(found);
        }
    }
    out
}

fn greedy_hitting_set(universe: &[Vertex], sets: &[Vec<Vertex>]) -> Vec<Vertex> {
    let pos = |v: Vertex| universe.binary_search(&v).expect("set drawn from universe");
    let mut count = vec![0usize; universe.len()];
    let mut containing: Vec<Vec<usize>> = vec![Vec::new(); universe.len()];
    for (si, s) in sets.iter().enumerate() {
        for &v in s {
            let p = pos(v);
            count[p] += 1;
            containing[p].push(si);
        }
    }
    let mut hit = vec![false; sets.len()];
    let mut remaining = sets.len();
    let mut chosen = Vec::new();
    while remaining > 0 {
        let best = (0..universe.len()).max_by_key(|&p| (count[p], Reverse(p))).expect("nonempty");
        chosen.push(universe[best]);
        for &si in &containing[best] {
            if !hit[si] {
                hit[si] = true;
                remaining -= 1;
                for &v in &sets[si] {
                    count[pos(v)] -= 1;
                }
            }
        }
    }
    chosen.sort_unstable();
    chosen
}

fn sampled_hitting_set(universe: &[Vertex], sets: &[Vec<Vertex>], prob: f64, seed: u64) -> Vec<Vertex> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pick: std::collections::BTreeSet<Vertex> =
        universe.iter().copied().filter(|_| rng.random_bool(prob.clamp(0.0, 1.0))).collect();
    for s in sets {
        if !s.iter().any(|v| pick.contains(v)) {
            pick.insert(s[0]);
        }
    }
    pick.into_iter().collect()
}

/// Multi-source Dijkstra labelling each vertex with its nearest source,
/// preferring higher sample level and then smaller id among equidistant ones.
fn nearest_sources(g: &WeightedGraph, set: &[Vertex], level: &[i32], removed: &[bool]) -> (Vec<Vertex>, Vec<Weight>) {
    let n = g.n();
    let rank = |v: Vertex| (Reverse(level[v as usize]), v);
    let mut dist = vec![INF; n];
    let mut label = vec![NONE; n];
    let mut heap = BinaryHeap::new();
    for &s in set {
        dist[s as usize] = 0;
        label[s as usize] = s;
        heap.push(Reverse((0, rank(s), s)));
    }
    let mut done = vec![false; n];
    while let Some(Reverse((d, r, x))) = heap.pop() {
        if done[x as usize] || d != dist[x as usize] || r != rank(label[x as usize]) {
            continue;
        }
        done[x as usize] = true;
        for &(y, w) in g.neighbors(x) {
            if removed[y as usize] || done[y as usize] {
                continue;
            }
            let nd = d + w;
            let yl = label[y as usize];
            if nd < dist[y as usize] || (nd == dist[y as usize] && r < rank(yl)) {
                dist[y as usize] = nd;
                label[y as usize] = label[x as usize];
                heap.push(Reverse((nd, r, y)));
            }
        }
    }
    (label, dist)
}
