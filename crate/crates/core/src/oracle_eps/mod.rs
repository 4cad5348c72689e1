//! The (1+ε)-stretch oracle: decision trees per hierarchy node, DecTree walks
//! and the auxiliary graph `H` over failure neighbourhoods.

mod params;

pub use params::{parse_ratio, EpsParams, Mode};

use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::expath::{segment, CompressedPath, ExpathSolver, GeometricScale, SegId};
use crate::graph::{canonical_sssp, Path, SsspOptions, Vertex, Weight, WeightedGraph, INF, NONE};
use crate::hierarchy::{HierarchyPath, HierarchyTree, LevelGraphs};
use crate::locked::Locked;
use crate::tree_cover::CoverParams;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EpsConfig {
    pub d: usize,
    pub c: u32,
    pub eps: Ratio<u128>,
    pub mode: Mode,
    /// Overrides the high pseudo-degree threshold `s`.
    pub threshold: Option<u64>,
    /// Materialize every decision-tree node at build time.
    pub eager: bool,
    /// Abort eager builds beyond this many bytes of stored paths.
    pub mem_budget: Option<u64>,
    pub seed: u64,
}

impl EpsConfig {
    pub fn new(d: usize, eps: Ratio<u128>, mode: Mode) -> Self {
        Self { d, c: 1, eps, mode, threshold: None, eager: false, mem_budget: None, seed: 0 }
    }
}

/// A decision-tree node `α`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DtNode {
    pub avoid: Vec<Vertex>,
    pub path: CompressedPath,
    /// Segment of every interior vertex, sorted by vertex (explicit mode only).
    pub segs: Vec<(Vertex, SegId)>,
    /// `ch(α, X, i)` keyed by the segment id of `X` and the level `i`.
    pub children: BTreeMap<(SegId, u8), u32>,
    pub depth: u8,
}

/// All decision trees `FT(u, v)` of one hierarchy node.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Forest {
    pub roots: BTreeMap<(Vertex, Vertex), u32>,
    pub nodes: Vec<DtNode>,
}

fn node_bytes(x: &DtNode) -> u64 {
    (x.avoid.len() * 4 + x.path.atoms.len() * 32 + x.segs.len() * 16 + x.children.len() * 24 + 64) as u64
}

impl Forest {
    /// Rough in-memory size of the stored nodes.
    pub fn approx_bytes(&self) -> u64 {
        self.nodes.iter().map(node_bytes).sum()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EpsOracle {
    pub graph: WeightedGraph,
    pub config: EpsConfig,
    pub cover: CoverParams,
    pub params: EpsParams,
    pub hierarchy: HierarchyTree,
    paths: Vec<HierarchyPath>,
    levels: Vec<LevelGraphs>,
    forests: Vec<Locked<Forest>>,
}

/// The auxiliary graph `H` of one query.
#[derive(Debug, Clone)]
pub struct AuxGraph {
    pub vertices: Vec<Vertex>,
    /// `weights[i * len + j] = DecTree(x_i, x_j, D)`
    pub weights: Vec<Weight>,
}

/// Location of a decision-tree node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeHandle {
    pub hierarchy_node: usize,
    pub node: u32,
}

#[derive(Debug, Clone)]
pub struct EpsAnswer {
    pub estimate: Weight,
    pub path: Option<Path>,
    pub h_size: usize,
}

impl EpsOracle {
    pub fn build(graph: WeightedGraph, config: &EpsConfig) -> Result<Self> {
        let mut cover = CoverParams::new(graph.n(), config.d, config.c)?.with_seed(config.seed);
        if let Some(s) = config.threshold {
            cover = cover.with_threshold(s);
        }
        let hierarchy = HierarchyTree::build(&graph, &cover)?;
        let p = hierarchy.depth() + 1;
        let params = EpsParams::new(config.eps, config.mode, &cover, p)?;
        let paths: Vec<HierarchyPath> = (0..hierarchy.len()).map(|i| hierarchy.path_to(i)).collect();
        let levels = paths.iter().map(|hp| hp.level_graphs(&graph)).collect();
        let forests = (0..hierarchy.len()).map(|_| Locked::new(Forest::default())).collect();
        let oracle = Self { graph, config: config.clone(), cover, params, hierarchy, paths, levels, forests };
        if config.eager {
            oracle.build_all()?;
        }
        Ok(oracle)
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn mode(&self) -> Mode {
        self.params.mode
    }

    pub fn scale(&self) -> GeometricScale {
        self.params.scale()
    }

    pub fn hierarchy_path(&self, node: usize) -> &HierarchyPath {
        &self.paths[node]
    }

    pub fn level_graphs(&self, node: usize) -> &LevelGraphs {
        &self.levels[node]
    }

    /// A copy of the decision forest of one hierarchy node.
    pub fn forest(&self, node: usize) -> Forest {
        self.forests[node].lock().clone()
    }

    /// Total number of materialized decision-tree nodes.
    pub fn node_count(&self) -> usize {
        self.forests.iter().map(|f| f.lock().nodes.len()).sum()
    }

    pub fn stored_bytes(&self) -> u64 {
        self.forests.iter().map(|f| f.lock().approx_bytes()).sum()
    }

    fn build_all(&self) -> Result<()> {
        let n = self.n() as Vertex;
        let mut total = 0u64;
        for h in 0..self.hierarchy.len() {
            let mut ctx = self.context(h);
            let mut forest = self.forests[h].lock();
            let mut counted = 0;
            for u in 0..n {
                for v in 0..n {
                    if u == v {
                        continue;
                    }
                    let root = ctx.root(&mut forest, u, v);
                    let mut stack = vec![root];
                    while let Some(id) = stack.pop() {
                        let node = &forest.nodes[id as usize];
                        if node.depth as usize >= self.params.d || !node.path.is_finite() {
                            continue;
                        }
                        let expanded = ctx.expand(node)?;
                        let sp = segment(&expanded, &self.graph, ctx.scale);
                        let mut ids: Vec<SegId> = sp.ids.iter().flatten().copied().collect();
                        ids.dedup();
                        for seg in ids {
                            for l in 1..=ctx.hp.p() as u8 {
                                stack.push(ctx.child(&mut forest, id, (seg, l))?);
                            }
                        }
                        total += forest.nodes[counted..].iter().map(node_bytes).sum::<u64>();
                        counted = forest.nodes.len();
                        if let Some(b) = self.config.mem_budget.filter(|&b| total > b) {
                            return Err(Error::Budget(format!(
                                "decision forests exceed {b} bytes after {} nodes; lower d or build lazily",
                                forest.nodes.len()
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn context(&self, node: usize) -> Ctx<'_> {
        let lg = &self.levels[node];
        let scale = self.scale();
        let solver = match self.params.mode {
            Mode::Explicit => None,
            m => Some(ExpathSolver::new(&self.graph, lg, scale, m.path_kind())),
        };
        Ctx { oracle: self, hp: &self.paths[node], lg, scale, solver }
    }

    fn check_query(&self, u: Vertex, v: Vertex, failures: &[Vertex]) -> Result<Vec<Vertex>> {
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
        if d.len() > self.params.d {
            return Err(Error::TooManyFailures { got: d.len(), max: self.params.d });
        }
        Ok(d)
    }

    /// `DecTree(u, v, D)` on the hierarchy path chosen for `D`.
    pub fn dec_tree(&self, u: Vertex, v: Vertex, failures: &[Vertex]) -> Result<(Weight, NodeHandle)> {
        let d = self.check_query(u, v, failures)?;
        let hp = self.hierarchy.find_path(&d)?;
        let mut ctx = self.context(hp.node);
        let mut forest = self.forests[hp.node].lock();
        let (w, id) = ctx.dec_tree(&mut forest, u, v, &d)?;
        Ok((w, NodeHandle { hierarchy_node: hp.node, node: id }))
    }

    /// The stored path of a decision-tree node, expanded.
    pub fn node_path(&self, h: NodeHandle) -> Result<Path> {
        let forest = self.forests[h.hierarchy_node].lock();
        let node = forest.nodes.get(h.node as usize).ok_or_else(|| Error::Internal("stale node handle".into()))?;
        node.path.expand(&self.levels[h.hierarchy_node])
    }

    /// `V(H)` for the query: `u`, `v`, then `N(f)` for every failure, minus `D`.
    pub fn aux_vertices(&self, u: Vertex, v: Vertex, failures: &[Vertex]) -> Result<Vec<Vertex>> {
        let d = self.check_query(u, v, failures)?;
        let hp = self.hierarchy.find_path(&d)?;
        Ok(self.vh(&hp, u, v, &d))
    }

    fn vh(&self, hp: &HierarchyPath, u: Vertex, v: Vertex, d: &[Vertex]) -> Vec<Vertex> {
        let mut set = Vec::new();
        for &f in d {
            for i in 1..=hp.p() {
                let Some(cover) = hp.cover(&self.hierarchy, i) else { continue };
                for &(t, local) in &cover.bunches[f as usize] {
                    let tree = &cover.trees[t as usize];
                    let local = local as usize;
                    if let Some(p) = tree.parent_of(local) {
                        set.push(tree.verts[p]);
                    }
                    set.extend(tree.children(local).filter(|&c| tree.trunk[c]).map(|c| tree.verts[c]));
                }
            }
        }
        set.sort_unstable();
        set.dedup();
        let mut out = vec![u];
        if v != u {
            out.push(v);
        }
        out.extend(set.into_iter().filter(|x| *x != u && *x != v && d.binary_search(x).is_err()));
        out
    }

    /// The complete auxiliary graph, every edge evaluated.
    pub fn aux_graph(&self, u: Vertex, v: Vertex, failures: &[Vertex]) -> Result<AuxGraph> {
        let d = self.check_query(u, v, failures)?;
        let hp = self.hierarchy.find_path(&d)?;
        let vertices = self.vh(&hp, u, v, &d);
        let k = vertices.len();
        let mut ctx = self.context(hp.node);
        let mut forest = self.forests[hp.node].lock();
        let mut weights = vec![INF; k * k];
        for i in 0..k {
            for j in 0..k {
                weights[i * k + j] =
                    if i == j { 0 } else { ctx.dec_tree(&mut forest, vertices[i], vertices[j], &d)?.0 };
            }
        }
        Ok(AuxGraph { vertices, weights })
    }

    pub fn query(&self, u: Vertex, v: Vertex, failures: &[Vertex]) -> Result<Weight> {
        Ok(self.answer(u, v, failures, false)?.estimate)
    }

    /// Estimate plus the concatenation of the stored paths along `π_H(u, v)`.
    pub fn query_with_path(&self, u: Vertex, v: Vertex, failures: &[Vertex]) -> Result<EpsAnswer> {
        self.answer(u, v, failures, true)
    }

    fn answer(&self, u: Vertex, v: Vertex, failures: &[Vertex], want_path: bool) -> Result<EpsAnswer> {
        let d = self.check_query(u, v, failures)?;
        if u == v {
            return Ok(EpsAnswer { estimate: 0, path: want_path.then(|| Path::trivial(u)), h_size: 1 });
        }
        let hp = self.hierarchy.find_path(&d)?;
        let vertices = self.vh(&hp, u, v, &d);
        let k = vertices.len();
        let mut ctx = self.context(hp.node);
        let mut forest = self.forests[hp.node].lock();
        // dense Dijkstra on H from u (index 0) to v (index 1), edges evaluated on demand
        let mut dist = vec![INF; k];
        let mut pred = vec![(usize::MAX, NONE); k];
        let mut done = vec![false; k];
        dist[0] = 0;
        loop {
            let Some(x) = (0..k).filter(|&i| !done[i] && dist[i] != INF).min_by_key(|&i| (dist[i], i)) else {
                break;
            };
            done[x] = true;
            if x == 1 {
                break;
            }
            for y in 0..k {
                if done[y] {
                    continue;
                }
                let (w, id) = ctx.dec_tree(&mut forest, vertices[x], vertices[y], &d)?;
                if w != INF && dist[x] + w < dist[y] {
                    dist[y] = dist[x] + w;
                    pred[y] = (x, id);
                }
            }
        }
        let estimate = dist[1];
        let path = if want_path && estimate != INF {
            let mut hops = Vec::new();
            let mut at = 1;
            while at != 0 {
                hops.push(pred[at].1);
                at = pred[at].0;
            }
            let mut walk = Path::trivial(u);
            for id in hops.into_iter().rev() {
                walk.extend(&ctx.expand(&forest.nodes[id as usize])?);
            }
            if walk.length != estimate {
                return Err(Error::Internal("retrieved path length differs from the estimate".into()));
            }
            Some(walk)
        } else {
            None
        };
        Ok(EpsAnswer { estimate, path, h_size: k })
    }
}

/// Query-local state for one hierarchy node.
struct Ctx<'a> {
    oracle: &'a EpsOracle,
    hp: &'a HierarchyPath,
    lg: &'a LevelGraphs,
    scale: GeometricScale,
    solver: Option<ExpathSolver<'a>>,
}

impl Ctx<'_> {
    fn make_node(&mut self, avoid: Vec<Vertex>, u: Vertex, v: Vertex, depth: u8) -> DtNode {
        let g = &self.oracle.graph;
        let (path, segs) = match &mut self.solver {
            None => {
                let blocked = g.mask(&avoid);
                let sp = canonical_sssp(g, u, SsspOptions { blocked: Some(&blocked), target: Some(v), ..Default::default() });
                let p = sp.path_to(v);
                let mut segs = Vec::new();
                if p.is_finite() {
                    let sp = segment(&p, g, self.scale);
                    segs = p.vertices.iter().zip(&sp.ids).filter_map(|(&x, s)| s.map(|s| (x, s))).collect();
                    segs.sort_unstable();
                }
                (CompressedPath::explicit(&p, g, u, v), segs)
            }
            Some(solver) => (solver.solve(&avoid, u, v), Vec::new()),
        };
        DtNode { avoid, path, segs, children: BTreeMap::new(), depth }
    }

    fn root(&mut self, forest: &mut Forest, u: Vertex, v: Vertex) -> u32 {
        if let Some(&id) = forest.roots.get(&(u, v)) {
            return id;
        }
        let node = self.make_node(Vec::new(), u, v, 0);
        let id = forest.nodes.len() as u32;
        forest.nodes.push(node);
        forest.roots.insert((u, v), id);
        id
    }

    fn expand(&self, node: &DtNode) -> Result<Path> {
        node.path.expand(self.lg)
    }

    fn child(&mut self, forest: &mut Forest, id: u32, key: (SegId, u8)) -> Result<u32> {
        if let Some(&c) = forest.nodes[id as usize].children.get(&key) {
            return Ok(c);
        }
        let node = &forest.nodes[id as usize];
        if node.depth as usize >= self.oracle.params.d {
            return Err(Error::Internal("decision tree walk exceeded depth d".into()));
        }
        let expanded = self.expand(node)?;
        let sp = segment(&expanded, &self.oracle.graph, self.scale);
        let x = sp.vertices_of(key.0);
        if x.is_empty() {
            return Err(Error::Internal(format!("segment {:?} absent from stored path", key.0)));
        }
        let mut avoid = node.avoid.clone();
        avoid.extend(x.into_iter().filter(|&y| self.hp.in_u(key.1 as usize, y)));
        avoid.sort_unstable();
        avoid.dedup();
        let (u, v, depth) = (node.path.source, node.path.target, node.depth + 1);
        let child = self.make_node(avoid, u, v, depth);
        let c = forest.nodes.len() as u32;
        forest.nodes.push(child);
        forest.nodes[id as usize].children.insert(key, c);
        Ok(c)
    }

    fn locate(&self, node: &DtNode, f: Vertex) -> Option<SegId> {
        if self.solver.is_none() {
            return node.segs.binary_search_by_key(&f, |e| e.0).ok().map(|i| node.segs[i].1);
        }
        node.path.locate(self.lg, f, &self.scale).and_then(|l| l.seg)
    }

    /// Algorithm DecTree: descend while the stored path meets `D`.
    fn dec_tree(&mut self, forest: &mut Forest, u: Vertex, v: Vertex, d: &[Vertex]) -> Result<(Weight, u32)> {
        let mut id = self.root(forest, u, v);
        loop {
            let node = &forest.nodes[id as usize];
            if !node.path.is_finite() {
                return Ok((INF, id));
            }
            let pick = d
                .iter()
                .filter_map(|&f| self.locate(node, f).map(|s| (self.hp.level(f), f, s)))
                .max_by_key(|&(l, f, _)| (l, std::cmp::Reverse(f)));
            let Some((l, _, seg)) = pick else {
                return Ok((node.path.length, id));
            };
            id = self.child(forest, id, (seg, l))?;
        }
    }
}
