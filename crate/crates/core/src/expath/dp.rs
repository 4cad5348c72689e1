//! Shortest expaths and bipaths by a dynamic program over piece indices.
//!
//! Round `j` of the program extends every frontier value by one optional edge
//! and one piece and keeps the results whose total is at most `(1+ε)^j`.
//! Rounds in which nothing new fits under the cap leave the table unchanged,
//! so the loop jumps straight to the first round whose cap admits the
//! smallest pending candidate. Frontier changes are propagated incrementally.

use std::collections::HashMap;
use std::rc::Rc;

use super::{Atom, CompressedPath, GeometricScale, PathKind};
use crate::graph::{Vertex, Weight, WeightedGraph, INF, NONE};
use crate::hierarchy::LevelGraphs;

/// `B = ⌈log_{1+ε}(nW)⌉`
pub fn diameter_index(g: &WeightedGraph, scale: &GeometricScale) -> u64 {
    scale.ceil_log(g.diameter_bound())
}

/// `π′`: for every ordered pair the shortest level path avoiding the given set.
pub struct PieceTable {
    n: usize,
    len: Vec<Weight>,
    level: Vec<u8>,
}

impl PieceTable {
    pub fn new(lg: &LevelGraphs, n: usize, avoid: &[Vertex], blocked: &[bool]) -> Self {
        let mut len = vec![INF; n * n];
        let mut level = vec![0u8; n * n];
        let mut intervals = Vec::with_capacity(avoid.len());
        for l in 1..=lg.p() as u8 {
            let ap = lg.get(l);
            for a in 0..n as Vertex {
                if blocked[a as usize] || !ap.contains(a) {
                    continue;
                }
                intervals.clear();
                intervals.extend(avoid.iter().filter_map(|&f| ap.subtree(a, f)));
                let row = a as usize * n;
                let dists = ap.dist_row(a);
                for b in 0..n {
                    let d = dists[b];
                    if d == INF || blocked[b] || d >= len[row + b] {
                        continue;
                    }
                    let pb = ap.preorder(a, b as Vertex);
                    if intervals.iter().any(|&(s, e)| s <= pb && pb < e) {
                        continue;
                    }
                    len[row + b] = d;
                    level[row + b] = l;
                }
            }
        }
        Self { n, len, level }
    }

    #[inline]
    pub fn len(&self, a: Vertex, b: Vertex) -> Weight {
        self.len[a as usize * self.n + b as usize]
    }

    #[inline]
    pub fn level(&self, a: Vertex, b: Vertex) -> u8 {
        self.level[a as usize * self.n + b as usize]
    }
}

#[derive(Debug, Clone, Copy)]
struct Step {
    j: i64,
    value: Weight,
    /// frontier vertex extended
    u: Vertex,
    /// start of the piece (after the optional edge u-z)
    z: Vertex,
    /// bipath middle vertex, `NONE` for single pieces
    m: Vertex,
}

struct Half {
    f: Vec<Weight>,
    hist: Vec<Vec<Step>>,
}

struct HalfDp<'a> {
    g: &'a WeightedGraph,
    table: &'a PieceTable,
    blocked: &'a [bool],
    forward: bool,
    two_hop: bool,
    scale: GeometricScale,
    b: u64,
}

impl HalfDp<'_> {
    /// Piece length in DP direction.
    #[inline]
    fn plen(&self, a: Vertex, b: Vertex) -> Weight {
        if self.forward {
            self.table.len(a, b)
        } else {
            self.table.len(b, a)
        }
    }

    fn run(&self, origin: Vertex) -> Half {
        let n = self.g.n();
        let mut f = vec![INF; n];
        let mut hist: Vec<Vec<Step>> = vec![Vec::new(); n];
        f[origin as usize] = 0;
        hist[origin as usize].push(Step { j: -1, value: 0, u: NONE, z: NONE, m: NONE });
        let mut gv = vec![INF; n];
        let mut garg = vec![NONE; n];
        let mut hv = vec![INF; n];
        let mut harg = vec![(NONE, NONE); n];
        let mut rv = vec![INF; n];
        let mut rarg = vec![(NONE, NONE, NONE); n];
        let mut mark = vec![false; n];
        let mut mark2 = vec![false; n];
        let mut changed = vec![origin];
        let mut j: i64 = -1;
        loop {
            // propagate frontier changes into g, h, r
            let mut gch = Vec::new();
            for &x in &changed {
                let fx = f[x as usize];
                if fx < gv[x as usize] {
                    gv[x as usize] = fx;
                    garg[x as usize] = x;
                    if !mark[x as usize] {
                        mark[x as usize] = true;
                        gch.push(x);
                    }
                }
                for &(y, w) in self.g.neighbors(x) {
                    let yi = y as usize;
                    if !self.blocked[yi] && fx + w < gv[yi] {
                        gv[yi] = fx + w;
                        garg[yi] = x;
                        if !mark[yi] {
                            mark[yi] = true;
                            gch.push(y);
                        }
                    }
                }
            }
            gch.sort_unstable();
            for &z in &gch {
                mark[z as usize] = false;
            }
            if self.two_hop {
                let mut hch = Vec::new();
                for &z in &gch {
                    let gz = gv[z as usize];
                    for m in 0..n as Vertex {
                        let pl = self.plen(z, m);
                        if pl != INF && gz + pl < hv[m as usize] {
                            hv[m as usize] = gz + pl;
                            harg[m as usize] = (garg[z as usize], z);
                            if !mark2[m as usize] {
                                mark2[m as usize] = true;
                                hch.push(m);
                            }
                        }
                    }
                }
                hch.sort_unstable();
                for &m in &hch {
                    mark2[m as usize] = false;
                    let hm = hv[m as usize];
                    let (u, z) = harg[m as usize];
                    for x in 0..n as Vertex {
                        let pl = self.plen(m, x);
                        if pl != INF && hm + pl < rv[x as usize] {
                            rv[x as usize] = hm + pl;
                            rarg[x as usize] = (u, z, m);
                        }
                    }
                }
            } else {
                for &z in &gch {
                    let gz = gv[z as usize];
                    let u = garg[z as usize];
                    for x in 0..n as Vertex {
                        let pl = self.plen(z, x);
                        if pl != INF && gz + pl < rv[x as usize] {
                            rv[x as usize] = gz + pl;
                            rarg[x as usize] = (u, z, NONE);
                        }
                    }
                }
            }
            // next round whose cap admits a pending candidate
            let best = (0..n).filter(|&x| rv[x] < f[x]).map(|x| rv[x]).min();
            let Some(best) = best else { break };
            let next = (j + 1).max(self.scale.ceil_log(best) as i64);
            if next as u64 > self.b {
                break;
            }
            changed.clear();
            for x in 0..n {
                if rv[x] < f[x] && self.scale.pow_ge(next as u64, rv[x]) {
                    f[x] = rv[x];
                    let (u, z, m) = rarg[x];
                    hist[x].push(Step { j: next, value: rv[x], u, z, m });
                    changed.push(x as Vertex);
                }
            }
            j = next;
        }
        Half { f, hist }
    }

    /// Steps from the origin to `x`, in DP order, each paired with the vertex it reaches.
    fn chain(&self, half: &Half, x: Vertex) -> Vec<(Step, Vertex)> {
        let mut out = Vec::new();
        let mut cur = x;
        let mut val = half.f[x as usize];
        loop {
            let step = *half.hist[cur as usize]
                .iter()
                .find(|s| s.value == val)
                .expect("dp history records every value used");
            if step.j < 0 {
                break;
            }
            let piece = if step.m == NONE {
                self.plen(step.z, cur)
            } else {
                self.plen(step.z, step.m) + self.plen(step.m, cur)
            };
            let edge = if step.u == step.z { 0 } else { self.g.weight(step.u, step.z).expect("edge") };
            out.push((step, cur));
            val -= piece + edge;
            cur = step.u;
        }
        out.reverse();
        out
    }
}

/// Computes shortest expaths or bipaths, reusing piece tables and half
/// programs across calls with the same avoid set.
pub struct ExpathSolver<'a> {
    g: &'a WeightedGraph,
    lg: &'a LevelGraphs,
    scale: GeometricScale,
    kind: PathKind,
    b: u64,
    tables: HashMap<Vec<Vertex>, Rc<(Vec<bool>, PieceTable)>>,
    halves: HashMap<(Vec<Vertex>, Vertex, bool), Rc<Half>>,
}

impl<'a> ExpathSolver<'a> {
    pub fn new(g: &'a WeightedGraph, lg: &'a LevelGraphs, scale: GeometricScale, kind: PathKind) -> Self {
        assert!(kind != PathKind::Explicit, "explicit paths need no solver");
        let b = diameter_index(g, &scale);
        Self { g, lg, scale, kind, b, tables: HashMap::new(), halves: HashMap::new() }
    }

    pub fn scale(&self) -> GeometricScale {
        self.scale
    }

    fn table(&mut self, avoid: &[Vertex]) -> Rc<(Vec<bool>, PieceTable)> {
        if let Some(t) = self.tables.get(avoid) {
            return t.clone();
        }
        let blocked = self.g.mask(avoid);
        let table = PieceTable::new(self.lg, self.g.n(), avoid, &blocked);
        let t = Rc::new((blocked, table));
        self.tables.insert(avoid.to_vec(), t.clone());
        t
    }

    fn half(&mut self, avoid: &[Vertex], origin: Vertex, forward: bool, table: &(Vec<bool>, PieceTable)) -> Rc<Half> {
        let key = (avoid.to_vec(), origin, forward);
        if let Some(h) = self.halves.get(&key) {
            return h.clone();
        }
        let dp = self.dp(table, forward);
        let h = Rc::new(dp.run(origin));
        self.halves.insert(key, h.clone());
        h
    }

    fn dp<'t>(&'t self, table: &'t (Vec<bool>, PieceTable), forward: bool) -> HalfDp<'t> {
        HalfDp {
            g: self.g,
            table: &table.1,
            blocked: &table.0,
            forward,
            two_hop: self.kind == PathKind::Bipath,
            scale: self.scale,
            b: self.b,
        }
    }

    /// Shortest path of the solver's kind from `s` to `t` in `G - avoid`.
    pub fn solve(&mut self, avoid: &[Vertex], s: Vertex, t: Vertex) -> CompressedPath {
        let kind = self.kind;
        if s == t {
            return CompressedPath { kind, source: s, target: t, length: 0, atoms: Vec::new() };
        }
        let mut avoid = avoid.to_vec();
        avoid.sort_unstable();
        avoid.dedup();
        let g = self.g;
        let n = g.n();
        let tab = self.table(&avoid);
        let first = self.half(&avoid, s, true, &tab);
        let second = self.half(&avoid, t, false, &tab);
        let (blocked, table) = (&tab.0, &tab.1);
        let mut best = (INF, NONE, NONE);
        for a in 0..n as Vertex {
            let fa = first.f[a as usize];
            if fa == INF {
                continue;
            }
            let fb = second.f[a as usize];
            if fb != INF && fa + fb < best.0 {
                best = (fa + fb, a, a);
            }
            for &(y, w) in g.neighbors(a) {
                let fy = second.f[y as usize];
                if fy != INF && !blocked[y as usize] && fa + w + fy < best.0 {
                    best = (fa + w + fy, a, y);
                }
            }
        }
        let (length, a, bv) = best;
        if length == INF {
            return CompressedPath::unreachable(kind, s, t);
        }
        let b = self.b;
        let fwd = self.dp(&tab, true);
        let bwd = self.dp(&tab, false);
        let mut atoms = Vec::new();
        for (st, x) in fwd.chain(&first, a) {
            if st.u != st.z {
                atoms.push(Atom::Edge { a: st.u, b: st.z, w: g.weight(st.u, st.z).expect("edge") });
            }
            let index = st.j as u64;
            atoms.push(if st.m == NONE {
                Atom::Sub { index, from: st.z, to: x, level: table.level(st.z, x) }
            } else {
                Atom::BiSub {
                    index,
                    from: st.z,
                    mid: st.m,
                    to: x,
                    levels: [table.level(st.z, st.m), table.level(st.m, x)],
                }
            });
        }
        if a != bv {
            atoms.push(Atom::Edge { a, b: bv, w: g.weight(a, bv).expect("edge") });
        }
        for (st, x) in bwd.chain(&second, bv).into_iter().rev() {
            let index = 2 * b + 1 - st.j as u64;
            atoms.push(if st.m == NONE {
                Atom::Sub { index, from: x, to: st.z, level: table.level(x, st.z) }
            } else {
                Atom::BiSub {
                    index,
                    from: x,
                    mid: st.m,
                    to: st.z,
                    levels: [table.level(x, st.m), table.level(st.m, st.z)],
                }
            });
            if st.u != st.z {
                atoms.push(Atom::Edge { a: st.z, b: st.u, w: g.weight(st.z, st.u).expect("edge") });
            }
        }
        CompressedPath { kind, source: s, target: t, length, atoms }
    }
}

/// Shortest ε-expath from `s` to `t` in `G - avoid`.
pub fn shortest_expath(
    g: &WeightedGraph,
    lg: &LevelGraphs,
    avoid: &[Vertex],
    s: Vertex,
    t: Vertex,
    scale: GeometricScale,
) -> CompressedPath {
    ExpathSolver::new(g, lg, scale, PathKind::Expath).solve(avoid, s, t)
}

/// Shortest ε-bipath from `s` to `t` in `G - avoid`.
pub fn shortest_bipath(
    g: &WeightedGraph,
    lg: &LevelGraphs,
    avoid: &[Vertex],
    s: Vertex,
    t: Vertex,
    scale: GeometricScale,
) -> CompressedPath {
    ExpathSolver::new(g, lg, scale, PathKind::Bipath).solve(avoid, s, t)
}
