use std::collections::VecDeque;

use crate::bits::Bits;
use crate::graph::{Path, Vertex, Weight, WeightedGraph};

use super::level::PolyLevel;

/// One vertex of `R`: `{u}`, `{v}` or an affected subtree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RNode {
    /// Owning pruned tree.
    pub tree: u32,
    /// Local index of the component's top vertex.
    pub top: u32,
    /// Disjoint `Λ` intervals `[l, r)` whose union is the component.
    pub intervals: Vec<(u32, u32)>,
}

#[derive(Debug, Clone)]
pub struct AffectedDecomposition {
    /// Trees meeting `D`.
    pub affected: Bits,
    pub subtrees: Vec<RNode>,
}

impl AffectedDecomposition {
    pub fn affected_count(&self) -> usize {
        self.affected.count()
    }
}

/// Components of `T − D` holding a trunk vertex, for every tree meeting `D`.
pub fn affected_decomposition(level: &PolyLevel, failures: &[Vertex]) -> AffectedDecomposition {
    let mut affected = Bits::new(level.trees.len());
    for &f in failures {
        affected.or_with(&level.containing[f as usize]);
    }
    let mut subtrees = Vec::new();
    for ti in affected.ones() {
        let t = &level.trees[ti];
        let mut dead: Vec<usize> = failures.iter().filter_map(|&f| t.local(f)).collect();
        dead.sort_unstable();
        let mut tops = Vec::new();
        if dead.first() != Some(&0) {
            tops.push(0);
        }
        for &f in &dead {
            tops.extend(t.children(f).filter(|c| dead.binary_search(c).is_err()));
        }
        for top in tops {
            if !t.trunk[top] {
                continue;
            }
            let end = top + t.size[top] as usize;
            let mut intervals = Vec::new();
            let mut cur = top;
            for &f in dead.iter().filter(|&&f| f > top && f < end) {
                if f < cur {
                    continue;
                }
                if f > cur {
                    intervals.push((cur, f));
                }
                cur = f + t.size[f] as usize;
            }
            if cur < end {
                intervals.push((cur, end));
            }
            let off = t.offset as usize;
            subtrees.push(RNode {
                tree: ti as u32,
                top: top as u32,
                intervals: intervals.into_iter().map(|(l, r)| ((l + off) as u32, (r + off) as u32)).collect(),
            });
        }
    }
    AffectedDecomposition { affected, subtrees }
}

/// Aggregated bitsets of one `R` vertex.
struct Side {
    verts: Bits,
    closure: Bits,
    /// `adj(X) ∖ banned`
    adj: Bits,
    /// Trees sharing a vertex with some tree of `adj`, minus `banned`.
    reach: Bits,
}

impl Side {
    fn new(level: &PolyLevel, intervals: &[(u32, u32)], banned: &Bits) -> Self {
        let members: Vec<usize> =
            intervals.iter().flat_map(|&(l, r)| level.cover.decompose(l as usize, r as usize)).collect();
        let n = level.containing.len();
        let nt = level.trees.len();
        let (mut verts, mut closure, mut adj) = (Bits::new(n), Bits::new(n), Bits::new(nt));
        for &m in &members {
            verts.or_with(&level.node_verts[m]);
            closure.or_with(&level.node_closure[m]);
            adj.or_with(&level.node_adj[m]);
        }
        adj.and_not(banned);
        let mut reach = Bits::new(nt);
        for t in adj.ones() {
            reach.or_with(&level.overlap[t]);
        }
        reach.and_not(banned);
        Self { verts, closure, adj, reach }
    }

    fn edge(&self, o: &Side) -> bool {
        self.closure.intersects(&o.verts) || self.reach.intersects(&o.adj)
    }
}

#[derive(Debug, Clone)]
pub struct Decision {
    pub yes: bool,
    /// `|V(R)|`
    pub r_size: usize,
    /// Affected trees.
    pub affected: usize,
    /// Number of `R` vertices on the BFS path from `{u}` to `{v}`, when YES.
    pub hops: usize,
    pub certificate: Option<Path>,
}

/// `((12k−4)ℓ − 4k + 2)·ρ`
pub fn certificate_bound(k: usize, r_size: usize, rho: Weight) -> u128 {
    let k = k as u128;
    ((12 * k - 4) * r_size as u128 - 4 * k + 2) * rho as u128
}

/// Connectivity of `{u}` and `{v}` in `R`, with an optional witness path.
pub fn decide(
    g: &WeightedGraph,
    level: &PolyLevel,
    u: Vertex,
    v: Vertex,
    failures: &[Vertex],
    want_path: bool,
) -> Decision {
    if u == v {
        return Decision { yes: true, r_size: 1, affected: 0, hops: 0, certificate: Some(Path::trivial(u)) };
    }
    let dec = affected_decomposition(level, failures);
    let single = |x: Vertex| {
        let pos = level.own_root[x as usize];
        RNode { tree: level.owner[pos as usize], top: 0, intervals: vec![(pos, pos + 1)] }
    };
    let mut nodes = vec![single(u), single(v)];
    nodes.extend(dec.subtrees);
    let sides: Vec<Side> = nodes.iter().map(|x| Side::new(level, &x.intervals, &dec.affected)).collect();
    let r_size = nodes.len();
    let mut prev = vec![usize::MAX; r_size];
    prev[0] = 0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        if x == 1 {
            break;
        }
        for y in 0..r_size {
            if prev[y] == usize::MAX && sides[x].edge(&sides[y]) {
                prev[y] = x;
                queue.push_back(y);
            }
        }
    }
    let affected = dec.affected.count();
    if prev[1] == usize::MAX {
        return Decision { yes: false, r_size, affected, hops: 0, certificate: None };
    }
    let mut chain = vec![1];
    while *chain.last().unwrap() != 0 {
        chain.push(prev[*chain.last().unwrap()]);
    }
    chain.reverse();
    let certificate = want_path.then(|| {
        let banned = &dec.affected;
        let mut walk: Vec<Vertex> = vec![u];
        for w in chain.windows(2) {
            let hop = witness(g, level, &sides[w[0]], &sides[w[1]], banned);
            let t = &level.trees[nodes[w[0]].tree as usize];
            let here = *walk.last().unwrap();
            if here != hop[0] {
                let a = t.local(here).expect("walk stays in the component");
                let b = t.local(hop[0]).expect("witness starts in the component");
                walk.extend_from_slice(&t.path(a, b)[1..]);
            }
            walk.extend_from_slice(&hop[1..]);
        }
        debug_assert_eq!(walk.last(), Some(&v));
        let mut p = Path { vertices: walk, length: 0 };
        p.length = p.weigh(g).expect("witness walk uses graph edges");
        p.loop_erased(g)
    });
    Decision { yes: true, r_size, affected, hops: chain.len(), certificate }
}

fn light_edge(g: &WeightedGraph, from: &Bits, rho: Weight, to: impl Fn(Vertex) -> bool) -> Option<(Vertex, Vertex)> {
    from.ones().find_map(|a| {
        let a = a as Vertex;
        g.neighbors(a).iter().find(|&&(b, w)| w <= rho && to(b)).map(|&(b, _)| (a, b))
    })
}

/// The walk behind an `R` edge from `x` to `y`: at most `(8k−2)ρ` long.
fn witness(g: &WeightedGraph, level: &PolyLevel, x: &Side, y: &Side, banned: &Bits) -> Vec<Vertex> {
    let rho = level.rho;
    if let Some(b) = x.closure.first_common(&y.verts) {
        if x.verts.get(b) {
            return vec![b as Vertex];
        }
        let (a, _) = light_edge(g, &x.verts, rho, |z| z == b as Vertex).expect("closure member has a light edge");
        return vec![a, b as Vertex];
    }
    let t2 = x.reach.first_common(&y.adj).expect("R edge exists");
    let t1 = x.adj.ones().find(|&t| level.overlap[t].get(t2)).expect("overlap witness");
    debug_assert!(!banned.get(t1) && !banned.get(t2));
    let (tr1, tr2) = (&level.trees[t1], &level.trees[t2]);
    let mid = tr1.verts.iter().copied().find(|&z| tr2.contains(z)).expect("trees overlap");
    let (a, p1) = light_edge(g, &x.verts, rho, |z| tr1.contains(z)).expect("adjacent tree");
    let (b, p2) = light_edge(g, &y.verts, rho, |z| tr2.contains(z)).expect("adjacent tree");
    let mut out = vec![a];
    out.extend(tr1.path(tr1.local(p1).unwrap(), tr1.local(mid).unwrap()));
    let back = tr2.path(tr2.local(mid).unwrap(), tr2.local(p2).unwrap());
    out.extend_from_slice(&back[1..]);
    out.push(b);
    out
}
