use crate::graph::WeightedGraph;

use super::level::{CoveringIndex, PolyLevel};

/// `E′` as a merge-sort tree: points `(p₁, p₂)` of `Λ × Λ` whose vertices are
/// equal or joined by an edge of weight `≤ ρ`.
#[derive(Debug, Clone)]
pub struct EdgeRangeTable {
    cover: CoveringIndex,
    /// Per node, the points with `p₁` in the node's interval as `(p₂, p₁)`, sorted.
    lists: Vec<Vec<(u32, u32)>>,
}

impl EdgeRangeTable {
    pub fn build(g: &WeightedGraph, level: &PolyLevel) -> Self {
        let mut occ = vec![Vec::new(); g.n()];
        for (p, &v) in level.lambda.iter().enumerate() {
            occ[v as usize].push(p as u32);
        }
        let cover = level.cover;
        let mut lists = vec![Vec::new(); cover.slots()];
        for (p1, &a) in level.lambda.iter().enumerate() {
            let leaf = &mut lists[cover.leaf(p1)];
            let light = g.neighbors(a).iter().filter(|e| e.1 <= level.rho).map(|e| e.0);
            for b in std::iter::once(a).chain(light) {
                leaf.extend(occ[b as usize].iter().map(|&p2| (p2, p1 as u32)));
            }
            leaf.sort_unstable();
        }
        for x in (1..cover.width).rev() {
            let mut merged = [lists[2 * x].as_slice(), lists[2 * x + 1].as_slice()].concat();
            merged.sort_unstable();
            lists[x] = merged;
        }
        Self { cover, lists }
    }

    pub fn len(&self) -> usize {
        self.lists.get(1).map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Some point of `E′ ∩ ([x1, x2) × [y1, y2))`.
    pub fn find(&self, x: (usize, usize), y: (usize, usize)) -> Option<(usize, usize)> {
        self.cover.decompose(x.0, x.1).into_iter().find_map(|node| {
            let l = &self.lists[node];
            let i = l.partition_point(|&(p2, _)| (p2 as usize) < y.0);
            l.get(i).filter(|&&(p2, _)| (p2 as usize) < y.1).map(|&(p2, p1)| (p1 as usize, p2 as usize))
        })
    }

    pub fn nonempty(&self, x: (usize, usize), y: (usize, usize)) -> bool {
        self.find(x, y).is_some()
    }
}
