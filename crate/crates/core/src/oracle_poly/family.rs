use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::error::{invalid, Result};

use super::level::{CoveringIndex, PolyLevel};

/// An `(x, y)`-family over `[universe]`: for all disjoint `X, Y` with `|X| ≤ x`,
/// `|Y| ≤ y`, some member contains `X` and misses `Y`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct XyFamily {
    pub universe: usize,
    pub x: usize,
    pub y: usize,
    pub seed: u64,
    pub members: Vec<Bits>,
}

impl XyFamily {
    /// `⌈(x+y)^{x+y}/(x^x y^y) · ln(universe^{x+y})⌉ + 1`, as a float since it overflows quickly.
    pub fn required_size(universe: usize, x: usize, y: usize) -> f64 {
        let (xf, yf) = (x as f64, y as f64);
        let t = |a: f64| if a == 0.0 { 0.0 } else { a * a.ln() };
        let log = t(xf + yf) - t(xf) - t(yf);
        (log.exp() * (xf + yf) * (universe.max(2) as f64).ln()).ceil() + 1.0
    }

    /// Samples every element into every member independently with probability `x/(x+y)`.
    pub fn sample(universe: usize, x: usize, y: usize, seed: u64, max_members: usize) -> Result<Self> {
        if x == 0 {
            return Err(invalid("x must be positive"));
        }
        let need = Self::required_size(universe, x, y);
        if need > max_members as f64 {
            return Err(invalid(format!("(x,y)-family needs {need:.3e} members, limit is {max_members}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let members = (0..need as usize)
            .map(|_| {
                let mut b = Bits::new(universe);
                for e in 0..universe {
                    if rng.random_range(0..x + y) < x {
                        b.set(e);
                    }
                }
                b
            })
            .collect();
        Ok(Self { universe, x, y, seed, members })
    }

    /// Exhaustive check of the family property; returns a violating `(X, Y)` if any.
    pub fn audit(&self) -> Option<(Vec<usize>, Vec<usize>)> {
        let u = self.universe;
        assert!(u <= 20, "exhaustive audit only for tiny universes");
        let masks: Vec<u32> = self
            .members
            .iter()
            .map(|b| b.ones().fold(0u32, |m, e| m | 1 << e))
            .collect();
        let xs = self.x.min(u);
        for xm in 0u32..1 << u {
            if xm.count_ones() as usize != xs {
                continue;
            }
            let rest = !xm & ((1u32 << u) - 1);
            let ys = self.y.min(rest.count_ones() as usize);
            let mut ym = rest;
            loop {
                if ym.count_ones() as usize == ys && !masks.iter().any(|&s| s & xm == xm && s & ym == 0) {
                    let dec = |m: u32| (0..u).filter(|e| m >> e & 1 == 1).collect();
                    return Some((dec(xm), dec(ym)));
                }
                if ym == 0 {
                    break;
                }
                ym = (ym - 1) & rest;
            }
        }
        None
    }
}

/// The DAG `H = 𝓘₁ ∪ 𝒯₁ ∪ V₁ ∪ 𝒯₂ ∪ 𝓘₂` of one level, materialized.
#[derive(Debug, Clone)]
pub struct ExplicitDag {
    /// Covering members with a nonempty interval.
    pub intervals: Vec<usize>,
    pub trees: usize,
    pub n: usize,
    adj: Vec<Vec<usize>>,
}

impl ExplicitDag {
    pub fn build(level: &PolyLevel) -> Self {
        let cover: CoveringIndex = level.cover;
        let intervals: Vec<usize> = (1..cover.slots()).filter(|&m| cover.interval(m).0 < cover.len).collect();
        let (ni, nt, n) = (intervals.len(), level.trees.len(), level.containing.len());
        let total = 2 * ni + 2 * nt + n;
        let mut adj = vec![Vec::new(); total];
        let (t1, v1, t2, i2) = (ni, ni + nt, ni + nt + n, ni + 2 * nt + n);
        for (i, &m) in intervals.iter().enumerate() {
            for t in level.node_adj[m].ones() {
                adj[i].push(t1 + t);
                adj[t2 + t].push(i2 + i);
            }
        }
        for (t, tree) in level.trees.iter().enumerate() {
            for &x in &tree.verts {
                adj[t1 + t].push(v1 + x as usize);
                adj[v1 + x as usize].push(t2 + t);
            }
        }
        Self { intervals, trees: nt, n, adj }
    }

    fn layer(&self, which: usize) -> usize {
        let (ni, nt) = (self.intervals.len(), self.trees);
        [0, ni, ni + nt, ni + nt + self.n, ni + 2 * nt + self.n][which]
    }

    /// Index of a tree copy inside `V′ = 𝒯₁ ∪ 𝒯₂`.
    fn prime(&self, node: usize) -> Option<usize> {
        let (a, b, c) = (self.layer(1), self.layer(2), self.layer(3));
        if (a..b).contains(&node) {
            Some(node - a)
        } else if (c..c + self.trees).contains(&node) {
            Some(self.trees + node - c)
        } else {
            None
        }
    }

    /// Plain BFS: `I¹₁ ⇝ I²₂` avoiding the given `V′` elements.
    pub fn reach_avoiding(&self, a: usize, b: usize, blocked: &Bits) -> bool {
        let target = self.layer(4) + b;
        let mut seen = vec![false; self.adj.len()];
        let mut queue = VecDeque::from([a]);
        seen[a] = true;
        while let Some(x) = queue.pop_front() {
            if x == target {
                return true;
            }
            for &y in &self.adj[x] {
                if !seen[y] && !self.prime(y).is_some_and(|p| blocked.get(p)) {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        false
    }

    /// Both copies of every banned tree, as a `V′` subset.
    pub fn banned_copies(&self, banned: &Bits) -> Bits {
        let mut b = Bits::new(2 * self.trees);
        for t in banned.ones() {
            b.set(t);
            b.set(self.trees + t);
        }
        b
    }

    pub fn interval_index(&self, member: usize) -> Option<usize> {
        self.intervals.iter().position(|&m| m == member)
    }
}

/// Node-failure reachability on `H` through an `(x, y)`-family.
#[derive(Debug, Clone)]
pub struct FamilyReach {
    pub dag: ExplicitDag,
    pub family: XyFamily,
    /// Per member, per source interval: reachable target intervals.
    matrices: Vec<Vec<Bits>>,
}

impl FamilyReach {
    pub fn build(level: &PolyLevel, banned_max: usize, seed: u64, max_members: usize) -> Result<Self> {
        let dag = ExplicitDag::build(level);
        let family = XyFamily::sample(2 * dag.trees, 2, 2 * banned_max, seed, max_members)?;
        let ni = dag.intervals.len();
        let matrices = family
            .members
            .iter()
            .map(|s| {
                let mut blocked = Bits::new(2 * dag.trees);
                for e in 0..2 * dag.trees {
                    if !s.get(e) {
                        blocked.set(e);
                    }
                }
                (0..ni)
                    .map(|a| {
                        let mut row = Bits::new(ni);
                        for b in 0..ni {
                            if dag.reach_avoiding(a, b, &blocked) {
                                row.set(b);
                            }
                        }
                        row
                    })
                    .collect()
            })
            .collect();
        Ok(Self { dag, family, matrices })
    }

    /// Scans the family for a member avoiding the banned copies that connects the two intervals.
    pub fn reach(&self, a: usize, b: usize, banned: &Bits) -> Result<bool> {
        let k = banned.count();
        if 2 * k > self.family.y {
            return Err(invalid(format!("{k} banned trees exceed the family's y = {}", self.family.y)));
        }
        let copies = self.dag.banned_copies(banned);
        Ok(self
            .family
            .members
            .iter()
            .zip(&self.matrices)
            .any(|(s, m)| !s.intersects(&copies) && m[a].get(b)))
    }
}
