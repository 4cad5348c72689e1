use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::{Vertex, Weight, WeightedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GraphKind {
    ErdosRenyi,
    Grid,
    /// A hub joined to every vertex of a path.
    StarAugmented,
    PowerLaw,
}

impl GraphKind {
    pub const ALL: [GraphKind; 4] = [GraphKind::ErdosRenyi, GraphKind::Grid, GraphKind::StarAugmented, GraphKind::PowerLaw];
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GraphKind::ErdosRenyi => "erdos-renyi",
            GraphKind::Grid => "grid",
            GraphKind::StarAugmented => "star-augmented",
            GraphKind::PowerLaw => "power-law",
        })
    }
}

impl FromStr for GraphKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GraphKind::ALL
            .into_iter()
            .find(|k| k.to_string() == s)
            .ok_or_else(|| invalid(format!("unknown graph kind {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub kind: GraphKind,
    pub n: usize,
    pub seed: u64,
    pub min_weight: Weight,
    pub max_weight: Weight,
    /// Expected average degree for Erdős–Rényi graphs.
    pub avg_degree: f64,
}

impl GenSpec {
    pub fn new(kind: GraphKind, n: usize, seed: u64, max_weight: Weight) -> Self {
        Self { kind, n, seed, min_weight: 1, max_weight, avg_degree: 3.0 }
    }
}

/// Deterministic per seed; the result is connected (largest component, relabelled).
pub fn generate(spec: &GenSpec) -> Result<WeightedGraph> {
    if spec.n < 3 {
        return Err(invalid("generated graphs need n ≥ 3"));
    }
    if spec.min_weight == 0 || spec.min_weight > spec.max_weight {
        return Err(invalid("weight range must satisfy 1 ≤ min ≤ max"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    for _ in 0..64 {
        let pairs = topology(spec, &mut rng);
        let edges: Vec<(Vertex, Vertex, Weight)> = pairs
            .into_iter()
            .map(|(u, v)| (u, v, rng.random_range(spec.min_weight..=spec.max_weight)))
            .collect();
        let (n, edges) = largest_component(spec.n, edges);
        if n >= 3 {
            return WeightedGraph::new(n, edges);
        }
    }
    Err(invalid("could not generate a connected graph with at least 3 vertices"))
}

fn topology(spec: &GenSpec, rng: &mut ChaCha8Rng) -> Vec<(Vertex, Vertex)> {
    let n = spec.n;
    let mut out = Vec::new();
    match spec.kind {
        GraphKind::ErdosRenyi => {
            let p = (spec.avg_degree / (n - 1) as f64).min(1.0);
            for u in 0..n {
                for v in u + 1..n {
                    if rng.random_bool(p) {
                        out.push((u as Vertex, v as Vertex));
                    }
                }
            }
        }
        GraphKind::Grid => {
            let cols = (n as f64).sqrt().ceil() as usize;
            for x in 0..n {
                if (x + 1) % cols != 0 && x + 1 < n {
                    out.push((x as Vertex, x as Vertex + 1));
                }
                if x + cols < n {
                    out.push((x as Vertex, (x + cols) as Vertex));
                }
            }
        }
        GraphKind::StarAugmented => {
            for i in 1..n {
                out.push((0, i as Vertex));
                if i + 1 < n {
                    out.push((i as Vertex, i as Vertex + 1));
                }
            }
        }
        GraphKind::PowerLaw => {
            // preferential attachment, two edges per new vertex
            let mut ends: Vec<Vertex> = vec![0, 1];
            out.push((0, 1));
            for v in 2..n as Vertex {
                let mut picked: Vec<Vertex> = Vec::new();
                let want = 2.min(v as usize);
                while picked.len() < want {
                    let t = ends[rng.random_range(0..ends.len())];
                    if !picked.contains(&t) {
                        picked.push(t);
                    }
                }
                for t in picked {
                    out.push((t, v));
                    ends.push(t);
                    ends.push(v);
                }
            }
        }
    }
    out
}

fn largest_component(n: usize, edges: Vec<(Vertex, Vertex, Weight)>) -> (usize, Vec<(Vertex, Vertex, Weight)>) {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let nx = p[y];
            p[y] = r;
            y = nx;
        }
        r
    }
    for &(u, v, _) in &edges {
        let (a, b) = (find(&mut parent, u as usize), find(&mut parent, v as usize));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut size = vec![0usize; n];
    for x in 0..n {
        let r = find(&mut parent, x);
        size[r] += 1;
    }
    let best = (0..n).max_by_key(|&r| (size[r], std::cmp::Reverse(r))).expect("n > 0");
    let mut id = vec![u32::MAX; n];
    let mut next = 0;
    for x in 0..n {
        if find(&mut parent, x) == best {
            id[x] = next;
            next += 1;
        }
    }
    let edges = edges
        .into_iter()
        .filter(|e| id[e.0 as usize] != u32::MAX)
        .map(|(u, v, w)| (id[u as usize], id[v as usize], w))
        .collect();
    (next as usize, edges)
}
