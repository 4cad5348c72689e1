#![allow(dead_code)]

pub mod decompose;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vsdo::{Vertex, Weight, WeightedGraph, INF};

/// A connected random graph: a random spanning tree plus `extra` edges.
pub fn random_graph(n: usize, extra: usize, max_w: Weight, seed: u64) -> WeightedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for v in 1..n as Vertex {
        let u = rng.random_range(0..v);
        seen.insert((u, v));
        edges.push((u, v, rng.random_range(1..=max_w)));
    }
    let mut tries = 0;
    while edges.len() < n - 1 + extra && tries < 100 * (extra + 1) {
        tries += 1;
        let (a, b) = (rng.random_range(0..n as Vertex), rng.random_range(0..n as Vertex));
        if a == b || !seen.insert((a.min(b), a.max(b))) {
            continue;
        }
        edges.push((a, b, rng.random_range(1..=max_w)));
    }
    WeightedGraph::new(n, edges).unwrap()
}

/// Floyd–Warshall on `G − removed`.
pub fn floyd(g: &WeightedGraph, removed: &[Vertex]) -> Vec<Vec<Weight>> {
    let n = g.n();
    let mut d = vec![vec![INF; n]; n];
    for v in 0..n {
        if !removed.contains(&(v as Vertex)) {
            d[v][v] = 0;
        }
    }
    for &(a, b, w) in g.edges() {
        if removed.contains(&a) || removed.contains(&b) {
            continue;
        }
        d[a as usize][b as usize] = w;
        d[b as usize][a as usize] = w;
    }
    for k in 0..n {
        for i in 0..n {
            if d[i][k] == INF {
                continue;
            }
            for j in 0..n {
                if d[k][j] != INF && d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

/// Every simple `s`-`t` path avoiding `removed`, with its length.
pub fn simple_paths(g: &WeightedGraph, removed: &[Vertex], s: Vertex, t: Vertex) -> Vec<(Vec<Vertex>, Weight)> {
    fn go(
        g: &WeightedGraph,
        removed: &[Vertex],
        t: Vertex,
        cur: &mut Vec<Vertex>,
        len: Weight,
        on: &mut Vec<bool>,
        out: &mut Vec<(Vec<Vertex>, Weight)>,
    ) {
        let x = *cur.last().unwrap();
        if x == t {
            out.push((cur.clone(), len));
            return;
        }
        for &(y, w) in g.neighbors(x) {
            if on[y as usize] || removed.contains(&y) {
                continue;
            }
            on[y as usize] = true;
            cur.push(y);
            go(g, removed, t, cur, len + w, on, out);
            cur.pop();
            on[y as usize] = false;
        }
    }
    let mut out = Vec::new();
    if removed.contains(&s) || removed.contains(&t) {
        return out;
    }
    let mut on = vec![false; g.n()];
    on[s as usize] = true;
    go(g, removed, t, &mut vec![s], 0, &mut on, &mut out);
    out
}

/// The minimum under (length, hops, lexicographic sequence) by enumeration.
pub fn canonical_by_enumeration(g: &WeightedGraph, removed: &[Vertex], s: Vertex, t: Vertex) -> Option<(Vec<Vertex>, Weight)> {
    simple_paths(g, removed, s, t).into_iter().min_by(|a, b| (a.1, a.0.len(), &a.0).cmp(&(b.1, b.0.len(), &b.0)))
}

/// All subsets of `items` of size at most `k`.
pub fn subsets_upto(items: &[Vertex], k: usize) -> Vec<Vec<Vertex>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::new();
        for s in &frontier {
            let start = s.last().map_or(0, |&l| items.iter().position(|&x| x == l).unwrap() + 1);
            for &x in &items[start..] {
                let mut t: Vec<Vertex> = s.clone();
                t.push(x);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}
