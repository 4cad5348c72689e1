use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::{WeightedGraph, INF};
use crate::oracle_eps::{EpsOracle, Mode};
use crate::oracle_poly::{certificate_bound, PolyOracle};
use crate::reductions::ScaledGraphFamily;

use super::snapshot::AnyOracle;
use super::{brute_force, random_queries};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub checked: usize,
    pub failures: Vec<String>,
}

impl Check {
    fn new(name: &str) -> Self {
        Self { name: name.into(), checked: 0, failures: Vec::new() }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok && self.failures.len() < 20 {
            self.failures.push(what());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

/// Re-checks stored structures and the stretch contract on `samples` random queries.
pub fn verify(oracle: &AnyOracle, samples: usize, seed: u64) -> Result<VerifyReport> {
    let g = oracle.graph();
    let queries = random_queries(g, oracle.d(), samples, seed);
    let mut contract = Check::new("stretch contract on sampled queries");
    for q in &queries {
        let exact = q.expected.expect("generated with exact distances");
        let ans = oracle.query(q.u, q.v, &q.failures, false)?;
        contract.record(oracle.within_contract(ans.estimate, exact), || {
            format!("{} -> {:?}, exact {exact}", q.to_line(), ans.estimate)
        });
    }
    let mut checks = vec![contract];
    match oracle {
        AnyOracle::Eps(o) => checks.push(verify_eps(o)?),
        AnyOracle::Poly(o) => checks.extend(verify_poly(o, &queries)),
        AnyOracle::ScaledEps(f) => checks.push(verify_scaled(f)),
        AnyOracle::ScaledPoly(f) => checks.push(verify_scaled(f)),
    }
    Ok(VerifyReport { checks })
}

fn verify_eps(o: &EpsOracle) -> Result<Check> {
    let mut c = Check::new("stored decision-tree paths");
    let scale = o.scale();
    for h in 0..o.hierarchy.len() {
        let lg = o.level_graphs(h);
        for (id, node) in o.forest(h).nodes.iter().enumerate() {
            let p = &node.path;
            c.record(p.validate(&o.graph, lg, &node.avoid, &scale).is_ok(), || {
                format!("node {h}/{id}: {:?}", p.validate(&o.graph, lg, &node.avoid, &scale))
            });
            if o.mode() == Mode::Explicit {
                let exact = brute_force(&o.graph, p.source, p.target, &node.avoid)?;
                c.record(exact == p.length, || format!("node {h}/{id}: length {} but δ = {exact}", p.length));
            }
        }
    }
    Ok(c)
}

fn verify_poly(o: &PolyOracle, queries: &[super::QueryRecord]) -> Vec<Check> {
    let mut pruning = Check::new("pruned trees and tour");
    let k = o.k() as u64;
    for h in 0..o.hierarchy.len() {
        for i in 0..=o.top {
            let l = o.level(h, i);
            let limit = (2 * k - 1) * l.rho;
            for t in &l.trees {
                pruning.record(t.depth.iter().all(|&x| x <= limit), || format!("tree {} at ρ={} too deep", t.root, l.rho));
            }
            let total: usize = l.trees.iter().map(|t| t.len()).sum();
            pruning.record(total == l.lambda.len(), || format!("|Λ| = {} ≠ {total}", l.lambda.len()));
        }
    }
    let mut decisions = Check::new("decision completeness and certificates");
    for q in queries {
        let exact = q.expected.expect("exact filled");
        for i in 0..=o.top {
            let rho = 1u64 << i;
            let Ok(r) = o.decide(q.u, q.v, &q.failures, i, true) else { continue };
            decisions.record(exact > rho || r.yes, || format!("{}: NO at ρ={rho} with δ={exact}", q.to_line()));
            if let Some(p) = r.certificate.filter(|_| r.yes) {
                let ok = exact != INF
                    && p.weigh(&o.graph) == Some(p.length)
                    && p.vertices.first() == Some(&q.u)
                    && p.vertices.last() == Some(&q.v)
                    && !p.vertices.iter().any(|x| q.failures.contains(x))
                    && p.length as u128 <= certificate_bound(o.k(), r.r_size, rho);
                decisions.record(ok, || format!("{}: bad certificate at ρ={rho}", q.to_line()));
            }
        }
    }
    vec![pruning, decisions]
}

fn verify_scaled<O>(f: &ScaledGraphFamily<O>) -> Check {
    let mut c = Check::new("scaled weights and monotone edge sets");
    let cube = (f.n as u128).pow(3);
    let edges = |g: &WeightedGraph| g.edges().iter().map(|e| (e.0, e.1)).collect::<std::collections::BTreeSet<_>>();
    for (i, l) in f.levels.iter().enumerate() {
        if f.scaled {
            c.record(l.graph.edges().iter().all(|e| e.2 as u128 <= cube), || format!("level {i} exceeds n³"));
        }
        if let Some(next) = f.levels.get(i + 1) {
            c.record(edges(&l.graph).is_subset(&edges(&next.graph)), || format!("level {i} not contained in {}", i + 1));
        }
    }
    c
}
