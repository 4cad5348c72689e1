use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::INF;

use super::snapshot::AnyOracle;
use super::{brute_force, QueryRecord};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryResult {
    pub u: u32,
    pub v: u32,
    pub failures: Vec<u32>,
    /// Decimal rendering of the estimate, `"inf"` if disconnected.
    pub estimate: String,
    /// `None` when disconnected.
    pub exact: Option<u64>,
    pub ratio: Option<f64>,
    pub ok: bool,
    pub micros: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub oracle: String,
    pub n: usize,
    pub d: usize,
    pub stretch_bound: f64,
    pub queries: Vec<QueryResult>,
    pub max_ratio: f64,
    pub mean_ratio: f64,
    pub violations: usize,
    pub build_ms: Option<f64>,
    pub snapshot_bytes: Option<u64>,
}

fn render(x: &Option<num_rational::Ratio<u128>>) -> String {
    match x {
        None => "inf".into(),
        Some(r) if r.is_integer() => r.to_integer().to_string(),
        Some(r) => format!("{}/{}", r.numer(), r.denom()),
    }
}

fn ratio_f64(r: &num_rational::Ratio<u128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Answers every query against exact distances, computing missing ones by brute force.
pub fn evaluate(oracle: &AnyOracle, queries: &[QueryRecord], threads: usize) -> Result<EvalReport> {
    let run = |q: &QueryRecord| -> Result<QueryResult> {
        let t = Instant::now();
        let ans = oracle.query(q.u, q.v, &q.failures, false)?;
        let micros = t.elapsed().as_micros() as u64;
        let exact = match q.expected {
            Some(e) => e,
            None => brute_force(oracle.graph(), q.u, q.v, &q.failures)?,
        };
        let ratio = match &ans.estimate {
            Some(e) if exact != INF && exact > 0 => Some(ratio_f64(e) / exact as f64),
            Some(_) if exact == 0 => Some(1.0),
            _ => None,
        };
        let ok = oracle.within_contract(ans.estimate, exact);
        Ok(QueryResult {
            u: q.u,
            v: q.v,
            failures: q.failures.clone(),
            estimate: render(&ans.estimate),
            exact: (exact != INF).then_some(exact),
            ratio,
            ok,
            micros,
        })
    };
    let threads = threads.max(1);
    let chunk = queries.len().div_ceil(threads).max(1);
    let results: Vec<Result<Vec<QueryResult>>> = std::thread::scope(|s| {
        let handles: Vec<_> = queries.chunks(chunk).map(|c| s.spawn(move || c.iter().map(run).collect())).collect();
        handles.into_iter().map(|h| h.join().expect("eval worker panicked")).collect()
    });
    let mut out = Vec::with_capacity(queries.len());
    for r in results {
        out.extend(r?);
    }
    let ratios: Vec<f64> = out.iter().filter_map(|q| q.ratio).collect();
    Ok(EvalReport {
        schema_version: SCHEMA_VERSION,
        oracle: oracle.name(),
        n: oracle.n(),
        d: oracle.d(),
        stretch_bound: ratio_f64(&oracle.stretch_bound()),
        max_ratio: ratios.iter().copied().fold(1.0, f64::max),
        mean_ratio: if ratios.is_empty() { 1.0 } else { ratios.iter().sum::<f64>() / ratios.len() as f64 },
        violations: out.iter().filter(|q| !q.ok).count(),
        queries: out,
        build_ms: None,
        snapshot_bytes: None,
    })
}
