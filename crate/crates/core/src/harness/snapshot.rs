use std::io::{Read, Write};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Path, Vertex, WeightedGraph, INF};
use crate::oracle_eps::EpsOracle;
use crate::oracle_poly::PolyOracle;
use crate::reductions::ScaledGraphFamily;

pub const MAGIC: &[u8; 4] = b"VSDO";
pub const VERSION: u32 = 1;

/// Any built oracle, as stored in a snapshot.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum AnyOracle {
    Eps(EpsOracle),
    Poly(PolyOracle),
    ScaledEps(ScaledGraphFamily<EpsOracle>),
    ScaledPoly(ScaledGraphFamily<PolyOracle>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Answer {
    /// `None` when the endpoints are disconnected in `G − D`.
    pub estimate: Option<Ratio<u128>>,
    pub path: Option<Path>,
}

impl AnyOracle {
    pub fn name(&self) -> String {
        match self {
            AnyOracle::Eps(o) => o.mode().to_string(),
            AnyOracle::Poly(_) => "poly".into(),
            AnyOracle::ScaledEps(f) => format!("scaled-{}", f.levels[0].oracle.mode()),
            AnyOracle::ScaledPoly(_) => "scaled-poly".into(),
        }
    }

    /// The original (unscaled) graph's vertex count.
    pub fn n(&self) -> usize {
        match self {
            AnyOracle::Eps(o) => o.n(),
            AnyOracle::Poly(o) => o.n(),
            AnyOracle::ScaledEps(f) => f.graph.n(),
            AnyOracle::ScaledPoly(f) => f.graph.n(),
        }
    }

    pub fn d(&self) -> usize {
        match self {
            AnyOracle::Eps(o) => o.config.d,
            AnyOracle::Poly(o) => o.config.d,
            AnyOracle::ScaledEps(f) => f.levels[0].oracle.config.d,
            AnyOracle::ScaledPoly(f) => f.levels[0].oracle.config.d,
        }
    }

    /// The graph answers refer to.
    pub fn graph(&self) -> &WeightedGraph {
        match self {
            AnyOracle::Eps(o) => &o.graph,
            AnyOracle::Poly(o) => &o.graph,
            AnyOracle::ScaledEps(f) => &f.graph,
            AnyOracle::ScaledPoly(f) => &f.graph,
        }
    }

    pub fn query(&self, u: Vertex, v: Vertex, failures: &[Vertex], want_path: bool) -> Result<Answer> {
        match self {
            AnyOracle::Eps(o) => {
                let a = if want_path {
                    o.query_with_path(u, v, failures)?
                } else {
                    crate::oracle_eps::EpsAnswer { estimate: o.query(u, v, failures)?, path: None, h_size: 0 }
                };
                let estimate = (a.estimate != INF).then(|| Ratio::from_integer(a.estimate as u128));
                Ok(Answer { estimate, path: a.path.filter(|p| p.is_finite()) })
            }
            AnyOracle::Poly(o) => {
                let a = o.query(u, v, failures)?;
                let path = match (want_path, a.index) {
                    (true, Some(i)) => o.decide(u, v, failures, i, true)?.certificate,
                    _ => None,
                };
                Ok(Answer { estimate: a.estimate.map(Ratio::from_integer), path })
            }
            AnyOracle::ScaledEps(f) => Ok(Answer { estimate: f.query(u, v, failures)?.0, path: None }),
            AnyOracle::ScaledPoly(f) => Ok(Answer { estimate: f.query(u, v, failures)?.0, path: None }),
        }
    }

    /// Largest allowed `estimate / exact`.
    pub fn stretch_bound(&self) -> Ratio<u128> {
        let one = Ratio::from_integer(1u128);
        let scale = |n: usize| one + Ratio::new(1, n.max(1) as u128);
        match self {
            AnyOracle::Eps(o) => one + o.params.eps,
            AnyOracle::Poly(o) => Ratio::from_integer(2 * o.a),
            AnyOracle::ScaledEps(f) => {
                let inner = one + f.levels[0].oracle.params.eps;
                if f.scaled { inner * scale(self.n()) } else { inner }
            }
            AnyOracle::ScaledPoly(f) => {
                let inner = Ratio::from_integer(2 * f.levels[0].oracle.a);
                if f.scaled { inner * scale(self.n()) } else { inner }
            }
        }
    }

    /// Whether an estimate honours the contract against the exact distance.
    pub fn within_contract(&self, estimate: Option<Ratio<u128>>, exact: u64) -> bool {
        match estimate {
            None => exact == INF,
            Some(e) => {
                exact != INF && e >= Ratio::from_integer(exact as u128) && e <= self.stretch_bound() * exact as u128
            }
        }
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        self.write_to(&mut out)?;
        Ok(out)
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        bincode::serialize_into(w, self).map_err(|e| Error::Snapshot(e.to_string()))
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut head = [0u8; 8];
        r.read_exact(&mut head).map_err(|_| Error::Snapshot("truncated header".into()))?;
        if &head[..4] != MAGIC {
            return Err(Error::Snapshot("bad magic, not a snapshot".into()));
        }
        let version = u32::from_le_bytes(head[4..].try_into().expect("4 bytes"));
        if version != VERSION {
            return Err(Error::Snapshot(format!("unsupported version {version}, expected {VERSION}")));
        }
        bincode::deserialize_from(r).map_err(|e| Error::Snapshot(e.to_string()))
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        Self::read_from(bytes)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_to(f)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::read_from(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}
