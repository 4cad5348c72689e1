use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::expath::{GeometricScale, PathKind};
use crate::tree_cover::CoverParams;

/// How decision-tree nodes store their paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    Explicit,
    Expath,
    Bipath,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Explicit, Mode::Expath, Mode::Bipath];

    pub fn path_kind(self) -> PathKind {
        match self {
            Mode::Explicit => PathKind::Explicit,
            Mode::Expath => PathKind::Expath,
            Mode::Bipath => PathKind::Bipath,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Explicit => "eps-explicit",
            Mode::Expath => "eps-expath",
            Mode::Bipath => "eps-bipath",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eps-explicit" | "explicit" => Ok(Mode::Explicit),
            "eps-expath" | "expath" => Ok(Mode::Expath),
            "eps-bipath" | "bipath" => Ok(Mode::Bipath),
            _ => Err(invalid(format!("unknown mode {s:?}"))),
        }
    }
}

/// Parses `p/q` or an integer into a positive rational.
pub fn parse_ratio(s: &str) -> Result<Ratio<u128>> {
    let bad = || invalid(format!("not a rational p/q: {s:?}"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?),
        None => (s.trim().parse().map_err(|_| bad())?, 1u128),
    };
    if q == 0 {
        return Err(bad());
    }
    Ok(Ratio::new(p, q))
}

/// The accuracy parameters derived from `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpsParams {
    pub eps: Ratio<u128>,
    pub mode: Mode,
    pub k: usize,
    pub d: usize,
    /// Longest root-to-node path of the hierarchy.
    pub p: usize,
    pub s: u64,
    /// `|V(H)| ≤ d·p·⌈2e ln²n⌉·(s+1) + 2`
    pub hbound: u128,
    pub eps1: Ratio<u128>,
    pub eps2: Ratio<u128>,
    pub eps3: Ratio<u128>,
    pub eps4: Ratio<u128>,
    pub eps5: Ratio<u128>,
}

impl EpsParams {
    pub fn new(eps: Ratio<u128>, mode: Mode, cover: &CoverParams, p: usize) -> Result<Self> {
        let zero = Ratio::from_integer(0);
        let one = Ratio::from_integer(1u128);
        if eps <= zero || eps > one {
            return Err(invalid(format!("ε must lie in (0, 1], got {eps}")));
        }
        let k = cover.k as u128;
        let hbound = cover.d as u128 * p as u128 * cover.trees_per_vertex() as u128 * (cover.s as u128 + 1) + 2;
        let eps1 = eps / (Ratio::from_integer(2) + eps);
        let eps2 = eps1 / (2 * k - 1);
        let eps3 = eps / (2 * hbound);
        let eps4 = eps3 / (4 * k - 2);
        let eps5 = eps1 / (4 * k - 2);
        let two = Ratio::from_integer(2u128);
        let check = |e: Ratio<u128>, name: &str| {
            let x = one + e;
            if x * x >= two {
                return Err(invalid(format!("{name} = {e} violates (1+{name})² < 2")));
            }
            Ok(())
        };
        match mode {
            Mode::Explicit => {}
            Mode::Expath => check(eps4, "ε₄")?,
            Mode::Bipath => check(eps5, "ε₅")?,
        }
        Ok(Self { eps, mode, k: cover.k, d: cover.d, p, s: cover.s, hbound, eps1, eps2, eps3, eps4, eps5 })
    }

    /// The segmentation (and for compressed modes, path-cap) parameter.
    pub fn segment_eps(&self) -> Ratio<u128> {
        match self.mode {
            Mode::Explicit => self.eps2,
            Mode::Expath => self.eps4,
            Mode::Bipath => self.eps5,
        }
    }

    pub fn scale(&self) -> GeometricScale {
        let e = self.segment_eps();
        GeometricScale::new(*e.numer(), *e.denom())
    }

    /// Whether `estimate ≤ (1+ε)·exact`.
    pub fn within_stretch(&self, estimate: u64, exact: u64) -> bool {
        let (p, q) = (*self.eps.numer(), *self.eps.denom());
        estimate as u128 * q <= exact as u128 * (p + q)
    }
}
