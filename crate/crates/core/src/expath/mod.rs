//! Path segmentation, succinct path representations and their construction.

mod dp;
mod scale;

pub use dp::{diameter_index, shortest_bipath, shortest_expath, ExpathSolver, PieceTable};
pub use scale::GeometricScale;

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Path, Vertex, Weight, WeightedGraph, INF};
use crate::hierarchy::LevelGraphs;

/// Identifier of an ε-segment: the floor-log class of the prefix (first half)
/// or of the suffix (second half) length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SegId {
    Prefix(u64),
    Suffix(u64),
}

/// Segment of an interior vertex at distance `prefix` from the start of a path of length `total`.
pub fn seg_id(prefix: Weight, total: Weight, scale: &GeometricScale) -> SegId {
    if 2 * prefix <= total {
        SegId::Prefix(scale.floor_log(prefix))
    } else {
        SegId::Suffix(scale.floor_log(total - prefix))
    }
}

#[derive(Debug, Clone)]
pub struct SegmentedPath {
    pub path: Path,
    pub scale: GeometricScale,
    /// Prefix length at every position.
    pub prefix: Vec<Weight>,
    /// Segment per position; `None` for the two endpoints.
    pub ids: Vec<Option<SegId>>,
}

impl SegmentedPath {
    /// Maximal runs of positions sharing a segment id.
    pub fn segments(&self) -> Vec<Range<usize>> {
        let mut out: Vec<Range<usize>> = Vec::new();
        for (i, id) in self.ids.iter().enumerate() {
            let Some(id) = id else { continue };
            match out.last_mut() {
                Some(r) if r.end == i && self.ids[r.start] == Some(*id) => r.end = i + 1,
                _ => out.push(i..i + 1),
            }
        }
        out
    }

    /// Length of the subpath spanned by a segment.
    pub fn span(&self, r: &Range<usize>) -> Weight {
        self.prefix[r.end - 1] - self.prefix[r.start]
    }

    pub fn vertices_of(&self, id: SegId) -> Vec<Vertex> {
        self.ids
            .iter()
            .zip(&self.path.vertices)
            .filter(|(s, _)| **s == Some(id))
            .map(|(_, &v)| v)
            .collect()
    }
}

/// Splits a finite path into ε-segments.
pub fn segment(path: &Path, g: &WeightedGraph, scale: GeometricScale) -> SegmentedPath {
    let vs = &path.vertices;
    let mut prefix = Vec::with_capacity(vs.len());
    let mut acc = 0;
    for (i, &v) in vs.iter().enumerate() {
        if i > 0 {
            acc += g.weight(vs[i - 1], v).expect("consecutive path vertices are adjacent");
        }
        prefix.push(acc);
    }
    let total = acc;
    let ids = (0..vs.len())
        .map(|i| (i > 0 && i + 1 < vs.len()).then(|| seg_id(prefix[i], total, &scale)))
        .collect();
    SegmentedPath { path: path.clone(), scale, prefix, ids }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PathKind {
    Explicit,
    Expath,
    Bipath,
}

/// One stored piece of a path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Atom {
    Edge { a: Vertex, b: Vertex, w: Weight },
    /// `π_{G_level}(from, to)` at piece index `index`.
    Sub { index: u64, from: Vertex, to: Vertex, level: u8 },
    /// `π_{G_i}(from, mid) ∘ π_{G_j}(mid, to)`.
    BiSub { index: u64, from: Vertex, mid: Vertex, to: Vertex, levels: [u8; 2] },
}

impl Atom {
    fn ends(&self) -> (Vertex, Vertex) {
        match *self {
            Atom::Edge { a, b, .. } => (a, b),
            Atom::Sub { from, to, .. } | Atom::BiSub { from, to, .. } => (from, to),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompressedPath {
    pub kind: PathKind,
    pub source: Vertex,
    pub target: Vertex,
    pub length: Weight,
    pub atoms: Vec<Atom>,
}

/// Where a vertex sits on a stored path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Location {
    pub prefix: Weight,
    pub seg: Option<SegId>,
}

impl CompressedPath {
    pub fn unreachable(kind: PathKind, source: Vertex, target: Vertex) -> Self {
        Self { kind, source, target, length: INF, atoms: Vec::new() }
    }

    pub fn explicit(path: &Path, g: &WeightedGraph, source: Vertex, target: Vertex) -> Self {
        if !path.is_finite() {
            return Self::unreachable(PathKind::Explicit, source, target);
        }
        let atoms = path
            .vertices
            .windows(2)
            .map(|e| Atom::Edge { a: e[0], b: e[1], w: g.weight(e[0], e[1]).expect("path edge") })
            .collect();
        Self { kind: PathKind::Explicit, source, target, length: path.length, atoms }
    }

    pub fn is_finite(&self) -> bool {
        self.length != INF
    }

    /// Finds `f` on the path via per-piece membership tests and reports its segment.
    pub fn locate(&self, lg: &LevelGraphs, f: Vertex, scale: &GeometricScale) -> Option<Location> {
        if !self.is_finite() {
            return None;
        }
        let at = |prefix: Weight| {
            let seg = (f != self.source && f != self.target).then(|| seg_id(prefix, self.length, scale));
            Some(Location { prefix, seg })
        };
        if f == self.source {
            return at(0);
        }
        let mut acc = 0;
        let sub = |from: Vertex, to: Vertex, level: u8| -> (Option<Weight>, Weight) {
            let ap = lg.get(level);
            let hit = (ap.contains(f) && ap.on_path(f, from, to)).then(|| ap.dist(from, f));
            (hit, ap.dist(from, to))
        };
        for atom in &self.atoms {
            match *atom {
                Atom::Edge { a, b, w } => {
                    if f == a {
                        return at(acc);
                    }
                    if f == b {
                        return at(acc + w);
                    }
                    acc += w;
                }
                Atom::Sub { from, to, level, .. } => {
                    let (hit, len) = sub(from, to, level);
                    if let Some(x) = hit {
                        return at(acc + x);
                    }
                    acc += len;
                }
                Atom::BiSub { from, mid, to, levels, .. } => {
                    let (hit, len) = sub(from, mid, levels[0]);
                    if let Some(x) = hit {
                        return at(acc + x);
                    }
                    acc += len;
                    let (hit, len) = sub(mid, to, levels[1]);
                    if let Some(x) = hit {
                        return at(acc + x);
                    }
                    acc += len;
                }
            }
        }
        None
    }

    /// The explicit vertex sequence.
    pub fn expand(&self, lg: &LevelGraphs) -> Result<Path> {
        if !self.is_finite() {
            return Ok(Path::unreachable());
        }
        let mut vs = vec![self.source];
        let mut length = 0;
        let piece = |from: Vertex, to: Vertex, level: u8, vs: &mut Vec<Vertex>| -> Result<Weight> {
            if level == 0 || level as usize > lg.p() {
                return Err(Error::Internal(format!("stale level reference {level}")));
            }
            let ap = lg.get(level);
            let d = ap.dist(from, to);
            if d == INF {
                return Err(Error::Internal(format!("no path {from}->{to} in level {level}")));
            }
            ap.append_path(from, to, vs);
            Ok(d)
        };
        for atom in &self.atoms {
            let (from, _) = atom.ends();
            if vs.last() != Some(&from) {
                return Err(Error::Internal("stored pieces are not contiguous".into()));
            }
            match *atom {
                Atom::Edge { b, w, .. } => {
                    vs.push(b);
                    length += w;
                }
                Atom::Sub { from, to, level, .. } => length += piece(from, to, level, &mut vs)?,
                Atom::BiSub { from, mid, to, levels, .. } => {
                    length += piece(from, mid, levels[0], &mut vs)?;
                    length += piece(mid, to, levels[1], &mut vs)?;
                }
            }
        }
        if vs.last() != Some(&self.target) || length != self.length {
            return Err(Error::Internal("expanded path does not match stored length".into()));
        }
        Ok(Path { vertices: vs, length })
    }

    /// Checks the structural constraints of the representation: contiguity,
    /// canonical pieces, avoidance of `avoid`, piece index order and caps.
    pub fn validate(
        &self,
        g: &WeightedGraph,
        lg: &LevelGraphs,
        avoid: &[Vertex],
        scale: &GeometricScale,
    ) -> std::result::Result<(), String> {
        if !self.is_finite() {
            return Ok(());
        }
        let path = self.expand(lg).map_err(|e| e.to_string())?;
        if path.weigh(g) != Some(self.length) {
            return Err("expanded path is not a path of the stored length".into());
        }
        if let Some(v) = path.vertices.iter().find(|v| avoid.contains(v)) {
            return Err(format!("path uses avoided vertex {v}"));
        }
        let b = diameter_index(g, scale);
        let mut acc = 0;
        let mut last_index: Option<u64> = None;
        for atom in &self.atoms {
            let (index, start_len, pieces): (u64, Weight, Vec<(Vertex, Vertex, u8)>) = match *atom {
                Atom::Edge { a, b, w } => {
                    if self.kind != PathKind::Explicit && g.weight(a, b) != Some(w) {
                        return Err(format!("({a},{b}) is not an edge of weight {w}"));
                    }
                    acc += w;
                    continue;
                }
                Atom::Sub { index, from, to, level } => (index, acc, vec![(from, to, level)]),
                Atom::BiSub { index, from, mid, to, levels } => {
                    if self.kind != PathKind::Bipath {
                        return Err("bipath piece in a non-bipath".into());
                    }
                    (index, acc, vec![(from, mid, levels[0]), (mid, to, levels[1])])
                }
            };
            for &(x, y, l) in &pieces {
                let ap = lg.get(l);
                if !ap.contains(x) || !ap.contains(y) || ap.dist(x, y) == INF {
                    return Err(format!("piece {x}->{y} is not a path of level {l}"));
                }
                acc += ap.dist(x, y);
            }
            if last_index.is_some_and(|li| index <= li) || index > 2 * b + 1 {
                return Err(format!("piece index {index} out of order"));
            }
            last_index = Some(index);
            let ok = if index <= b {
                scale.pow_ge(index, acc)
            } else {
                scale.pow_ge(2 * b + 1 - index, self.length - start_len)
            };
            if !ok {
                return Err(format!("piece {index} violates its length cap"));
            }
        }
        Ok(())
    }
}
