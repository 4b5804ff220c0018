//! Windowed barcode vectors and the sixteen-vector gait signature.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::filtration::{build_filtration, default_planes, ReferencePlane};
use crate::persistence::{barcode, compute_persistence, Bar, PersistenceDiagram};

pub const DEFAULT_WINDOWS: usize = 24;

/// How the even ("already born") entries are counted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VectorMode {
    /// Classes born before the window start and still alive at it.
    #[default]
    Alive,
    /// Every class born before the window start, dead or not.
    Literal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignatureConfig {
    /// Number of windows `n`; vectors have `2n` entries.
    pub n: usize,
    pub mode: VectorMode,
    pub planes: Vec<ReferencePlane>,
}

impl Default for SignatureConfig {
    fn default() -> Self {
        SignatureConfig {
            n: DEFAULT_WINDOWS,
            mode: VectorMode::Alive,
            planes: default_planes(),
        }
    }
}

impl SignatureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter(
                "window count n must be at least 1".into(),
            ));
        }
        if self.planes.is_empty() {
            return Err(Error::InvalidParameter("no reference planes".into()));
        }
        for p in &self.planes {
            p.validate()?;
        }
        Ok(())
    }

    fn check_same(&self, other: &SignatureConfig) -> Result<()> {
        if self.n != other.n {
            return Err(Error::ConfigMismatch(format!(
                "n = {} vs {}",
                self.n, other.n
            )));
        }
        if self.mode != other.mode {
            return Err(Error::ConfigMismatch(format!(
                "mode {:?} vs {:?}",
                self.mode, other.mode
            )));
        }
        if self.planes != other.planes {
            return Err(Error::ConfigMismatch("reference planes differ".into()));
        }
        Ok(())
    }
}

/// Index of the window `[s·h, (s+1)·h)` holding `birth`; births at or past
/// `n·h` fall in the last window.
pub(crate) fn window_of(birth: f64, h: f64, n: usize) -> usize {
    let mut s = ((birth / h).floor().max(0.0) as usize).min(n - 1);
    // Correct floating rounding so that s·h <= birth < (s+1)·h holds exactly.
    while s > 0 && s as f64 * h > birth {
        s -= 1;
    }
    while s + 1 < n && (s + 1) as f64 * h <= birth {
        s += 1;
    }
    s
}

/// The `2n` windowed counts of a barcode with `h = k/n`: entry `2s+1`
/// counts births in window `s`, entry `2s` counts classes born before
/// `s·h` (in [`VectorMode::Alive`], only those with death after `s·h`).
pub fn signature_vector(bars: &[Bar], k: f64, n: usize, mode: VectorMode) -> Result<Vec<u64>> {
    if n == 0 || !(k > 0.0) || !k.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "need n >= 1 and k > 0 (n = {n}, k = {k})"
        )));
    }
    let h = k / n as f64;
    let mut entries = vec![0u64; 2 * n];
    for b in bars {
        if !(b.birth >= 0.0 && b.birth <= k) {
            return Err(Error::BirthOutOfRange { birth: b.birth, k });
        }
        let w = window_of(b.birth, h, n);
        entries[2 * w + 1] += 1;
        for s in w + 1..n {
            let alive = b.death > s as f64 * h;
            if mode == VectorMode::Literal || alive {
                entries[2 * s] += 1;
            } else {
                break;
            }
        }
    }
    Ok(entries)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureVector {
    pub plane: String,
    pub dim: u8,
    pub entries: Vec<u64>,
}

/// Two vectors per plane (dimension 0 then 1), planes in config order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaitSignature {
    config: SignatureConfig,
    vectors: Vec<SignatureVector>,
}

impl GaitSignature {
    pub fn new(config: SignatureConfig, vectors: Vec<SignatureVector>) -> Result<Self> {
        config.validate()?;
        if vectors.len() != 2 * config.planes.len() {
            return Err(Error::InvalidParameter(format!(
                "{} vectors for {} planes",
                vectors.len(),
                config.planes.len()
            )));
        }
        for (i, v) in vectors.iter().enumerate() {
            let plane = &config.planes[i / 2].id;
            if v.plane != *plane || v.dim as usize != i % 2 {
                return Err(Error::InvalidParameter(format!(
                    "vector {i} is ({}, dim {}), expected ({plane}, dim {})",
                    v.plane,
                    v.dim,
                    i % 2
                )));
            }
            if v.entries.len() != 2 * config.n {
                return Err(Error::InvalidParameter(format!(
                    "vector {i} has {} entries, expected {}",
                    v.entries.len(),
                    2 * config.n
                )));
            }
        }
        Ok(GaitSignature { config, vectors })
    }

    pub fn config(&self) -> &SignatureConfig {
        &self.config
    }

    pub fn vectors(&self) -> &[SignatureVector] {
        &self.vectors
    }

    /// Every vector multiplied by `factor` (or just vector `index`).
    pub fn scaled(&self, factor: u64, index: Option<usize>) -> GaitSignature {
        let mut out = self.clone();
        for (i, v) in out.vectors.iter_mut().enumerate() {
            if index.is_none_or(|j| j == i) {
                v.entries.iter_mut().for_each(|e| *e *= factor);
            }
        }
        out
    }

    /// JSON with the config block first and one vector per line.
    pub fn to_json(&self) -> String {
        let mut s = String::from("{\n  \"config\": ");
        s.push_str(&serde_json::to_string(&self.config).expect("serializable"));
        s.push_str(",\n  \"vectors\": [\n");
        for (i, v) in self.vectors.iter().enumerate() {
            let sep = if i + 1 == self.vectors.len() { "" } else { "," };
            let _ = writeln!(
                s,
                "    {}{sep}",
                serde_json::to_string(v).expect("serializable")
            );
        }
        s.push_str("  ]\n}\n");
        s
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, String> {
        let raw: GaitSignature = serde_json::from_str(text).map_err(|e| e.to_string())?;
        GaitSignature::new(raw.config, raw.vectors).map_err(|e| e.to_string())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|r| Error::parse(path, r))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }
}

/// Per-plane intermediate results of a signature computation.
#[derive(Debug, Clone)]
pub struct PlaneResult {
    pub diagram: PersistenceDiagram,
    /// Largest vertex distance to the plane.
    pub k: f64,
}

/// Signature plus the diagrams it was computed from (one per plane).
pub fn gait_signature_detailed(
    s: &SimplicialComplex,
    cfg: &SignatureConfig,
) -> Result<(GaitSignature, Vec<PlaneResult>)> {
    cfg.validate()?;
    if s.is_empty() {
        return Err(Error::InvalidParameter("empty complex".into()));
    }
    let per_plane: Vec<(Vec<SignatureVector>, PlaneResult)> = cfg
        .planes
        .par_iter()
        .map(|plane| {
            let f = build_filtration(s, plane);
            let diagram = compute_persistence(&f)?;
            let k = f.max_value();
            let mut vs = Vec::with_capacity(2);
            for dim in 0..2u8 {
                let bars = barcode(&diagram, dim, true);
                vs.push(SignatureVector {
                    plane: plane.id.clone(),
                    dim,
                    entries: signature_vector(&bars, k, cfg.n, cfg.mode)?,
                });
            }
            Ok((vs, PlaneResult { diagram, k }))
        })
        .collect::<Result<_>>()?;
    let mut vectors = Vec::with_capacity(2 * per_plane.len());
    let mut planes = Vec::with_capacity(per_plane.len());
    for (vs, r) in per_plane {
        vectors.extend(vs);
        planes.push(r);
    }
    Ok((GaitSignature::new(cfg.clone(), vectors)?, planes))
}

pub fn gait_signature(s: &SimplicialComplex, cfg: &SignatureConfig) -> Result<GaitSignature> {
    gait_signature_detailed(s, cfg).map(|(sig, _)| sig)
}

fn norms(a: &[u64], b: &[u64]) -> (u128, u128, u128) {
    let mut dot = 0u128;
    let mut na = 0u128;
    let mut nb = 0u128;
    for (&x, &y) in a.iter().zip(b) {
        let (x, y) = (x as u128, y as u128);
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    (dot, na, nb)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

// Dividing out the gcd makes the floating-point result depend only on the
// direction, so positive integer rescaling cannot change it by a single ulp.
fn primitive(a: &[u64]) -> Vec<u64> {
    match a.iter().fold(0, |g, &x| gcd(g, x)) {
        0 | 1 => a.to_vec(),
        g => a.iter().map(|x| x / g).collect(),
    }
}

// Cauchy–Schwarz equality, decided on exact integers.
fn parallel(dot: u128, na: u128, nb: u128) -> bool {
    matches!((dot.checked_mul(dot), na.checked_mul(nb)), (Some(l), Some(r)) if l == r)
}

/// Cosine of the angle between two count vectors. Two zero vectors count
/// as parallel, a zero and a non-zero vector as orthogonal. Parallel
/// vectors give exactly 1.
pub fn vector_cosine(a: &[u64], b: &[u64]) -> f64 {
    let (dot, na, nb) = norms(&primitive(a), &primitive(b));
    match (na, nb) {
        (0, 0) => 1.0,
        (0, _) | (_, 0) => 0.0,
        _ if parallel(dot, na, nb) => 1.0,
        _ => (dot as f64 / ((na as f64).sqrt() * (nb as f64).sqrt())).clamp(-1.0, 1.0),
    }
}

/// Angle between two count vectors in degrees, same conventions as
/// [`vector_cosine`].
pub fn vector_angle(a: &[u64], b: &[u64]) -> f64 {
    let c = vector_cosine(a, b);
    if c == 1.0 {
        0.0
    } else if c == 0.0 {
        90.0
    } else {
        c.acos().to_degrees()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum AngleAggregate {
    /// Sum of the per-vector angles, in `[0, 90·vectors]`.
    #[default]
    Sum,
    Mean,
}

pub fn angle_distance_with(
    a: &GaitSignature,
    b: &GaitSignature,
    agg: AngleAggregate,
) -> Result<f64> {
    a.config.check_same(&b.config)?;
    let sum: f64 = a
        .vectors
        .iter()
        .zip(&b.vectors)
        .map(|(x, y)| vector_angle(&x.entries, &y.entries))
        .sum();
    Ok(match agg {
        AngleAggregate::Sum => sum,
        AngleAggregate::Mean => sum / a.vectors.len() as f64,
    })
}

/// Sum of the angles (degrees) between corresponding vectors.
pub fn angle_distance(a: &GaitSignature, b: &GaitSignature) -> Result<f64> {
    angle_distance_with(a, b, AngleAggregate::Sum)
}

/// Mean cosine similarity over corresponding vectors.
pub fn cosine_score(a: &GaitSignature, b: &GaitSignature) -> Result<f64> {
    a.config.check_same(&b.config)?;
    let sum: f64 = a
        .vectors
        .iter()
        .zip(&b.vectors)
        .map(|(x, y)| vector_cosine(&x.entries, &y.entries))
        .sum();
    Ok(sum / a.vectors.len() as f64)
}
