//! Labelled signature collections: manifests, ranking and TP/TN curves.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signature::{angle_distance, cosine_score, GaitSignature};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    /// Sum of angles; smaller is closer.
    #[default]
    Angle,
    /// Mean cosine; larger is closer.
    Cosine,
}

impl Metric {
    pub fn score(self, a: &GaitSignature, b: &GaitSignature) -> Result<f64> {
        match self {
            Metric::Angle => angle_distance(a, b),
            Metric::Cosine => cosine_score(a, b),
        }
    }

    /// Score turned into a dissimilarity: the angle itself, or `1 − cos`.
    pub fn dissimilarity(self, a: &GaitSignature, b: &GaitSignature) -> Result<f64> {
        let s = self.score(a, b)?;
        Ok(match self {
            Metric::Angle => s,
            Metric::Cosine => 1.0 - s,
        })
    }
}

/// One `label path` line of a manifest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexEntry {
    pub label: Option<String>,
    pub path: PathBuf,
}

/// Plain text manifest, one `label path` pair per line. Paths are relative
/// to the manifest's directory; blank lines and `#` comments are skipped.
/// A line holding a single field is an unlabelled path.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GalleryIndex {
    pub entries: Vec<IndexEntry>,
}

impl GalleryIndex {
    pub fn parse(text: &str, base: &Path) -> std::result::Result<Self, String> {
        let mut entries = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let (label, path) = match fields.as_slice() {
                [p] => (None, *p),
                [l, p] => (Some(l.to_string()), *p),
                _ => return Err(format!("line {}: expected `label path`", no + 1)),
            };
            entries.push(IndexEntry {
                label,
                path: base.join(path),
            });
        }
        Ok(GalleryIndex { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base).map_err(|r| Error::parse(path, r))
    }

    /// Loads every signature (in parallel), requiring labels on all entries,
    /// unique labels when `unique`, and one shared config.
    pub fn load_signatures(&self, unique: bool) -> Result<Vec<(String, GaitSignature)>> {
        let mut labels = Vec::with_capacity(self.entries.len());
        for e in &self.entries {
            let l = e.label.clone().ok_or_else(|| {
                Error::InvalidParameter(format!("unlabelled entry {}", e.path.display()))
            })?;
            labels.push(l);
        }
        if unique {
            let mut sorted = labels.clone();
            sorted.sort();
            if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate gallery label {}",
                    w[0]
                )));
            }
        }
        let sigs: Vec<GaitSignature> = self
            .entries
            .par_iter()
            .map(|e| GaitSignature::load(&e.path))
            .collect::<Result<_>>()?;
        if let Some(first) = sigs.first() {
            if sigs.iter().any(|s| s.config() != first.config()) {
                return Err(Error::ConfigMismatch(
                    "gallery signatures use different configs".into(),
                ));
            }
        }
        Ok(labels.into_iter().zip(sigs).collect())
    }
}

/// Gallery labels ordered from closest to farthest, with their scores.
/// Ties are broken by label.
pub fn rank(
    probe: &GaitSignature,
    gallery: &[(String, GaitSignature)],
    metric: Metric,
) -> Result<Vec<(String, f64)>> {
    if gallery.is_empty() {
        return Err(Error::EmptyGallery);
    }
    let mut scored: Vec<(String, f64)> = gallery
        .par_iter()
        .map(|(l, g)| Ok((l.clone(), metric.score(probe, g)?)))
        .collect::<Result<_>>()?;
    scored.sort_by(|a, b| {
        let by_score = match metric {
            Metric::Angle => a.1.total_cmp(&b.1),
            Metric::Cosine => b.1.total_cmp(&a.1),
        };
        by_score.then_with(|| a.0.cmp(&b.0))
    });
    Ok(scored)
}

/// Fraction of probes whose top-ranked gallery label equals their own.
pub fn rank1_accuracy(
    probes: &[(String, GaitSignature)],
    gallery: &[(String, GaitSignature)],
    metric: Metric,
) -> Result<f64> {
    if probes.is_empty() {
        return Err(Error::InvalidParameter("no probes".into()));
    }
    let hits = probes
        .iter()
        .map(|(l, p)| Ok(rank(p, gallery, metric)?[0].0 == *l))
        .collect::<Result<Vec<bool>>>()?
        .into_iter()
        .filter(|&h| h)
        .count();
    Ok(hits as f64 / probes.len() as f64)
}

/// Genuine (same label) and impostor (different label) dissimilarities of
/// every probe against every gallery entry.
pub fn tp_tn_values(
    probes: &[(String, GaitSignature)],
    gallery: &[(String, GaitSignature)],
    metric: Metric,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if gallery.is_empty() {
        return Err(Error::EmptyGallery);
    }
    let mut tp = Vec::new();
    let mut tn = Vec::new();
    for (label, p) in probes {
        if !gallery.iter().any(|(l, _)| l == label) {
            return Err(Error::InvalidParameter(format!(
                "probe label {label} not in gallery"
            )));
        }
        let row: Vec<(bool, f64)> = gallery
            .par_iter()
            .map(|(l, g)| Ok((l == label, metric.dissimilarity(p, g)?)))
            .collect::<Result<_>>()?;
        for (same, d) in row {
            if same {
                tp.push(d);
            } else {
                tn.push(d);
            }
        }
    }
    Ok((tp, tn))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TpnRow {
    pub threshold: f64,
    /// Percentage of genuine values `≤ threshold`.
    pub tp: f64,
    /// Percentage of the retained impostor values `≤ threshold`.
    pub tn: f64,
}

/// Cumulative TP/TN percentages. The impostor set is first cut down to its
/// `|TP|` smallest values so that both curves rest on equal counts.
/// Thresholds are every distinct observed value, or a grid of step
/// `resolution` from 0 to the largest value.
pub fn tpn_curve(tp: &[f64], tn: &[f64], resolution: Option<f64>) -> Result<Vec<TpnRow>> {
    if tp.is_empty() {
        return Err(Error::InvalidParameter("no genuine pairs".into()));
    }
    let mut tp = tp.to_vec();
    tp.sort_by(f64::total_cmp);
    let mut tn = tn.to_vec();
    tn.sort_by(f64::total_cmp);
    tn.truncate(tp.len());

    let max = tp.iter().chain(&tn).copied().fold(0.0, f64::max);
    let thresholds: Vec<f64> = match resolution {
        Some(r) if !(r > 0.0 && r.is_finite()) => {
            return Err(Error::InvalidParameter(format!(
                "resolution must be positive, got {r}"
            )))
        }
        Some(r) => {
            let steps = (max / r).ceil() as usize;
            (0..=steps).map(|i| i as f64 * r).collect()
        }
        None => {
            let mut t: Vec<f64> = tp.iter().chain(&tn).copied().collect();
            t.sort_by(f64::total_cmp);
            t.dedup();
            t
        }
    };
    let pct = |v: &[f64], t: f64| {
        if v.is_empty() {
            0.0
        } else {
            100.0 * v.partition_point(|&x| x <= t) as f64 / v.len() as f64
        }
    };
    Ok(thresholds
        .into_iter()
        .map(|t| TpnRow {
            threshold: t,
            tp: pct(&tp, t),
            tn: pct(&tn, t),
        })
        .collect())
}
