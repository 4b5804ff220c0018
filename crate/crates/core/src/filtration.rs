//! Reference planes, the plane-distance filter function and level-batched
//! filtrations of a surface.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};

/// Distances are grouped after rounding to this many decimal digits.
pub const LEVEL_DIGITS: i32 = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferencePlane {
    pub id: String,
    pub normal: [f64; 3],
    pub offset: f64,
}

impl ReferencePlane {
    pub fn new(id: impl Into<String>, normal: [f64; 3], offset: f64) -> Result<Self> {
        let plane = ReferencePlane {
            id: id.into(),
            normal,
            offset,
        };
        plane.validate()?;
        Ok(plane)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |reason: String| Error::BadPlane {
            id: self.id.clone(),
            reason,
        };
        if self.id.is_empty() || self.id.chars().any(char::is_whitespace) {
            return Err(bad("id must be non-empty and contain no whitespace".into()));
        }
        if !self.offset.is_finite() || self.normal.iter().any(|c| !c.is_finite()) {
            return Err(bad("non-finite coefficient".into()));
        }
        let norm = self.normal.iter().map(|c| c * c).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(bad(format!("normal has norm {norm}, expected 1")));
        }
        Ok(())
    }

    /// Unsigned distance `|normal·p − offset|`.
    pub fn distance(&self, p: [f64; 3]) -> f64 {
        let dot = self.normal[0] * p[0] + self.normal[1] * p[1] + self.normal[2] * p[2];
        (dot - self.offset).abs()
    }
}

fn axis_plane(id: &str, axis: usize, offset: f64) -> ReferencePlane {
    let mut normal = [0.0; 3];
    normal[axis] = 1.0;
    ReferencePlane {
        id: id.into(),
        normal,
        offset,
    }
}

fn oblique(id: &str, sx: f64, sy: f64, rhs: f64) -> ReferencePlane {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    ReferencePlane {
        id: id.into(),
        normal: [sx * r, sy * r, 0.0],
        offset: rhs * r,
    }
}

/// Which built-in set of eight planes to use.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlaneSet {
    /// Two vertical, two horizontal and four oblique planes.
    #[default]
    Oblique,
    /// Like `Oblique`, with the `x-y=1` and `y-x=1` planes replaced by the
    /// depth planes `z=0` and `z=1`.
    Depth,
}

impl PlaneSet {
    pub fn planes(self) -> Vec<ReferencePlane> {
        match self {
            PlaneSet::Oblique => default_planes(),
            PlaneSet::Depth => {
                let mut p = default_planes();
                p.truncate(6);
                p.push(axis_plane("z=0", 2, 0.0));
                p.push(axis_plane("z=1", 2, 1.0));
                p
            }
        }
    }
}

/// Vertical `x=0`, `x=1`; horizontal `y=0`, `y=1`; oblique `x+y=0`,
/// `x+y=2`, `x-y=1`, `y-x=1`. Each oblique plane touches one corner of the
/// unit square, so distances over `[0,1]³` reach `√2`.
pub fn default_planes() -> Vec<ReferencePlane> {
    vec![
        axis_plane("x=0", 0, 0.0),
        axis_plane("x=1", 0, 1.0),
        axis_plane("y=0", 1, 0.0),
        axis_plane("y=1", 1, 1.0),
        oblique("x+y=0", 1.0, 1.0, 0.0),
        oblique("x+y=2", 1.0, 1.0, 2.0),
        oblique("x-y=1", 1.0, -1.0, 1.0),
        oblique("y-x=1", -1.0, 1.0, 1.0),
    ]
}

#[derive(Deserialize)]
struct PlaneFile {
    plane: Vec<ReferencePlane>,
}

/// Parses a TOML plane list:
///
/// ```toml
/// [[plane]]
/// id = "x=0"
/// normal = [1.0, 0.0, 0.0]
/// offset = 0.0
/// ```
pub fn parse_planes(text: &str) -> std::result::Result<Vec<ReferencePlane>, String> {
    let file: PlaneFile = toml::from_str(text).map_err(|e| e.to_string())?;
    if file.plane.is_empty() {
        return Err("no planes defined".into());
    }
    for (i, p) in file.plane.iter().enumerate() {
        p.validate().map_err(|e| e.to_string())?;
        if file.plane[..i].iter().any(|q| q.id == p.id) {
            return Err(format!("duplicate plane id `{}`", p.id));
        }
    }
    Ok(file.plane)
}

pub fn load_planes(path: &Path) -> Result<Vec<ReferencePlane>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_planes(&text).map_err(|reason| Error::parse(path, reason))
}

/// A vertex, edge or triangle by (ascending) vertex ids. The derived order
/// sorts by dimension first, then by vertex tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Simplex {
    Vertex(u32),
    Edge([u32; 2]),
    Triangle([u32; 3]),
}

impl Simplex {
    pub fn dim(&self) -> usize {
        match self {
            Simplex::Vertex(_) => 0,
            Simplex::Edge(_) => 1,
            Simplex::Triangle(_) => 2,
        }
    }

    pub fn vertices(&self) -> &[u32] {
        match self {
            Simplex::Vertex(v) => std::slice::from_ref(v),
            Simplex::Edge(e) => e,
            Simplex::Triangle(t) => t,
        }
    }

    /// Codimension-one faces.
    pub fn facets(&self) -> Vec<Simplex> {
        match *self {
            Simplex::Vertex(_) => vec![],
            Simplex::Edge([a, b]) => vec![Simplex::Vertex(a), Simplex::Vertex(b)],
            Simplex::Triangle([a, b, c]) => vec![
                Simplex::Edge([a, b]),
                Simplex::Edge([a, c]),
                Simplex::Edge([b, c]),
            ],
        }
    }
}

/// Value of the filter function: a vertex's distance to the plane, or the
/// largest distance among a simplex's vertices.
pub fn filter_value(
    s: &SimplicialComplex,
    simplex: &Simplex,
    plane: &ReferencePlane,
) -> Result<f64> {
    let known = match *simplex {
        Simplex::Vertex(v) => (v as usize) < s.vertex_count(),
        Simplex::Edge(e) => s.has_edge(e),
        Simplex::Triangle(t) => s.has_triangle(t),
    };
    if !known {
        return Err(Error::UnknownSimplex(simplex.vertices().to_vec()));
    }
    Ok(simplex
        .vertices()
        .iter()
        .map(|&v| plane.distance(s.coords()[v as usize]))
        .fold(f64::NEG_INFINITY, f64::max))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    pub value: f64,
    pub simplices: Vec<Simplex>,
}

/// Simplices batched into levels of strictly increasing filter value.
#[derive(Debug, Clone, PartialEq)]
pub struct Filtration {
    plane_id: String,
    levels: Vec<Level>,
    max_value: f64,
}

impl Filtration {
    /// Builds a filtration from explicit levels. Values must strictly
    /// increase; simplices are sorted by dimension and id inside each level.
    /// The maximum value is the largest level holding a vertex.
    pub fn from_levels(plane_id: impl Into<String>, mut levels: Vec<Level>) -> Result<Self> {
        if levels.windows(2).any(|w| !(w[0].value < w[1].value)) {
            return Err(Error::NonMonotone(
                "level values must strictly increase".into(),
            ));
        }
        for l in &mut levels {
            l.simplices.sort_unstable();
        }
        let max_value = levels
            .iter()
            .filter(|l| l.simplices.iter().any(|s| s.dim() == 0))
            .map(|l| l.value)
            .fold(0.0, f64::max);
        Ok(Filtration {
            plane_id: plane_id.into(),
            levels,
            max_value,
        })
    }

    /// One simplex per level, with values `1, 2, 3, …` in the given order.
    pub fn from_sequence(plane_id: impl Into<String>, simplices: &[Simplex]) -> Result<Self> {
        let levels = simplices
            .iter()
            .enumerate()
            .map(|(i, s)| Level {
                value: (i + 1) as f64,
                simplices: vec![*s],
            })
            .collect();
        Self::from_levels(plane_id, levels)
    }

    pub fn plane_id(&self) -> &str {
        &self.plane_id
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// Largest vertex distance to the plane (`k`).
    pub fn max_value(&self) -> f64 {
        self.max_value
    }

    pub fn len(&self) -> usize {
        self.levels.iter().map(|l| l.simplices.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Simplices in filtration order with their level values.
    pub fn iter(&self) -> impl Iterator<Item = (f64, &Simplex)> {
        self.levels
            .iter()
            .flat_map(|l| l.simplices.iter().map(move |s| (l.value, s)))
    }
}

fn level_key(d: f64) -> i64 {
    (d * 10f64.powi(LEVEL_DIGITS)).round() as i64
}

/// Groups every simplex of `s` by its filter value with respect to `plane`.
pub fn build_filtration(s: &SimplicialComplex, plane: &ReferencePlane) -> Filtration {
    let dist: Vec<f64> = s.coords().iter().map(|&p| plane.distance(p)).collect();
    let keys: Vec<i64> = dist.iter().map(|&d| level_key(d)).collect();
    // Representative value per key: smallest exact distance that rounds to it.
    let mut rep: BTreeMap<i64, f64> = BTreeMap::new();
    for (&k, &d) in keys.iter().zip(&dist) {
        rep.entry(k).and_modify(|r| *r = r.min(d)).or_insert(d);
    }
    let slot: BTreeMap<i64, usize> = rep.keys().enumerate().map(|(i, &k)| (k, i)).collect();
    let mut levels: Vec<Level> = rep
        .values()
        .map(|&value| Level {
            value,
            simplices: Vec::new(),
        })
        .collect();

    let key_of = |vs: &[u32]| vs.iter().map(|&v| keys[v as usize]).max().unwrap();
    for v in 0..s.vertex_count() as u32 {
        levels[slot[&keys[v as usize]]]
            .simplices
            .push(Simplex::Vertex(v));
    }
    for &e in s.edges() {
        levels[slot[&key_of(&e)]].simplices.push(Simplex::Edge(e));
    }
    for &t in s.triangles() {
        levels[slot[&key_of(&t)]]
            .simplices
            .push(Simplex::Triangle(t));
    }
    // Vertices, edges and triangles were pushed in dimension then id order.
    let max_value = levels.last().map_or(0.0, |l| l.value);
    Filtration {
        plane_id: plane.id.clone(),
        levels,
        max_value,
    }
}

/// One filtration per plane, built in parallel, returned in plane order.
pub fn build_filtrations(s: &SimplicialComplex, planes: &[ReferencePlane]) -> Vec<Filtration> {
    planes.par_iter().map(|p| build_filtration(s, p)).collect()
}
