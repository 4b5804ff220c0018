//! Persistence pairs in dimensions 0 and 1 over Z₂.
//!
//! Dimension 0 is computed with union-find under the elder rule. Dimension 1
//! comes from reducing triangle boundaries; rows of edges that already killed
//! a component are dropped from those columns before reduction, since such
//! edges can never be the pivot of a triangle column.

mod bottleneck;
mod matching;
pub mod reduction;
pub mod union_find;

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

pub use bottleneck::{bottleneck_distance, bottleneck_finite, Bottleneck};
pub use matching::max_matching;

use crate::error::{Error, Result};
use crate::filtration::{Filtration, Simplex};
use union_find::UnionFind;

/// Interval `[birth, death)`; `death` is infinite for essential classes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bar {
    pub dim: u8,
    pub birth: f64,
    pub death: f64,
}

impl Bar {
    pub fn new(dim: u8, birth: f64, death: f64) -> Self {
        Bar { dim, birth, death }
    }

    pub fn essential(dim: u8, birth: f64) -> Self {
        Bar {
            dim,
            birth,
            death: f64::INFINITY,
        }
    }

    pub fn is_essential(&self) -> bool {
        self.death == f64::INFINITY
    }

    pub fn length(&self) -> f64 {
        self.death - self.birth
    }

    /// Strictly positive length (essential bars included).
    pub fn is_positive(&self) -> bool {
        self.death > self.birth
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceDiagram {
    plane_id: String,
    bars: Vec<Bar>,
}

impl PersistenceDiagram {
    /// Bars are stored sorted by (dim, birth, death).
    pub fn new(plane_id: impl Into<String>, mut bars: Vec<Bar>) -> Self {
        bars.sort_by(|a, b| {
            a.dim
                .cmp(&b.dim)
                .then(a.birth.total_cmp(&b.birth))
                .then(a.death.total_cmp(&b.death))
        });
        PersistenceDiagram {
            plane_id: plane_id.into(),
            bars,
        }
    }

    pub fn plane_id(&self) -> &str {
        &self.plane_id
    }

    pub fn bars(&self) -> &[Bar] {
        &self.bars
    }

    /// Number of positive-length bars of dimension `dim`.
    pub fn positive_count(&self, dim: u8) -> usize {
        self.bars
            .iter()
            .filter(|b| b.dim == dim && b.is_positive())
            .count()
    }

    pub fn m0(&self) -> usize {
        self.positive_count(0)
    }

    pub fn m1(&self) -> usize {
        self.positive_count(1)
    }

    pub fn essential_count(&self, dim: u8) -> usize {
        self.bars
            .iter()
            .filter(|b| b.dim == dim && b.is_essential())
            .count()
    }

    /// Text form: a header `plane <id> m0 <m0> m1 <m1>` then one
    /// `dim birth death` line per bar, `inf` marking essential classes.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "plane {} m0 {} m1 {}\n",
            self.plane_id,
            self.m0(),
            self.m1()
        );
        for b in &self.bars {
            if b.is_essential() {
                let _ = writeln!(s, "{} {} inf", b.dim, b.birth);
            } else {
                let _ = writeln!(s, "{} {} {}", b.dim, b.birth, b.death);
            }
        }
        s
    }

    pub fn from_text(text: &str) -> std::result::Result<Self, String> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or("empty diagram file")?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 6 || h[0] != "plane" || h[2] != "m0" || h[4] != "m1" {
            return Err(format!("bad header `{header}`"));
        }
        let m0: usize = h[3].parse().map_err(|_| "bad m0 count")?;
        let m1: usize = h[5].parse().map_err(|_| "bad m1 count")?;
        let mut bars = Vec::new();
        for (n, line) in lines {
            let t: Vec<&str> = line.split_whitespace().collect();
            let bad = || format!("line {}: expected `dim birth death`", n + 1);
            if t.len() != 3 {
                return Err(bad());
            }
            let dim: u8 = t[0].parse().map_err(|_| bad())?;
            let birth: f64 = t[1].parse().map_err(|_| bad())?;
            let death: f64 = if t[2] == "inf" {
                f64::INFINITY
            } else {
                t[2].parse().map_err(|_| bad())?
            };
            if dim > 1 || !birth.is_finite() || death < birth {
                return Err(format!("line {}: invalid bar", n + 1));
            }
            bars.push(Bar { dim, birth, death });
        }
        let d = PersistenceDiagram::new(h[1], bars);
        if d.m0() != m0 || d.m1() != m1 {
            return Err(format!(
                "header counts m0={m0} m1={m1} disagree with bars (m0={}, m1={})",
                d.m0(),
                d.m1()
            ));
        }
        Ok(d)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text).map_err(|r| Error::parse(path, r))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

/// Bars of one dimension, optionally without the zero-length ones.
pub fn barcode(d: &PersistenceDiagram, dim: u8, positive_only: bool) -> Vec<Bar> {
    d.bars
        .iter()
        .filter(|b| b.dim == dim && (!positive_only || b.is_positive()))
        .copied()
        .collect()
}

/// Position of every simplex in filtration order, plus each simplex's
/// facets as positions. Fails if a facet is missing or comes later.
pub(crate) struct Indexed<'a> {
    pub simplices: Vec<(f64, &'a Simplex)>,
    pub facets: Vec<Vec<usize>>,
}

pub(crate) fn index_filtration(f: &Filtration) -> Result<Indexed<'_>> {
    let simplices: Vec<(f64, &Simplex)> = f.iter().collect();
    let mut position: HashMap<Simplex, usize> = HashMap::with_capacity(simplices.len());
    let mut facets = Vec::with_capacity(simplices.len());
    for (i, &(_, s)) in simplices.iter().enumerate() {
        let mut cols = Vec::new();
        for face in s.facets() {
            match position.get(&face) {
                Some(&j) => cols.push(j),
                None => {
                    return Err(Error::NonMonotone(format!(
                        "{s:?} enters before its face {face:?}"
                    )))
                }
            }
        }
        if position.insert(*s, i).is_some() {
            return Err(Error::NonMonotone(format!("{s:?} listed twice")));
        }
        cols.sort_unstable();
        facets.push(cols);
    }
    Ok(Indexed { simplices, facets })
}

/// Symmetric difference of two ascending index lists.
pub(crate) fn add_columns(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Dimension 0 and 1 persistence of a filtration.
///
/// Components merging at an edge follow the elder rule: the component whose
/// creating vertex entered later dies (within a level, the larger vertex id).
pub fn compute_persistence(f: &Filtration) -> Result<PersistenceDiagram> {
    let idx = index_filtration(f)?;
    let n = idx.simplices.len();
    let value = |i: usize| idx.simplices[i].0;

    let mut bars = Vec::new();
    // Dense union-find over filtration positions of vertices.
    let mut uf = UnionFind::new(n);
    // Oldest creator position, valid at roots.
    let mut oldest: Vec<usize> = (0..n).collect();
    let mut killer_edge = vec![false; n];
    let mut pivot_of = vec![usize::MAX; n];
    let mut reduced: Vec<Vec<usize>> = Vec::new();
    let mut positive_edges = Vec::new();

    for (i, &(v, s)) in idx.simplices.iter().enumerate() {
        match s.dim() {
            0 => {}
            1 => {
                let (a, b) = (uf.find(idx.facets[i][0]), uf.find(idx.facets[i][1]));
                if a == b {
                    positive_edges.push(i);
                    continue;
                }
                let (elder, younger) = if oldest[a] < oldest[b] {
                    (oldest[a], oldest[b])
                } else {
                    (oldest[b], oldest[a])
                };
                bars.push(Bar::new(0, value(younger), v));
                uf.union(a, b);
                let root = uf.find(a);
                oldest[root] = elder;
                killer_edge[i] = true;
            }
            _ => {
                let mut col: Vec<usize> = idx.facets[i]
                    .iter()
                    .copied()
                    .filter(|&e| !killer_edge[e])
                    .collect();
                while let Some(&low) = col.last() {
                    match pivot_of[low] {
                        usize::MAX => break,
                        j => col = add_columns(&col, &reduced[j]),
                    }
                }
                if let Some(&low) = col.last() {
                    bars.push(Bar::new(1, value(low), v));
                    pivot_of[low] = reduced.len();
                    reduced.push(col);
                }
            }
        }
    }
    for (i, &(_, s)) in idx.simplices.iter().enumerate() {
        if s.dim() == 0 && uf.find(i) == i {
            bars.push(Bar::essential(0, value(oldest[i])));
        }
    }
    for &e in &positive_edges {
        if pivot_of[e] == usize::MAX {
            bars.push(Bar::essential(1, value(e)));
        }
    }
    Ok(PersistenceDiagram::new(f.plane_id(), bars))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filtration::Level;

    pub(crate) fn worked_filtration() -> Filtration {
        // a..f = 0..5
        use Simplex::*;
        let (a, b, c, d, e, f) = (0, 1, 2, 3, 4, 5);
        let seq = [
            Vertex(b),
            Vertex(c),
            Edge([b, c]),
            Vertex(e),
            Edge([b, e]),
            Edge([c, e]),
            Vertex(a),
            Edge([a, b]),
            Edge([a, c]),
            Triangle([a, b, c]),
            Vertex(d),
            Edge([b, d]),
            Edge([d, e]),
            Triangle([b, d, e]),
            Vertex(f),
            Edge([e, f]),
            Edge([c, f]),
            Triangle([c, e, f]),
        ];
        Filtration::from_sequence("worked", &seq).unwrap()
    }

    #[test]
    fn worked_filtration_pairs() {
        let d = compute_persistence(&worked_filtration()).unwrap();
        let inf = f64::INFINITY;
        let got0: Vec<(f64, f64)> = barcode(&d, 0, false)
            .iter()
            .map(|b| (b.birth, b.death))
            .collect();
        let got1: Vec<(f64, f64)> = barcode(&d, 1, false)
            .iter()
            .map(|b| (b.birth, b.death))
            .collect();
        assert_eq!(
            got0,
            vec![
                (1.0, inf),
                (2.0, 3.0),
                (4.0, 5.0),
                (7.0, 8.0),
                (11.0, 12.0),
                (15.0, 16.0)
            ]
        );
        assert_eq!(
            got1,
            vec![(6.0, inf), (9.0, 10.0), (13.0, 14.0), (17.0, 18.0)]
        );
        assert_eq!(d.bars().iter().filter(|b| b.is_essential()).count(), 2);
    }

    #[test]
    fn zero_length_bars_are_kept_but_not_counted() {
        // Two vertices and an edge all in one level.
        let f = Filtration::from_levels(
            "p",
            vec![Level {
                value: 0.0,
                simplices: vec![
                    Simplex::Vertex(0),
                    Simplex::Vertex(1),
                    Simplex::Edge([0, 1]),
                ],
            }],
        )
        .unwrap();
        let d = compute_persistence(&f).unwrap();
        assert_eq!(d.bars(), &[Bar::new(0, 0.0, 0.0), Bar::essential(0, 0.0)]);
        assert_eq!(d.m0(), 1);
        assert_eq!(barcode(&d, 0, true), vec![Bar::essential(0, 0.0)]);
        assert_eq!(barcode(&d, 1, false), vec![]);
    }

    #[test]
    fn non_monotone_is_rejected() {
        let f = Filtration::from_sequence(
            "p",
            &[
                Simplex::Vertex(0),
                Simplex::Edge([0, 1]),
                Simplex::Vertex(1),
            ],
        )
        .unwrap();
        assert!(matches!(
            compute_persistence(&f),
            Err(Error::NonMonotone(_))
        ));
    }

    #[test]
    fn empty_barcode() {
        let d = PersistenceDiagram::new("p", vec![]);
        assert!(barcode(&d, 0, false).is_empty());
        assert_eq!((d.m0(), d.m1()), (0, 0));
    }

    #[test]
    fn text_format_roundtrip() {
        let d = compute_persistence(&worked_filtration()).unwrap();
        let text = d.to_text();
        assert!(text.starts_with("plane worked m0 6 m1 4\n"));
        assert!(text.contains("\n0 1 inf\n"));
        assert_eq!(PersistenceDiagram::from_text(&text).unwrap(), d);
        let wrong = text.replace("m0 6", "m0 5");
        assert!(PersistenceDiagram::from_text(&wrong)
            .unwrap_err()
            .contains("disagree"));
        assert!(PersistenceDiagram::from_text("plane p m0 0 m1 0\n0 2 1\n").is_err());
        assert!(PersistenceDiagram::from_text("").is_err());
    }

    #[test]
    fn column_addition() {
        assert_eq!(add_columns(&[1, 3, 5], &[3, 4]), vec![1, 4, 5]);
        assert_eq!(add_columns(&[2], &[2]), Vec::<usize>::new());
    }
}
