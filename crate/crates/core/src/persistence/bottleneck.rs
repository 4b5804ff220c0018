//! Bottleneck distance between persistence diagrams.
//!
//! The optimal cost is one of finitely many candidates (a point-to-point
//! L∞ distance or a point-to-diagonal distance), so it is found exactly by
//! binary search over the sorted candidates, testing each with a perfect
//! matching on the usual doubled bipartite graph.

use super::matching::max_matching;
use super::PersistenceDiagram;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bottleneck {
    pub distance: f64,
    /// The diagrams have different numbers of essential classes; `distance`
    /// is infinite.
    pub essential_mismatch: bool,
}

fn linf(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

fn to_diagonal(a: (f64, f64)) -> f64 {
    (a.1 - a.0) / 2.0
}

fn feasible(a: &[(f64, f64)], b: &[(f64, f64)], t: f64) -> bool {
    let (n, m) = (a.len(), b.len());
    // Left: a_0..a_n, then diagonal copies of b. Right: b_0..b_m, then
    // diagonal copies of a.
    let mut adj: Vec<Vec<usize>> = Vec::with_capacity(n + m);
    for (i, &p) in a.iter().enumerate() {
        let mut row: Vec<usize> = (0..m).filter(|&j| linf(p, b[j]) <= t).collect();
        if to_diagonal(p) <= t {
            row.push(m + i);
        }
        adj.push(row);
    }
    for &q in b.iter() {
        let j = adj.len() - n;
        let mut row = Vec::with_capacity(n + 1);
        if to_diagonal(q) <= t {
            row.push(j);
        }
        row.extend(m..m + n);
        adj.push(row);
    }
    max_matching(&adj, n + m) == n + m
}

/// Bottleneck distance between two multisets of finite points
/// `(birth, death)`, points may be matched to the diagonal.
pub fn bottleneck_finite(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let mut candidates: Vec<f64> = vec![0.0];
    candidates.extend(a.iter().map(|&p| to_diagonal(p)));
    candidates.extend(b.iter().map(|&q| to_diagonal(q)));
    for &p in a {
        candidates.extend(b.iter().map(|&q| linf(p, q)));
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    // The largest candidate is always feasible.
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(a, b, candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    candidates[lo]
}

/// Distance between the dimension-`dim` parts of two diagrams. Essential
/// classes are matched only with essential classes, by birth.
pub fn bottleneck_distance(a: &PersistenceDiagram, b: &PersistenceDiagram, dim: u8) -> Bottleneck {
    let split = |d: &PersistenceDiagram| {
        let mut finite = Vec::new();
        let mut essential = Vec::new();
        for bar in d.bars().iter().filter(|x| x.dim == dim) {
            if bar.is_essential() {
                essential.push(bar.birth);
            } else {
                finite.push((bar.birth, bar.death));
            }
        }
        essential.sort_by(f64::total_cmp);
        (finite, essential)
    };
    let (fa, ea) = split(a);
    let (fb, eb) = split(b);
    if ea.len() != eb.len() {
        return Bottleneck {
            distance: f64::INFINITY,
            essential_mismatch: true,
        };
    }
    // Sorted order is optimal for matching points on a line.
    let essential = ea
        .iter()
        .zip(&eb)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    Bottleneck {
        distance: essential.max(bottleneck_finite(&fa, &fb)),
        essential_mismatch: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::persistence::Bar;

    #[test]
    fn identity_and_diagonal() {
        let a = [(0.0, 1.0), (2.0, 5.0)];
        assert_eq!(bottleneck_finite(&a, &a), 0.0);
        assert_eq!(bottleneck_finite(&[(0.0, 1.0)], &[]), 0.5);
        assert_eq!(bottleneck_finite(&[], &[]), 0.0);
    }

    #[test]
    fn two_point_example() {
        let a = [(0.0, 1.0), (2.0, 5.0)];
        let b = [(0.2, 1.1), (2.0, 4.0)];
        assert_eq!(bottleneck_finite(&a, &b), 1.0);
    }

    #[test]
    fn essential_handling() {
        let a = PersistenceDiagram::new("p", vec![Bar::essential(0, 0.0), Bar::new(0, 0.1, 0.4)]);
        let b = PersistenceDiagram::new("p", vec![Bar::essential(0, 0.3)]);
        let r = bottleneck_distance(&a, &b, 0);
        assert!(!r.essential_mismatch);
        assert!((r.distance - 0.3).abs() < 1e-15);
        let c = PersistenceDiagram::new("p", vec![]);
        let r = bottleneck_distance(&a, &c, 0);
        assert!(r.essential_mismatch && r.distance.is_infinite());
        // Dimension 1 is empty on both sides.
        assert_eq!(bottleneck_distance(&a, &c, 1).distance, 0.0);
    }
}
