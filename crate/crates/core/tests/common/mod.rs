//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{HashMap, HashSet};

use gaitsig::complex::SimplicialComplex;
use gaitsig::silhouette::BinaryImage3D;
use rand::Rng;

/// Rank over Z₂ of the matrix whose rows list the column indices of their
/// non-zero entries.
pub fn z2_rank(rows: &[Vec<usize>], ncols: usize) -> usize {
    let words = ncols.div_ceil(64).max(1);
    let mut m: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| {
            let mut bits = vec![0u64; words];
            for &c in r {
                bits[c / 64] ^= 1 << (c % 64);
            }
            bits
        })
        .collect();
    let mut rank = 0;
    for col in 0..ncols {
        let (w, b) = (col / 64, 1u64 << (col % 64));
        let Some(p) = (rank..m.len()).find(|&i| m[i][w] & b != 0) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != rank && row[w] & b != 0 {
                row.iter_mut().zip(&pivot).for_each(|(x, y)| *x ^= y);
            }
        }
        rank += 1;
    }
    rank
}

/// Betti numbers `[β₀, β₁, β₂]` from full boundary-matrix ranks.
pub fn betti(s: &SimplicialComplex) -> [usize; 3] {
    let (v, e, t) = (s.vertex_count(), s.edges().len(), s.triangles().len());
    let d1: Vec<Vec<usize>> = s
        .edges()
        .iter()
        .map(|e| vec![e[0] as usize, e[1] as usize])
        .collect();
    let index: HashMap<[u32; 2], usize> =
        s.edges().iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let d2: Vec<Vec<usize>> = s
        .triangles()
        .iter()
        .map(|&[a, b, c]| vec![index[&[a, b]], index[&[a, c]], index[&[b, c]]])
        .collect();
    let r1 = z2_rank(&d1, v);
    let r2 = z2_rank(&d2, e);
    [v - r1, e - r1 - r2, t - r2]
}

/// Number of squares that bound exactly one unit cube of the point set,
/// computed by brute force over all cubes and their six faces.
pub fn boundary_square_count(points: &[[i32; 3]]) -> usize {
    let set: HashSet<[i32; 3]> = points.iter().copied().collect();
    let mut faces: HashMap<([i32; 3], usize), usize> = HashMap::new();
    for &p in points {
        let corners =
            (0..8).map(|m| [p[0] + (m & 1), p[1] + ((m >> 1) & 1), p[2] + ((m >> 2) & 1)]);
        if corners.clone().all(|c| set.contains(&c)) {
            for axis in 0..3 {
                for side in 0..2 {
                    let mut base = p;
                    base[axis] += side;
                    *faces.entry((base, axis)).or_default() += 1;
                }
            }
        }
    }
    faces.values().filter(|&&c| c == 1).count()
}

/// Random foreground set inside a box of at most `max`³ points.
pub fn random_points<R: Rng>(rng: &mut R, max: i32, density: f64) -> Vec<[i32; 3]> {
    let (nx, ny, nz) = (
        rng.gen_range(2..=max),
        rng.gen_range(2..=max),
        rng.gen_range(2..=max),
    );
    let mut pts = Vec::new();
    for x in 0..nx {
        for y in 0..ny {
            for z in 0..nz {
                if rng.gen_bool(density) {
                    pts.push([x, y, z]);
                }
            }
        }
    }
    pts
}

/// Random image that holds at least one unit cube.
pub fn random_image<R: Rng>(rng: &mut R, max: i32) -> (Vec<[i32; 3]>, BinaryImage3D) {
    loop {
        let density = rng.gen_range(0.55..0.9);
        let pts = random_points(rng, max, density);
        if boundary_square_count(&pts) > 0 {
            let img = BinaryImage3D::from_points(pts.clone()).unwrap();
            return (pts, img);
        }
    }
}

fn linf(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

fn half(a: (f64, f64)) -> f64 {
    (a.1 - a.0) / 2.0
}

/// Bottleneck distance by enumerating every partial matching between the
/// two point sets; unmatched points go to the diagonal.
pub fn brute_bottleneck(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    fn go(
        i: usize,
        a: &[(f64, f64)],
        b: &[(f64, f64)],
        used: &mut Vec<bool>,
        cost: f64,
        best: &mut f64,
    ) {
        if cost >= *best {
            return;
        }
        if i == a.len() {
            let rest = b
                .iter()
                .zip(used.iter())
                .filter(|(_, &u)| !u)
                .map(|(&q, _)| half(q))
                .fold(cost, f64::max);
            *best = best.min(rest);
            return;
        }
        go(i + 1, a, b, used, cost.max(half(a[i])), best);
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                go(i + 1, a, b, used, cost.max(linf(a[i], b[j])), best);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    go(0, a, b, &mut vec![false; b.len()], 0.0, &mut best);
    best
}

/// Every permutation of `0..n`.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}
