//! Synthetic walkers and the stability experiments.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::persistence::Bar;
use crate::pipeline::signature_of_frames;
use crate::signature::{angle_distance, cosine_score, window_of, SignatureConfig};
use crate::silhouette::{BitGrid, StackOptions};

/// Which pixels the silhouette noise may flip.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseRegion {
    /// Pixels whose 3x3 neighbourhood holds both foreground and background.
    #[default]
    Boundary,
    /// Every pixel of the clean silhouette's bounding box.
    Box,
    /// Every pixel of the frame.
    Frame,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkerParams {
    pub width: usize,
    pub height: usize,
    pub leg_length: f64,
    pub leg_width: f64,
    /// Peak swing angle of each leg from vertical, in degrees.
    pub amplitude_deg: f64,
    /// Frames per gait cycle.
    pub period: usize,
    pub cycles: usize,
    /// Per-pixel flip probability.
    pub noise_p: f64,
    pub noise_region: NoiseRegion,
    /// Draw head and torso above the hip.
    pub torso: bool,
    /// Rectangle hanging from the hip in front of the body.
    pub bag: bool,
    pub seed: u64,
}

impl Default for WalkerParams {
    fn default() -> Self {
        WalkerParams {
            width: 96,
            height: 96,
            leg_length: 40.0,
            leg_width: 8.0,
            amplitude_deg: 25.0,
            period: 20,
            cycles: 1,
            noise_p: 0.0,
            noise_region: NoiseRegion::Boundary,
            torso: true,
            bag: false,
            seed: 0,
        }
    }
}

impl WalkerParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.period < 4 {
            return bad(format!("period must be at least 4, got {}", self.period));
        }
        if self.cycles == 0 {
            return bad("cycles must be positive".into());
        }
        if !(self.amplitude_deg > 0.0 && self.amplitude_deg <= 60.0) {
            return bad(format!(
                "amplitude must lie in (0, 60] degrees, got {}",
                self.amplitude_deg
            ));
        }
        if !(0.0..=0.2).contains(&self.noise_p) {
            return bad(format!(
                "noise_p must lie in [0, 0.2], got {}",
                self.noise_p
            ));
        }
        if self.width < 8 || self.height < 8 {
            return bad("frame must be at least 8x8".into());
        }
        if !(self.leg_width >= 1.0 && self.leg_length >= 2.0) {
            return bad("legs must be at least 1 px wide and 2 px long".into());
        }
        let needed = self.leg_length
            + if self.torso {
                0.7 * self.leg_length + 4.0
            } else {
                0.0
            }
            + 4.0;
        if needed > self.height as f64 {
            return bad(format!(
                "figure needs {needed:.0} rows, frame has {}",
                self.height
            ));
        }
        if 2.0 * self.leg_length * self.amplitude_deg.to_radians().sin()
            + 2.0 * self.leg_width
            + 2.0
            > self.width as f64
        {
            return bad("stride does not fit the frame width".into());
        }
        Ok(())
    }

    pub fn frame_count(&self) -> usize {
        self.period * self.cycles
    }
}

fn fill_rect(g: &mut BitGrid, x0: f64, y0: f64, x1: f64, y1: f64) {
    for y in 0..g.height() {
        for x in 0..g.width() {
            let (cx, cy) = (x as f64 + 0.5, y as f64 + 0.5);
            if cx >= x0 && cx < x1 && cy >= y0 && cy < y1 {
                g.set(x, y, true);
            }
        }
    }
}

fn fill_leg(g: &mut BitGrid, hip: (f64, f64), angle: f64, length: f64, width: f64) {
    let (ux, uy) = (angle.sin(), angle.cos());
    for y in 0..g.height() {
        for x in 0..g.width() {
            let (dx, dy) = (x as f64 + 0.5 - hip.0, y as f64 + 0.5 - hip.1);
            let along = dx * ux + dy * uy;
            let across = (dx * uy - dy * ux).abs();
            if (0.0..=length).contains(&along) && across <= width / 2.0 {
                g.set(x, y, true);
            }
        }
    }
}

fn render(p: &WalkerParams, t: usize) -> BitGrid {
    let mut g = BitGrid::new(p.width, p.height).expect("validated size");
    let hip = (p.width as f64 / 2.0, p.height as f64 - 3.0 - p.leg_length);
    let swing = p.amplitude_deg.to_radians() * (2.0 * PI * t as f64 / p.period as f64).sin();
    fill_leg(&mut g, hip, swing, p.leg_length, p.leg_width);
    fill_leg(&mut g, hip, -swing, p.leg_length, p.leg_width);
    let half = p.leg_width + 1.0;
    if p.torso {
        let torso = 0.5 * p.leg_length;
        fill_rect(
            &mut g,
            hip.0 - half,
            hip.1 - torso,
            hip.0 + half,
            hip.1 + 1.0,
        );
        let head = 0.2 * p.leg_length;
        fill_rect(
            &mut g,
            hip.0 - head / 2.0,
            hip.1 - torso - head - 1.0,
            hip.0 + head / 2.0,
            hip.1 - torso,
        );
    }
    if p.bag {
        let top = hip.1 - 0.2 * p.leg_length;
        fill_rect(
            &mut g,
            hip.0 + half,
            top,
            hip.0 + half + p.leg_width,
            hip.1 + 0.3 * p.leg_length,
        );
    }
    g
}

fn noise_mask(g: &BitGrid, region: NoiseRegion) -> Vec<bool> {
    let (w, h) = (g.width(), g.height());
    match region {
        NoiseRegion::Frame => vec![true; w * h],
        NoiseRegion::Box => {
            let mut m = vec![false; w * h];
            if let Some(bb) = g.bounding_box() {
                for y in bb.top..=bb.bottom {
                    for x in bb.left..=bb.right {
                        m[y * w + x] = true;
                    }
                }
            }
            m
        }
        NoiseRegion::Boundary => {
            let mut m = vec![false; w * h];
            for y in 0..h {
                for x in 0..w {
                    let (mut fg, mut bg) = (false, false);
                    for ny in y.saturating_sub(1)..=(y + 1).min(h - 1) {
                        for nx in x.saturating_sub(1)..=(x + 1).min(w - 1) {
                            if g.get(nx, ny) {
                                fg = true;
                            } else {
                                bg = true;
                            }
                        }
                    }
                    m[y * w + x] = fg && bg;
                }
            }
            m
        }
    }
}

/// Two rectangular legs hinged at the hip swinging sinusoidally in
/// antiphase, one frame per time step, with optional i.i.d. pixel flips.
/// Deterministic given the parameters (including the seed).
pub fn synth_gait(p: &WalkerParams) -> Result<Vec<BitGrid>> {
    p.validate()?;
    let frames: Vec<BitGrid> = (0..p.frame_count())
        .into_par_iter()
        .map(|t| {
            let mut g = render(p, t);
            if p.noise_p > 0.0 {
                let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
                rng.set_stream(t as u64);
                let mask = noise_mask(&g, p.noise_region);
                for (i, &eligible) in mask.iter().enumerate() {
                    if eligible && rng.gen_bool(p.noise_p) {
                        let (x, y) = (i % g.width(), i / g.width());
                        g.set(x, y, !g.get(x, y));
                    }
                }
            }
            g
        })
        .collect();
    Ok(frames)
}

/// How many window boundaries a birth can straddle under perturbation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCount {
    /// `n` boundaries: `p = 2nε/k`.
    #[default]
    All,
    /// The `n − 1` interior boundaries: `p = 2(n−1)ε/k`.
    Interior,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub probability: f64,
    /// `ε ≤ k/(2n)`; outside this range the bound is computed but not meaningful.
    pub in_validity_window: bool,
}

/// Per-bar probability of a window change.
pub fn change_probability(n: usize, eps: f64, k: f64, boundaries: BoundaryCount) -> f64 {
    let b = match boundaries {
        BoundaryCount::All => n,
        BoundaryCount::Interior => n.saturating_sub(1),
    };
    (2.0 * b as f64 * eps / k).clamp(0.0, 1.0)
}

/// Lower bound on `P(‖V − W‖₁ ≤ m)`: the binomial CDF at `m` with `m_i`
/// trials and success probability [`change_probability`].
pub fn theoretical_bound(
    m_i: usize,
    n: usize,
    eps: f64,
    k: f64,
    m: usize,
    boundaries: BoundaryCount,
) -> Result<Bound> {
    if n == 0 || !(k > 0.0) || !(eps >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need n >= 1, k > 0, eps >= 0 (n = {n}, k = {k}, eps = {eps})"
        )));
    }
    let in_validity_window = eps <= k / (2.0 * n as f64);
    let p = change_probability(n, eps, k, boundaries);
    let probability = if m >= m_i || p == 0.0 {
        1.0
    } else if p == 1.0 {
        0.0
    } else {
        let (lp, lq) = (p.ln(), (1.0 - p).ln());
        let mut log_pmf = m_i as f64 * lq;
        let mut sum = log_pmf.exp();
        for j in 0..m {
            log_pmf += ((m_i - j) as f64).ln() - ((j + 1) as f64).ln() + lp - lq;
            sum += log_pmf.exp();
        }
        sum.min(1.0)
    };
    Ok(Bound {
        probability,
        in_validity_window,
    })
}

/// Shape of the per-endpoint perturbation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Perturbation {
    /// Uniform on `[0, ε]`.
    #[default]
    OneSided,
    /// Uniform on `[−ε, ε]`.
    Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityRow {
    pub m: usize,
    pub empirical: f64,
    pub theoretical: f64,
    /// Three binomial standard errors of the theoretical probability.
    pub margin: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub eps: f64,
    pub n: usize,
    pub k: f64,
    pub m_i: usize,
    pub trials: usize,
    pub seed: u64,
    pub boundaries: BoundaryCount,
    pub perturbation: Perturbation,
    /// `histogram[d]` = trials with `‖V − W‖₁ = d`.
    pub histogram: Vec<u64>,
    pub rows: Vec<StabilityRow>,
}

impl StabilityReport {
    pub fn row(&self, m: usize) -> Option<&StabilityRow> {
        self.rows.iter().find(|r| r.m == m)
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn to_table(&self) -> String {
        let mut s = format!(
            "eps={} n={} k={} m_i={} trials={} seed={}\n",
            self.eps, self.n, self.k, self.m_i, self.trials, self.seed
        );
        s.push_str("m\tempirical\ttheoretical\tmargin\tverdict\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{}\t{:.6}\t{:.6}\t{:.6}\t{}",
                r.m,
                r.empirical,
                r.theoretical,
                r.margin,
                if r.pass { "pass" } else { "FAIL" }
            );
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

fn birth_counts(births: impl Iterator<Item = f64>, h: f64, n: usize) -> Vec<i64> {
    let mut c = vec![0i64; n];
    for b in births {
        c[window_of(b, h, n)] += 1;
    }
    c
}

fn check_window(k: f64, n: usize, eps: f64, trials: usize) -> Result<()> {
    if n == 0 || !(k > 0.0) || trials == 0 {
        return Err(Error::InvalidParameter(
            "need n >= 1, k > 0 and trials >= 1".into(),
        ));
    }
    if !(eps >= 0.0 && eps <= k / (2.0 * n as f64)) {
        return Err(Error::InvalidParameter(format!(
            "eps = {eps} outside the validity window [0, k/(2n)] = [0, {}]",
            k / (2.0 * n as f64)
        )));
    }
    Ok(())
}

/// Shared trial loop. `draw` yields the unperturbed births of one trial.
#[allow(clippy::too_many_arguments)]
fn run_trials(
    m_i: usize,
    k: f64,
    n: usize,
    eps: f64,
    trials: usize,
    seed: u64,
    perturbation: Perturbation,
    boundaries: BoundaryCount,
    draw: impl Fn(&mut ChaCha8Rng) -> Vec<f64> + Sync,
) -> Result<StabilityReport> {
    check_window(k, n, eps, trials)?;
    let h = k / n as f64;
    let distances: Vec<usize> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let births = draw(&mut rng);
            let moved: Vec<f64> = births
                .iter()
                .map(|&b| {
                    b + match perturbation {
                        _ if eps == 0.0 => 0.0,
                        Perturbation::OneSided => rng.gen_range(0.0..=eps),
                        Perturbation::Symmetric => rng.gen_range(-eps..=eps),
                    }
                })
                .collect();
            let before = birth_counts(births.into_iter(), h, n);
            let after = birth_counts(moved.into_iter(), h, n);
            before
                .iter()
                .zip(&after)
                .map(|(a, b)| (a - b).unsigned_abs() as usize)
                .sum()
        })
        .collect();

    let max_d = distances.iter().copied().max().unwrap_or(0);
    let mut histogram = vec![0u64; max_d + 1];
    for &d in &distances {
        histogram[d] += 1;
    }
    let mut rows = Vec::with_capacity(m_i + 1);
    let mut cumulative = 0u64;
    for m in 0..=m_i {
        cumulative += histogram.get(m).copied().unwrap_or(0);
        let empirical = cumulative as f64 / trials as f64;
        let theoretical = theoretical_bound(m_i, n, eps, k, m, boundaries)?.probability;
        let margin = 3.0 * (theoretical * (1.0 - theoretical) / trials as f64).sqrt();
        rows.push(StabilityRow {
            m,
            empirical,
            theoretical,
            margin,
            pass: empirical >= theoretical - margin,
        });
    }
    Ok(StabilityReport {
        eps,
        n,
        k,
        m_i,
        trials,
        seed,
        boundaries,
        perturbation,
        histogram,
        rows,
    })
}

/// Monte Carlo check of the stability bound on a fixed barcode. Each trial
/// moves every positive bar's birth by an independent uniform draw, re-bins
/// the births (the odd entries of the windowed vector) and records the L1
/// change.
#[allow(clippy::too_many_arguments)]
pub fn perturb_and_compare(
    bars: &[Bar],
    k: f64,
    n: usize,
    eps: f64,
    trials: usize,
    seed: u64,
    perturbation: Perturbation,
    boundaries: BoundaryCount,
) -> Result<StabilityReport> {
    let births: Vec<f64> = bars
        .iter()
        .filter(|b| b.is_positive())
        .map(|b| b.birth)
        .collect();
    run_trials(
        births.len(),
        k,
        n,
        eps,
        trials,
        seed,
        perturbation,
        boundaries,
        |_| births.clone(),
    )
}

/// Like [`perturb_and_compare`], but every trial first draws `m_i` fresh
/// births uniformly on `[0, k)`, so the result averages over barcodes too.
#[allow(clippy::too_many_arguments)]
pub fn perturb_uniform(
    m_i: usize,
    k: f64,
    n: usize,
    eps: f64,
    trials: usize,
    seed: u64,
    perturbation: Perturbation,
    boundaries: BoundaryCount,
) -> Result<StabilityReport> {
    run_trials(
        m_i,
        k,
        n,
        eps,
        trials,
        seed,
        perturbation,
        boundaries,
        |rng| (0..m_i).map(|_| rng.gen_range(0.0..k)).collect(),
    )
}

/// `count` bars with births uniform on `[0, k)` and deaths uniform on
/// `(birth, k]`.
pub fn uniform_bars(count: usize, k: f64, seed: u64) -> Vec<Bar> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let birth = rng.gen_range(0.0..k);
            Bar::new(0, birth, k - rng.gen_range(0.0..k - birth))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleReport {
    pub cosine: f64,
    pub angle: f64,
}

/// Compares the signature of the first gait cycle with that of the whole
/// multi-cycle sequence of the same walker.
pub fn cycle_invariance(
    p: &WalkerParams,
    opts: &StackOptions,
    cfg: &SignatureConfig,
) -> Result<CycleReport> {
    if p.cycles < 2 {
        return Err(Error::InvalidParameter(
            "cycle experiment needs at least 2 cycles".into(),
        ));
    }
    let frames = synth_gait(p)?;
    let one = signature_of_frames(&frames[..p.period], opts, cfg)?;
    let all = signature_of_frames(&frames, opts, cfg)?;
    Ok(CycleReport {
        cosine: cosine_score(&one, &all)?,
        angle: angle_distance(&one, &all)?,
    })
}
