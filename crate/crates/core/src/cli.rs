//! Command-line front end. Exit codes: 0 success, 1 usage, 2 data error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::filtration::{load_planes, PlaneSet};
use crate::gallery::{rank, tp_tn_values, tpn_curve, GalleryIndex, Metric};
use crate::persistence::{barcode, bottleneck_distance, PersistenceDiagram};
use crate::pipeline::extract;
use crate::pnm::write_frame;
use crate::signature::{GaitSignature, SignatureConfig, VectorMode};
use crate::silhouette::{load_dir, Alignment, StackOptions, DEFAULT_LEGS_FRACTION};
use crate::synthlab::{
    cycle_invariance, perturb_and_compare, perturb_uniform, synth_gait, uniform_bars,
    BoundaryCount, NoiseRegion, Perturbation, WalkerParams,
};

pub const PLANES_ENV: &str = "GAITSIG_PLANES";

#[derive(Parser, Debug)]
#[command(
    name = "gaitsig",
    version,
    about = "Topological gait signatures from silhouette sequences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute the signature of a directory of frames.
    Signature {
        dir: PathBuf,
        #[command(flatten)]
        stack: StackArgs,
        #[command(flatten)]
        config: ConfigArgs,
        /// Output file (default: stdout, with the summary on stderr).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compare two signature files.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value_t = MetricArg::Angle)]
        metric: MetricArg,
    },
    /// Rank gallery entries by closeness to a probe signature.
    Rank {
        probe: PathBuf,
        gallery: PathBuf,
        #[arg(long, value_enum, default_value_t = MetricArg::Angle)]
        metric: MetricArg,
    },
    /// Cumulative genuine/impostor percentages per threshold.
    TpnCurve {
        gallery: PathBuf,
        probes: PathBuf,
        #[arg(long, value_enum, default_value_t = MetricArg::Angle)]
        metric: MetricArg,
        /// Threshold grid step (default: every observed value).
        #[arg(long)]
        resolution: Option<f64>,
    },
    /// Print the barcode of one plane's filtration.
    Barcode {
        dir: PathBuf,
        #[command(flatten)]
        stack: StackArgs,
        #[command(flatten)]
        config: ConfigArgs,
        /// Plane id (default: the first plane).
        #[arg(long)]
        plane: Option<String>,
        #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
        dim: Option<u8>,
        #[arg(long)]
        positive_only: bool,
        /// Also save the (filtered) diagram to this file.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Bottleneck distance between two diagram files.
    Bottleneck {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
        dim: u8,
    },
    /// Write a synthetic walker as numbered PGM frames.
    Synth {
        #[command(flatten)]
        walker: WalkerArgs,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Monte Carlo check of the stability bound on uniform births.
    Stability {
        /// Draw one barcode up front instead of fresh births every trial.
        #[arg(long)]
        fixed: bool,
        #[arg(long, default_value_t = 50)]
        bars: usize,
        #[arg(long, default_value_t = 24)]
        n: usize,
        #[arg(long, default_value_t = 0.001)]
        eps: f64,
        #[arg(long, default_value_t = 0.9)]
        k: f64,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = PerturbationArg::OneSided)]
        perturbation: PerturbationArg,
        #[arg(long, value_enum, default_value_t = BoundariesArg::All)]
        boundaries: BoundariesArg,
        #[arg(long)]
        json: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compare one gait cycle with the whole multi-cycle sequence.
    Cycles {
        #[command(flatten)]
        walker: WalkerArgs,
        #[command(flatten)]
        stack: StackArgs,
        #[command(flatten)]
        config: ConfigArgs,
    },
}

#[derive(Args, Debug)]
struct StackArgs {
    /// Crop each frame to the legs (default).
    #[arg(long, conflicts_with = "full")]
    legs: bool,
    /// Keep the whole silhouette.
    #[arg(long)]
    full: bool,
    /// Fraction of the silhouette height kept by the legs crop.
    #[arg(long, default_value_t = DEFAULT_LEGS_FRACTION)]
    fraction: f64,
    #[arg(long, value_enum, default_value_t = AlignArg::Left)]
    align: AlignArg,
}

impl StackArgs {
    fn options(&self) -> StackOptions {
        StackOptions {
            legs: !self.full,
            fraction: self.fraction,
            alignment: match self.align {
                AlignArg::Left => Alignment::Left,
                AlignArg::Center => Alignment::Center,
            },
        }
    }
}

#[derive(Args, Debug)]
struct ConfigArgs {
    /// Number of windows per vector.
    #[arg(long, default_value_t = crate::signature::DEFAULT_WINDOWS)]
    n: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Alive)]
    mode: ModeArg,
    /// TOML file of reference planes.
    #[arg(long, env = PLANES_ENV)]
    planes: Option<PathBuf>,
    /// Built-in plane set; takes precedence over a plane file.
    #[arg(long, value_enum)]
    plane_set: Option<PlaneSetArg>,
}

impl ConfigArgs {
    fn config(&self) -> Result<SignatureConfig> {
        let planes = match (&self.planes, self.plane_set) {
            (_, Some(PlaneSetArg::Depth)) => PlaneSet::Depth.planes(),
            (_, Some(PlaneSetArg::Oblique)) => PlaneSet::Oblique.planes(),
            (Some(p), None) => load_planes(p)?,
            (None, None) => PlaneSet::Oblique.planes(),
        };
        let cfg = SignatureConfig {
            n: self.n,
            mode: match self.mode {
                ModeArg::Alive => VectorMode::Alive,
                ModeArg::Literal => VectorMode::Literal,
            },
            planes,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args, Debug)]
struct WalkerArgs {
    #[arg(long, default_value_t = 96)]
    width: usize,
    #[arg(long, default_value_t = 96)]
    height: usize,
    #[arg(long, default_value_t = 40.0)]
    leg_length: f64,
    #[arg(long, default_value_t = 8.0)]
    leg_width: f64,
    /// Peak leg swing in degrees.
    #[arg(long, default_value_t = 25.0)]
    amplitude: f64,
    #[arg(long, default_value_t = 20)]
    period: usize,
    #[arg(long, default_value_t = 2)]
    cycles: usize,
    /// Per-pixel flip probability.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, value_enum, default_value_t = NoiseRegionArg::Boundary)]
    noise_region: NoiseRegionArg,
    /// Legs only, no torso or head.
    #[arg(long)]
    no_torso: bool,
    /// Add a bag hanging from the hip.
    #[arg(long)]
    bag: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl WalkerArgs {
    fn params(&self) -> WalkerParams {
        WalkerParams {
            width: self.width,
            height: self.height,
            leg_length: self.leg_length,
            leg_width: self.leg_width,
            amplitude_deg: self.amplitude,
            period: self.period,
            cycles: self.cycles,
            noise_p: self.noise,
            noise_region: match self.noise_region {
                NoiseRegionArg::Boundary => NoiseRegion::Boundary,
                NoiseRegionArg::Box => NoiseRegion::Box,
                NoiseRegionArg::Frame => NoiseRegion::Frame,
            },
            torso: !self.no_torso,
            bag: self.bag,
            seed: self.seed,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MetricArg {
    Angle,
    Cosine,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Angle => Metric::Angle,
            MetricArg::Cosine => Metric::Cosine,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AlignArg {
    Left,
    Center,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Alive,
    Literal,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PlaneSetArg {
    Oblique,
    Depth,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum NoiseRegionArg {
    Boundary,
    Box,
    Frame,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PerturbationArg {
    OneSided,
    Symmetric,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BoundariesArg {
    All,
    Interior,
}

fn write_or_print(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

fn fmt_value(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        format!("{v:.6}")
    }
}

fn execute(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let mut text = String::new();
    match cmd {
        Command::Signature {
            dir,
            stack,
            config,
            output,
        } => {
            let frames = load_dir(&dir)?;
            let e = extract(&frames, &stack.options(), &config.config()?)?;
            let mut summary = String::from("plane\tm0\tm1\n");
            for p in &e.planes {
                summary += &format!(
                    "{}\t{}\t{}\n",
                    p.diagram.plane_id(),
                    p.diagram.m0(),
                    p.diagram.m1()
                );
            }
            match &output {
                Some(path) => {
                    e.signature.save(path)?;
                    text = summary;
                }
                None => {
                    text = e.signature.to_json();
                    let _ = err.write_all(summary.as_bytes());
                }
            }
        }
        Command::Compare { a, b, metric } => {
            let (a, b) = (GaitSignature::load(&a)?, GaitSignature::load(&b)?);
            text = format!("{}\n", fmt_value(Metric::from(metric).score(&a, &b)?));
        }
        Command::Rank {
            probe,
            gallery,
            metric,
        } => {
            let probe = GaitSignature::load(&probe)?;
            let gallery = GalleryIndex::load(&gallery)?.load_signatures(true)?;
            for (label, score) in rank(&probe, &gallery, metric.into())? {
                text += &format!("{label}\t{}\n", fmt_value(score));
            }
        }
        Command::TpnCurve {
            gallery,
            probes,
            metric,
            resolution,
        } => {
            let gallery = GalleryIndex::load(&gallery)?.load_signatures(true)?;
            let probes = GalleryIndex::load(&probes)?.load_signatures(false)?;
            let (tp, tn) = tp_tn_values(&probes, &gallery, metric.into())?;
            text = String::from("threshold\ttp_pct\ttn_pct\n");
            for r in tpn_curve(&tp, &tn, resolution)? {
                text += &format!(
                    "{}\t{}\t{}\n",
                    fmt_value(r.threshold),
                    fmt_value(r.tp),
                    fmt_value(r.tn)
                );
            }
        }
        Command::Barcode {
            dir,
            stack,
            config,
            plane,
            dim,
            positive_only,
            output,
        } => {
            let mut cfg = config.config()?;
            if let Some(id) = &plane {
                cfg.planes.retain(|p| &p.id == id);
                if cfg.planes.is_empty() {
                    return Err(Error::InvalidParameter(format!("unknown plane {id}")));
                }
            } else {
                cfg.planes.truncate(1);
            }
            let frames = load_dir(&dir)?;
            let e = extract(&frames, &stack.options(), &cfg)?;
            let d = &e.planes[0].diagram;
            let bars: Vec<_> = match dim {
                Some(k) => barcode(d, k, positive_only),
                None => [0, 1]
                    .iter()
                    .flat_map(|&k| barcode(d, k, positive_only))
                    .collect(),
            };
            let filtered = PersistenceDiagram::new(d.plane_id(), bars);
            if let Some(path) = &output {
                filtered.save(path)?;
            }
            text = format!("plane {} k {}\n", d.plane_id(), fmt_value(e.planes[0].k));
            for b in filtered.bars() {
                text += &format!(
                    "{}\t{}\t{}\n",
                    b.dim,
                    fmt_value(b.birth),
                    fmt_value(b.death)
                );
            }
        }
        Command::Bottleneck { a, b, dim } => {
            let (a, b) = (PersistenceDiagram::load(&a)?, PersistenceDiagram::load(&b)?);
            let r = bottleneck_distance(&a, &b, dim);
            text = fmt_value(r.distance);
            if r.essential_mismatch {
                text += "\tessential-count-mismatch";
            }
            text.push('\n');
        }
        Command::Synth { walker, output } => {
            let frames = synth_gait(&walker.params())?;
            std::fs::create_dir_all(&output).map_err(|e| Error::io(&output, e))?;
            for (i, f) in frames.iter().enumerate() {
                write_frame(&output.join(format!("frame_{i:04}.pgm")), f)?;
            }
            text = format!("{} frames written to {}\n", frames.len(), output.display());
        }
        Command::Stability {
            fixed,
            bars,
            n,
            eps,
            k,
            trials,
            seed,
            perturbation,
            boundaries,
            json,
            output,
        } => {
            let perturbation = match perturbation {
                PerturbationArg::OneSided => Perturbation::OneSided,
                PerturbationArg::Symmetric => Perturbation::Symmetric,
            };
            let boundaries = match boundaries {
                BoundariesArg::All => BoundaryCount::All,
                BoundariesArg::Interior => BoundaryCount::Interior,
            };
            let report = if fixed {
                perturb_and_compare(
                    &uniform_bars(bars, k, seed),
                    k,
                    n,
                    eps,
                    trials,
                    seed,
                    perturbation,
                    boundaries,
                )?
            } else {
                perturb_uniform(bars, k, n, eps, trials, seed, perturbation, boundaries)?
            };
            let body = if json {
                report.to_json() + "\n"
            } else {
                report.to_table()
            };
            return write_or_print(out, output.as_deref(), &body);
        }
        Command::Cycles {
            walker,
            stack,
            config,
        } => {
            let r = cycle_invariance(&walker.params(), &stack.options(), &config.config()?)?;
            text = format!(
                "cosine\t{}\nangle\t{}\n",
                fmt_value(r.cosine),
                fmt_value(r.angle)
            );
        }
    }
    write_or_print(out, None, &text)
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}
