//! Silhouette frames and their stacking into a normalized 3D binary image.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pnm;

/// Fraction of the silhouette height kept by the legs crop.
pub const DEFAULT_LEGS_FRACTION: f64 = 0.25;

/// Row-major binary frame; row 0 is the top of the image.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitGrid {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

/// Inclusive pixel bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundingBox {
    pub left: usize,
    pub top: usize,
    pub right: usize,
    pub bottom: usize,
}

impl BoundingBox {
    pub fn width(&self) -> usize {
        self.right - self.left + 1
    }

    pub fn height(&self) -> usize {
        self.bottom - self.top + 1
    }
}

impl BitGrid {
    pub fn new(width: usize, height: usize) -> Result<Self> {
        Self::from_bits(width, height, vec![false; width * height])
    }

    pub fn from_bits(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter(format!(
                "frame dimensions must be positive, got {width}x{height}"
            )));
        }
        if bits.len() != width * height {
            return Err(Error::InvalidParameter(format!(
                "{} bits for a {width}x{height} frame",
                bits.len()
            )));
        }
        Ok(BitGrid {
            width,
            height,
            bits,
        })
    }

    /// Builds a frame from rows of `'#'` (foreground) and anything else.
    pub fn from_ascii(rows: &[&str]) -> Result<Self> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.chars().count());
        let mut bits = Vec::with_capacity(width * height);
        for r in rows {
            if r.chars().count() != width {
                return Err(Error::InvalidParameter("ragged ascii frame".into()));
            }
            bits.extend(r.chars().map(|c| c == '#'));
        }
        Self::from_bits(width, height, bits)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.bits[y * self.width + x] = value;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn foreground(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| (i % self.width, i / self.width))
    }

    pub fn bounding_box(&self) -> Option<BoundingBox> {
        let mut it = self.foreground();
        let (x, y) = it.next()?;
        let mut bb = BoundingBox {
            left: x,
            top: y,
            right: x,
            bottom: y,
        };
        for (x, y) in it {
            bb.left = bb.left.min(x);
            bb.right = bb.right.max(x);
            bb.top = bb.top.min(y);
            bb.bottom = bb.bottom.max(y);
        }
        Some(bb)
    }

    fn sub_grid(&self, bb: BoundingBox) -> BitGrid {
        let mut bits = Vec::with_capacity(bb.width() * bb.height());
        for y in bb.top..=bb.bottom {
            bits.extend_from_slice(
                &self.bits[y * self.width + bb.left..=y * self.width + bb.right],
            );
        }
        BitGrid {
            width: bb.width(),
            height: bb.height(),
            bits,
        }
    }

    /// The frame cut down to the bounding box of its foreground.
    pub fn tight(&self) -> Result<BitGrid> {
        let bb = self.bounding_box().ok_or(Error::EmptyFrame)?;
        Ok(self.sub_grid(bb))
    }
}

/// Keeps the bottom `⌈fraction·h⌉` rows of the silhouette's bounding box
/// (h = box height) and returns the tight box of what remains.
pub fn crop_legs(frame: &BitGrid, fraction: f64) -> Result<BitGrid> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::BadFraction(fraction));
    }
    let bb = frame.bounding_box().ok_or(Error::EmptyFrame)?;
    let keep = ((fraction * bb.height() as f64).ceil() as usize).clamp(1, bb.height());
    let band = BoundingBox {
        top: bb.bottom + 1 - keep,
        ..bb
    };
    // The bottom row of the box always holds a pixel, so the band is non-empty.
    frame.sub_grid(band).tight()
}

/// Horizontal registration of frames of differing widths inside the stack.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Alignment {
    #[default]
    Left,
    Center,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StackOptions {
    /// Crop each frame to the legs before stacking.
    pub legs: bool,
    pub fraction: f64,
    pub alignment: Alignment,
}

impl Default for StackOptions {
    fn default() -> Self {
        StackOptions {
            legs: true,
            fraction: DEFAULT_LEGS_FRACTION,
            alignment: Alignment::Left,
        }
    }
}

impl StackOptions {
    pub fn full_body() -> Self {
        StackOptions {
            legs: false,
            ..Default::default()
        }
    }
}

/// Finite foreground set in Z³ (x column, y row from the bottom, z frame)
/// plus the scales that map grid indices into `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryImage3D {
    /// Sorted lexicographically, no duplicates.
    foreground: Vec<[i32; 3]>,
    frame_count: usize,
    scale: [f64; 3],
}

impl BinaryImage3D {
    /// Builds an image from raw points. Scales are derived from the point
    /// extents with the same rule `stack` uses.
    pub fn from_points(points: impl IntoIterator<Item = [i32; 3]>) -> Result<Self> {
        let mut foreground: Vec<[i32; 3]> = points.into_iter().collect();
        foreground.sort_unstable();
        foreground.dedup();
        let first = *foreground
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty foreground".into()))?;
        let mut lo = first;
        let mut hi = first;
        for p in &foreground {
            for a in 0..3 {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        if lo.iter().any(|&c| c < 0) {
            return Err(Error::InvalidParameter(
                "foreground coordinates must be non-negative".into(),
            ));
        }
        let frame_count = hi[2] as usize + 1;
        let plane = hi[0].max(hi[1]) as usize + 1;
        Ok(BinaryImage3D {
            foreground,
            frame_count,
            scale: scales(plane, plane, frame_count),
        })
    }

    pub fn points(&self) -> &[[i32; 3]] {
        &self.foreground
    }

    pub fn frame_count(&self) -> usize {
        self.frame_count
    }

    /// `[scale_x, scale_y, scale_z]`.
    pub fn scales(&self) -> [f64; 3] {
        self.scale
    }

    pub fn normalize(&self, p: [i32; 3]) -> [f64; 3] {
        [
            p[0] as f64 * self.scale[0],
            p[1] as f64 * self.scale[1],
            p[2] as f64 * self.scale[2],
        ]
    }

    pub fn contains(&self, p: [i32; 3]) -> bool {
        self.foreground.binary_search(&p).is_ok()
    }

    /// Foreground points of frame `z`.
    pub fn frame_points(&self, z: i32) -> impl Iterator<Item = [i32; 3]> + '_ {
        self.foreground.iter().copied().filter(move |p| p[2] == z)
    }
}

fn unit_scale(extent: usize) -> f64 {
    if extent > 1 {
        1.0 / (extent - 1) as f64
    } else {
        1.0
    }
}

/// x and y share one scale so proportions are kept; the longer of the two
/// spans `[0, 1]` (the height, for upright silhouettes).
fn scales(max_width: usize, max_height: usize, frames: usize) -> [f64; 3] {
    let s = unit_scale(max_width.max(max_height));
    [s, s, unit_scale(frames)]
}

/// Stacks frames along z. Each frame's (optionally leg-cropped) bounding box
/// is placed with its bottom-left corner at the origin.
pub fn stack(frames: &[BitGrid], opts: &StackOptions) -> Result<BinaryImage3D> {
    if frames.len() < 2 {
        return Err(Error::TooFewFrames(frames.len()));
    }
    if opts.legs && !(opts.fraction > 0.0 && opts.fraction <= 1.0) {
        return Err(Error::BadFraction(opts.fraction));
    }
    let cropped: Vec<BitGrid> = frames
        .par_iter()
        .enumerate()
        .map(|(index, f)| {
            let r = if opts.legs {
                crop_legs(f, opts.fraction)
            } else {
                f.tight()
            };
            r.map_err(|_| Error::EmptyFrameInStack { index })
        })
        .collect::<Result<_>>()?;

    let max_w = cropped.iter().map(BitGrid::width).max().unwrap();
    let max_h = cropped.iter().map(BitGrid::height).max().unwrap();
    let mut foreground = Vec::with_capacity(cropped.iter().map(BitGrid::count).sum());
    for (z, g) in cropped.iter().enumerate() {
        let dx = match opts.alignment {
            Alignment::Left => 0,
            Alignment::Center => (max_w - g.width()) / 2,
        };
        for (x, row) in g.foreground() {
            let y = g.height() - 1 - row;
            foreground.push([(x + dx) as i32, y as i32, z as i32]);
        }
    }
    foreground.sort_unstable();
    Ok(BinaryImage3D {
        foreground,
        frame_count: cropped.len(),
        scale: scales(max_w, max_h, cropped.len()),
    })
}

pub fn load_frame(path: &Path) -> Result<BitGrid> {
    pnm::read_frame(path)
}

/// Netpbm files of a directory, in lexicographic filename order.
pub fn frame_paths(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let is_pnm = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| matches!(e.to_ascii_lowercase().as_str(), "pbm" | "pgm" | "pnm"));
        if path.is_file() && is_pnm {
            paths.push(path);
        }
    }
    paths.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    Ok(paths)
}

pub fn load_dir(dir: &Path) -> Result<Vec<BitGrid>> {
    frame_paths(dir)?
        .par_iter()
        .map(|p| load_frame(p))
        .collect()
}
