//! Minimal netpbm codec for single-channel frames (P1, P2, P4, P5).
//!
//! Only occupancy matters downstream, so every format is decoded straight to
//! "sample > 0". For the bitmap formats the raw bit is the sample, so a `1`
//! (conventionally black ink) is foreground.

use std::path::Path;

use crate::error::{Error, Result};
use crate::silhouette::BitGrid;

struct Header {
    magic: u8,
    width: usize,
    height: usize,
    maxval: u32,
    /// Offset of the first raster byte.
    data_start: usize,
}

fn skip_ws_and_comments(bytes: &[u8], mut pos: usize) -> usize {
    while pos < bytes.len() {
        match bytes[pos] {
            b'#' => {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            }
            b if b.is_ascii_whitespace() => pos += 1,
            _ => break,
        }
    }
    pos
}

fn read_uint(bytes: &[u8], pos: &mut usize, what: &str) -> std::result::Result<u32, String> {
    *pos = skip_ws_and_comments(bytes, *pos);
    let start = *pos;
    while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
        *pos += 1;
    }
    if start == *pos {
        return Err(format!("expected {what}"));
    }
    std::str::from_utf8(&bytes[start..*pos])
        .unwrap()
        .parse::<u32>()
        .map_err(|e| format!("bad {what}: {e}"))
}

fn parse_header(bytes: &[u8]) -> std::result::Result<Header, String> {
    if bytes.len() < 2 || bytes[0] != b'P' {
        return Err("missing netpbm magic number".into());
    }
    let magic = bytes[1];
    if !matches!(magic, b'1' | b'2' | b'4' | b'5') {
        return Err(format!(
            "unsupported netpbm variant P{} (expected P1, P2, P4 or P5)",
            magic as char
        ));
    }
    let mut pos = 2;
    let width = read_uint(bytes, &mut pos, "width")? as usize;
    let height = read_uint(bytes, &mut pos, "height")? as usize;
    if width == 0 || height == 0 {
        return Err(format!("zero dimension ({width}x{height})"));
    }
    let maxval = if matches!(magic, b'2' | b'5') {
        let m = read_uint(bytes, &mut pos, "maxval")?;
        if m == 0 || m > 65535 {
            return Err(format!("maxval {m} out of range 1..=65535"));
        }
        m
    } else {
        1
    };
    // Binary rasters begin after exactly one whitespace byte.
    if matches!(magic, b'4' | b'5') {
        if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
            return Err("missing whitespace before raster".into());
        }
        pos += 1;
    }
    Ok(Header {
        magic,
        width,
        height,
        maxval,
        data_start: pos,
    })
}

fn decode(bytes: &[u8]) -> std::result::Result<BitGrid, String> {
    let h = parse_header(bytes)?;
    let n = h.width * h.height;
    let mut bits = Vec::with_capacity(n);
    let data = &bytes[h.data_start..];
    match h.magic {
        b'1' => {
            // Digits may be packed without separators.
            for &b in data {
                match b {
                    b'0' => bits.push(false),
                    b'1' => bits.push(true),
                    b if b.is_ascii_whitespace() => {}
                    _ => return Err(format!("unexpected byte {b:#04x} in P1 raster")),
                }
                if bits.len() == n {
                    break;
                }
            }
        }
        b'2' => {
            let mut pos = h.data_start;
            for _ in 0..n {
                let v = read_uint(bytes, &mut pos, "sample")?;
                if v > h.maxval {
                    return Err(format!("sample {v} exceeds maxval {}", h.maxval));
                }
                bits.push(v > 0);
            }
        }
        b'4' => {
            let row_bytes = h.width.div_ceil(8);
            if data.len() < row_bytes * h.height {
                return Err("truncated P4 raster".into());
            }
            for row in data.chunks(row_bytes).take(h.height) {
                for x in 0..h.width {
                    bits.push(row[x / 8] & (0x80 >> (x % 8)) != 0);
                }
            }
        }
        b'5' => {
            let bps = if h.maxval > 255 { 2 } else { 1 };
            if data.len() < n * bps {
                return Err("truncated P5 raster".into());
            }
            for s in data.chunks(bps).take(n) {
                bits.push(s.iter().any(|&b| b != 0));
            }
        }
        _ => unreachable!(),
    }
    if bits.len() != n {
        return Err(format!("raster has {} samples, expected {n}", bits.len()));
    }
    Ok(BitGrid::from_bits(h.width, h.height, bits).expect("dimensions checked"))
}

pub fn read_frame(path: &Path) -> Result<BitGrid> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes).map_err(|reason| Error::Image {
        path: path.to_path_buf(),
        reason,
    })
}

pub fn decode_bytes(bytes: &[u8]) -> std::result::Result<BitGrid, String> {
    decode(bytes)
}

/// Encodes a frame as binary graymap (P5, maxval 255, foreground = 255).
pub fn encode_p5(frame: &BitGrid) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", frame.width(), frame.height()).into_bytes();
    out.extend(frame.bits().iter().map(|&b| if b { 255u8 } else { 0 }));
    out
}

pub fn write_frame(path: &Path, frame: &BitGrid) -> Result<()> {
    std::fs::write(path, encode_p5(frame)).map_err(|e| Error::io(path, e))
}
