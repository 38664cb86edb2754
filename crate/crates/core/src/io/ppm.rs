//! Binary PPM (P6, maxval 255).

use std::io::{BufRead, Write};
use std::path::Path;

use super::{create, expect_eof, open, read_bytes};
use crate::error::{Error, Result};
use crate::spectral::RgbImage;

/// 8-bit interleaved RGB, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawImage {
    pub height: usize,
    pub width: usize,
    pub data: Vec<u8>,
}

impl RawImage {
    /// Quantizes with round-half-up, the same rule as [`write_ppm`].
    pub fn from_rgb(image: &RgbImage) -> Self {
        Self {
            height: image.height(),
            width: image.width(),
            data: image.values().iter().map(|&v| quantize(v)).collect(),
        }
    }
}

fn header_token(r: &mut impl BufRead) -> Result<String> {
    let mut tok = String::new();
    loop {
        let mut b = [0u8; 1];
        if r.read(&mut b)? == 0 {
            if tok.is_empty() {
                return Err(Error::CorruptFile("ppm: truncated header".into()));
            }
            return Ok(tok);
        }
        let c = b[0];
        if c == b'#' && tok.is_empty() {
            let mut skip = Vec::new();
            r.read_until(b'\n', &mut skip)?;
            continue;
        }
        if c.is_ascii_whitespace() {
            if tok.is_empty() {
                continue;
            }
            return Ok(tok);
        }
        tok.push(c as char);
    }
}

fn header_number(r: &mut impl BufRead, what: &str) -> Result<usize> {
    let tok = header_token(r)?;
    tok.parse()
        .map_err(|_| Error::CorruptFile(format!("ppm: bad {what} {tok:?}")))
}

/// Reads a P6 file without normalising. The single whitespace byte after
/// maxval is consumed by the tokenizer.
pub fn read_ppm_raw(r: &mut impl BufRead) -> Result<RawImage> {
    let magic = header_token(r)?;
    if magic != "P6" {
        return Err(Error::UnsupportedFormat(format!("ppm magic {magic:?}, only P6 is supported")));
    }
    let width = header_number(r, "width")?;
    let height = header_number(r, "height")?;
    let maxval = header_number(r, "maxval")?;
    if maxval != 255 {
        return Err(Error::UnsupportedFormat(format!("ppm maxval {maxval}, only 255 is supported")));
    }
    if width == 0 || height == 0 {
        return Err(Error::CorruptFile(format!("ppm: empty image {width}x{height}")));
    }
    let data = read_bytes(r, (width * height * 3) as u64, "ppm pixels")?;
    expect_eof(r, "ppm")?;
    Ok(RawImage { height, width, data })
}

pub fn read_ppm_from(r: &mut impl BufRead) -> Result<RgbImage> {
    let raw = read_ppm_raw(r)?;
    RgbImage::new(raw.height, raw.width, raw.data.iter().map(|&v| v as f64 / 255.0).collect())
}

/// Round-half-up quantisation of `[0, 1]` (clamped) to 8 bits.
#[inline]
pub(crate) fn quantize(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0 + 0.5).floor() as u8
}

fn write_raw(w: &mut impl Write, height: usize, width: usize, data: &[u8]) -> Result<()> {
    write!(w, "P6\n{width} {height}\n255\n")?;
    w.write_all(data)?;
    Ok(())
}

pub fn write_ppm_to(w: &mut impl Write, image: &RgbImage) -> Result<()> {
    let data: Vec<u8> = image.values().iter().map(|&v| quantize(v)).collect();
    write_raw(w, image.height(), image.width(), &data)
}

pub fn read_ppm(path: impl AsRef<Path>) -> Result<RgbImage> {
    read_ppm_from(&mut open(path.as_ref())?)
}

pub fn write_ppm(path: impl AsRef<Path>, image: &RgbImage) -> Result<()> {
    let mut w = create(path.as_ref())?;
    write_ppm_to(&mut w, image)?;
    w.flush()?;
    Ok(())
}

/// A row-major scalar plane as a gray P6 image (equal R, G and B).
pub fn write_gray_ppm(path: impl AsRef<Path>, height: usize, width: usize, plane: &[f64]) -> Result<()> {
    if plane.len() != height * width {
        return Err(Error::ShapeMismatch(format!("{} values for a {height}x{width} plane", plane.len())));
    }
    let data: Vec<u8> = plane.iter().flat_map(|&v| [quantize(v); 3]).collect();
    let mut w = create(path.as_ref())?;
    write_raw(&mut w, height, width, &data)?;
    w.flush()?;
    Ok(())
}
