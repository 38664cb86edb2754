//! `SPC1` spectral cube files.
//!
//! ```text
//! "SPC1" u32 width  u32 height  u32 bands  f64 start_nm  f64 step_nm  u8 encoding
//! payload: bands planes of height*width samples, row-major within a plane
//! ```
//!
//! Encoding 1 is f32, 2 is f64. Scalar maps (masks, error maps) use
//! `bands = 1` with start and step 0.

use std::io::{Read, Write};
use std::path::Path;

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};

use super::{create, dim_u32, expect_eof, expect_magic, open, read_bytes, truncated};
use crate::error::{Error, Result};
use crate::spectral::{SpectralCube, WavelengthGrid};

pub const CUBE_MAGIC: &[u8; 4] = b"SPC1";
pub const CUBE_HEADER_LEN: u64 = 4 + 3 * 4 + 2 * 8 + 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CubeEncoding {
    F32,
    F64,
}

impl CubeEncoding {
    pub fn code(self) -> u8 {
        match self {
            CubeEncoding::F32 => 1,
            CubeEncoding::F64 => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            1 => Some(CubeEncoding::F32),
            2 => Some(CubeEncoding::F64),
            _ => None,
        }
    }

    pub fn sample_bytes(self) -> u64 {
        match self {
            CubeEncoding::F32 => 4,
            CubeEncoding::F64 => 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubeHeader {
    pub width: u32,
    pub height: u32,
    pub bands: u32,
    pub start_nm: f64,
    pub step_nm: f64,
    pub encoding: CubeEncoding,
}

impl CubeHeader {
    pub fn payload_len(&self) -> u64 {
        self.width as u64 * self.height as u64 * self.bands as u64 * self.encoding.sample_bytes()
    }

    fn write(&self, w: &mut impl Write) -> Result<()> {
        w.write_all(CUBE_MAGIC)?;
        w.write_u32::<LE>(self.width)?;
        w.write_u32::<LE>(self.height)?;
        w.write_u32::<LE>(self.bands)?;
        w.write_f64::<LE>(self.start_nm)?;
        w.write_f64::<LE>(self.step_nm)?;
        w.write_u8(self.encoding.code())?;
        Ok(())
    }

    fn read(r: &mut impl Read) -> Result<Self> {
        expect_magic(r, CUBE_MAGIC, || Error::NotACube)?;
        let t = truncated("cube header");
        let width = r.read_u32::<LE>().map_err(&t)?;
        let height = r.read_u32::<LE>().map_err(&t)?;
        let bands = r.read_u32::<LE>().map_err(&t)?;
        let start_nm = r.read_f64::<LE>().map_err(&t)?;
        let step_nm = r.read_f64::<LE>().map_err(&t)?;
        let code = r.read_u8().map_err(&t)?;
        let encoding = CubeEncoding::from_code(code)
            .ok_or_else(|| Error::CorruptFile(format!("cube header: unknown encoding {code}")))?;
        if width == 0 || height == 0 || bands == 0 {
            return Err(Error::CorruptFile(format!("cube header: empty dims {width}x{height}x{bands}")));
        }
        Ok(Self {
            width,
            height,
            bands,
            start_nm,
            step_nm,
            encoding,
        })
    }
}

/// Total size in bytes of an `SPC1` file.
pub fn cube_file_size(height: usize, width: usize, bands: usize, encoding: CubeEncoding) -> u64 {
    CUBE_HEADER_LEN + (height * width * bands) as u64 * encoding.sample_bytes()
}

/// Interleaved `(pixel, band)` samples written band-sequentially.
fn write_payload(w: &mut impl Write, samples: &[f64], bands: usize, encoding: CubeEncoding) -> Result<()> {
    let pixels = samples.len() / bands;
    let mut bytes = Vec::with_capacity(samples.len() * encoding.sample_bytes() as usize);
    for b in 0..bands {
        for p in 0..pixels {
            let v = samples[p * bands + b];
            match encoding {
                CubeEncoding::F32 => bytes.write_f32::<LE>(v as f32)?,
                CubeEncoding::F64 => bytes.write_f64::<LE>(v)?,
            }
        }
    }
    w.write_all(&bytes)?;
    Ok(())
}

/// Band-sequential payload back to interleaved samples.
fn read_payload(r: &mut impl Read, header: &CubeHeader) -> Result<Vec<f64>> {
    let bytes = read_bytes(r, header.payload_len(), "cube payload")?;
    let bands = header.bands as usize;
    let pixels = header.width as usize * header.height as usize;
    let mut out = vec![0.0; pixels * bands];
    let width = header.encoding.sample_bytes() as usize;
    for (i, chunk) in bytes.chunks_exact(width).enumerate() {
        let v = match header.encoding {
            CubeEncoding::F32 => f32::from_le_bytes(chunk.try_into().expect("4 bytes")) as f64,
            CubeEncoding::F64 => f64::from_le_bytes(chunk.try_into().expect("8 bytes")),
        };
        let (b, p) = (i / pixels, i % pixels);
        out[p * bands + b] = v;
    }
    Ok(out)
}

pub(crate) fn encode_frame(w: &mut impl Write, cube: &SpectralCube, encoding: CubeEncoding) -> Result<()> {
    write_payload(w, cube.samples(), cube.bands(), encoding)
}

pub(crate) fn decode_frame(
    r: &mut impl Read,
    height: usize,
    width: usize,
    grid: WavelengthGrid,
    encoding: CubeEncoding,
) -> Result<SpectralCube> {
    let header = CubeHeader {
        width: dim_u32(width)?,
        height: dim_u32(height)?,
        bands: dim_u32(grid.count())?,
        start_nm: grid.start_nm(),
        step_nm: grid.step_nm(),
        encoding,
    };
    SpectralCube::from_samples(height, width, grid, read_payload(r, &header)?)
}

pub fn write_cube_to(w: &mut impl Write, cube: &SpectralCube, encoding: CubeEncoding) -> Result<()> {
    CubeHeader {
        width: dim_u32(cube.width())?,
        height: dim_u32(cube.height())?,
        bands: dim_u32(cube.bands())?,
        start_nm: cube.grid().start_nm(),
        step_nm: cube.grid().step_nm(),
        encoding,
    }
    .write(w)?;
    encode_frame(w, cube, encoding)
}

pub fn read_cube_from(r: &mut impl Read) -> Result<SpectralCube> {
    let header = CubeHeader::read(r)?;
    if header.bands == 1 {
        return Err(Error::UnsupportedFormat("single-band map, not a spectral cube".into()));
    }
    let grid = WavelengthGrid::new(header.start_nm, header.step_nm, header.bands as usize)
        .map_err(|e| Error::CorruptFile(format!("cube header: {e}")))?;
    let samples = read_payload(r, &header)?;
    expect_eof(r, "cube")?;
    SpectralCube::from_samples(header.height as usize, header.width as usize, grid, samples)
}

/// A row-major `height x width` scalar map as a single-band f64 file.
pub fn write_map_to(w: &mut impl Write, height: usize, width: usize, values: &[f64]) -> Result<()> {
    if values.len() != height * width || values.is_empty() {
        return Err(Error::ShapeMismatch(format!("{} values for a {height}x{width} map", values.len())));
    }
    CubeHeader {
        width: dim_u32(width)?,
        height: dim_u32(height)?,
        bands: 1,
        start_nm: 0.0,
        step_nm: 0.0,
        encoding: CubeEncoding::F64,
    }
    .write(w)?;
    write_payload(w, values, 1, CubeEncoding::F64)
}

/// Returns `(height, width, values)`.
pub fn read_map_from(r: &mut impl Read) -> Result<(usize, usize, Vec<f64>)> {
    let header = CubeHeader::read(r)?;
    if header.bands != 1 {
        return Err(Error::UnsupportedFormat(format!("{}-band cube, expected a map", header.bands)));
    }
    let values = read_payload(r, &header)?;
    expect_eof(r, "map")?;
    Ok((header.height as usize, header.width as usize, values))
}

pub fn write_cube(path: impl AsRef<Path>, cube: &SpectralCube, encoding: CubeEncoding) -> Result<()> {
    let mut w = create(path.as_ref())?;
    write_cube_to(&mut w, cube, encoding)?;
    w.flush()?;
    Ok(())
}

pub fn read_cube(path: impl AsRef<Path>) -> Result<SpectralCube> {
    read_cube_from(&mut open(path.as_ref())?)
}

pub fn write_map(path: impl AsRef<Path>, height: usize, width: usize, values: &[f64]) -> Result<()> {
    let mut w = create(path.as_ref())?;
    write_map_to(&mut w, height, width, values)?;
    w.flush()?;
    Ok(())
}

pub fn read_map(path: impl AsRef<Path>) -> Result<(usize, usize, Vec<f64>)> {
    read_map_from(&mut open(path.as_ref())?)
}
