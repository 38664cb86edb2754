//! File formats. Binary formats are little-endian, declare their sizes up
//! front and reject trailing bytes.

mod camera_file;
mod cube;
mod model;
mod ppm;
mod report;
mod spectra_csv;
mod training;
mod video;

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};
use nalgebra::DMatrix;

pub use camera_file::{format_camera, parse_camera, read_camera, write_camera, CAMERA_MAGIC};
pub use cube::{
    cube_file_size, read_cube, read_cube_from, read_map, read_map_from, write_cube, write_cube_to, write_map,
    write_map_to, CubeEncoding, CubeHeader, CUBE_HEADER_LEN, CUBE_MAGIC,
};
pub use model::{read_model, read_model_from, write_model, write_model_to, MODEL_MAGIC, MODEL_VERSION};
pub use ppm::{read_ppm, read_ppm_from, read_ppm_raw, write_gray_ppm, write_ppm, write_ppm_to, RawImage};
pub use report::Report;
pub use spectra_csv::{read_spectra_csv, read_spectra_csv_from, write_spectra_csv, write_spectra_csv_to};
pub use training::{read_training, read_training_from, write_training, write_training_to, TRAINING_MAGIC};
pub use video::{
    RawVideoReader, RawVideoWriter, SpectralVideoReader, SpectralVideoWriter, RAW_VIDEO_MAGIC,
    SPECTRAL_VIDEO_MAGIC,
};

use crate::error::{Error, Result};

pub(crate) fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path)?))
}

pub(crate) fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

/// Maps a short read onto `CorruptFile`.
pub(crate) fn truncated(what: &str) -> impl Fn(io::Error) -> Error + '_ {
    move |e| match e.kind() {
        io::ErrorKind::UnexpectedEof => Error::CorruptFile(format!("{what}: truncated")),
        _ => Error::Io(e),
    }
}

/// Reads 4 magic bytes; a short file or other bytes yield `mismatch`.
pub(crate) fn expect_magic(r: &mut impl Read, magic: &[u8; 4], mismatch: impl FnOnce() -> Error) -> Result<()> {
    let mut got = [0u8; 4];
    match r.read_exact(&mut got) {
        Ok(()) if &got == magic => Ok(()),
        Ok(()) => Err(mismatch()),
        Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => Err(mismatch()),
        Err(e) => Err(e.into()),
    }
}

pub(crate) fn expect_eof(r: &mut impl Read, what: &str) -> Result<()> {
    let mut b = [0u8; 1];
    loop {
        match r.read(&mut b) {
            Ok(0) => return Ok(()),
            Ok(_) => return Err(Error::CorruptFile(format!("{what}: trailing bytes"))),
            Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
            Err(e) => return Err(e.into()),
        }
    }
}

/// Reads exactly `len` bytes without trusting `len` for the allocation.
pub(crate) fn read_bytes(r: &mut impl Read, len: u64, what: &str) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    r.by_ref().take(len).read_to_end(&mut buf)?;
    if (buf.len() as u64) < len {
        return Err(Error::CorruptFile(format!("{what}: truncated")));
    }
    Ok(buf)
}

pub(crate) fn read_f64s(r: &mut impl Read, count: usize, what: &str) -> Result<Vec<f64>> {
    let bytes = read_bytes(r, count as u64 * 8, what)?;
    let mut out = vec![0.0; count];
    (&bytes[..]).read_f64_into::<LE>(&mut out)?;
    Ok(out)
}

pub(crate) fn write_f64s(w: &mut impl Write, values: &[f64]) -> Result<()> {
    let mut bytes = Vec::with_capacity(values.len() * 8);
    for &v in values {
        bytes.write_f64::<LE>(v)?;
    }
    w.write_all(&bytes)?;
    Ok(())
}

/// `u32 rows, u32 cols`, then row-major f64.
pub(crate) fn write_matrix(w: &mut impl Write, m: &DMatrix<f64>) -> Result<()> {
    w.write_u32::<LE>(dim_u32(m.nrows())?)?;
    w.write_u32::<LE>(dim_u32(m.ncols())?)?;
    write_f64s(w, m.transpose().as_slice())
}

pub(crate) fn read_matrix(r: &mut impl Read, what: &str) -> Result<DMatrix<f64>> {
    let rows = r.read_u32::<LE>().map_err(truncated(what))? as usize;
    let cols = r.read_u32::<LE>().map_err(truncated(what))? as usize;
    let values = read_f64s(r, rows * cols, what)?;
    Ok(DMatrix::from_row_slice(rows, cols, &values))
}

pub(crate) fn dim_u32(n: usize) -> Result<u32> {
    u32::try_from(n).map_err(|_| Error::InvalidInput(format!("dimension {n} exceeds u32")))
}

pub(crate) fn write_string(w: &mut impl Write, s: &str) -> Result<()> {
    w.write_u32::<LE>(dim_u32(s.len())?)?;
    w.write_all(s.as_bytes())?;
    Ok(())
}

pub(crate) fn read_string(r: &mut impl Read, what: &str) -> Result<String> {
    let len = r.read_u32::<LE>().map_err(truncated(what))?;
    let bytes = read_bytes(r, len as u64, what)?;
    String::from_utf8(bytes).map_err(|_| Error::CorruptFile(format!("{what}: invalid UTF-8")))
}
