//! Frame-sequence containers.
//!
//! ```text
//! SPVR  "SPVR" u32 width  u32 height  u32 frames, then 8-bit RGB frames
//! SPVC  "SPVC" u32 width  u32 height  u32 bands  u32 frames  f64 start_nm  f64 step_nm,
//!       then f32 frames, band-sequential within a frame
//! ```
//!
//! Writers patch the frame count when finished, so they need `Seek`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Seek, SeekFrom, Write};
use std::path::Path;

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};

use super::cube::{decode_frame, encode_frame, CubeEncoding};
use super::ppm::RawImage;
use super::{dim_u32, expect_eof, expect_magic, read_bytes, truncated};
use crate::error::{Error, Result};
use crate::spectral::{SpectralCube, WavelengthGrid};

pub const RAW_VIDEO_MAGIC: &[u8; 4] = b"SPVR";
pub const SPECTRAL_VIDEO_MAGIC: &[u8; 4] = b"SPVC";

/// Offset of the frame-count field in each header.
const RAW_COUNT_OFFSET: u64 = 12;
const SPECTRAL_COUNT_OFFSET: u64 = 16;

pub struct RawVideoReader<R> {
    inner: R,
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    next: usize,
    done: bool,
}

impl RawVideoReader<BufReader<File>> {
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        Self::new(super::open(path.as_ref())?)
    }
}

impl<R: Read> RawVideoReader<R> {
    pub fn new(mut inner: R) -> Result<Self> {
        expect_magic(&mut inner, RAW_VIDEO_MAGIC, || Error::CorruptFile("not an SPVR raw video".into()))?;
        let t = truncated("raw video header");
        let width = inner.read_u32::<LE>().map_err(&t)? as usize;
        let height = inner.read_u32::<LE>().map_err(&t)? as usize;
        let frames = inner.read_u32::<LE>().map_err(&t)? as usize;
        if width == 0 || height == 0 {
            return Err(Error::CorruptFile(format!("raw video: empty frame {width}x{height}")));
        }
        Ok(Self {
            inner,
            width,
            height,
            frames,
            next: 0,
            done: false,
        })
    }
}

impl<R: Read> Iterator for RawVideoReader<R> {
    type Item = Result<RawImage>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        if self.next == self.frames {
            self.done = true;
            return expect_eof(&mut self.inner, "raw video").err().map(Err);
        }
        self.next += 1;
        let frame = read_bytes(&mut self.inner, (self.width * self.height * 3) as u64, "raw video frame");
        if frame.is_err() {
            self.done = true;
        }
        Some(frame.map(|data| RawImage {
            height: self.height,
            width: self.width,
            data,
        }))
    }
}

pub struct RawVideoWriter<W: Write + Seek> {
    inner: W,
    width: usize,
    height: usize,
    frames: u32,
}

impl RawVideoWriter<BufWriter<File>> {
    pub fn create(path: impl AsRef<Path>, width: usize, height: usize) -> Result<Self> {
        Self::new(super::create(path.as_ref())?, width, height)
    }
}

impl<W: Write + Seek> RawVideoWriter<W> {
    pub fn new(mut inner: W, width: usize, height: usize) -> Result<Self> {
        inner.write_all(RAW_VIDEO_MAGIC)?;
        inner.write_u32::<LE>(dim_u32(width)?)?;
        inner.write_u32::<LE>(dim_u32(height)?)?;
        inner.write_u32::<LE>(0)?;
        Ok(Self {
            inner,
            width,
            height,
            frames: 0,
        })
    }

    pub fn push(&mut self, frame: &RawImage) -> Result<()> {
        if frame.width != self.width || frame.height != self.height {
            return Err(Error::ShapeMismatch(format!(
                "frame {}x{} in a {}x{} video",
                frame.width, frame.height, self.width, self.height
            )));
        }
        self.inner.write_all(&frame.data)?;
        self.frames += 1;
        Ok(())
    }

    pub fn finish(mut self) -> Result<W> {
        self.inner.seek(SeekFrom::Start(RAW_COUNT_OFFSET))?;
        self.inner.write_u32::<LE>(self.frames)?;
        self.inner.seek(SeekFrom::End(0))?;
        self.inner.flush()?;
        Ok(self.inner)
    }
}

pub struct SpectralVideoReader<R> {
    inner: R,
    pub width: usize,
    pub height: usize,
    pub grid: WavelengthGrid,
    pub frames: usize,
    next: usize,
    done: bool,
}

impl SpectralVideoReader<BufReader<File>> {
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        Self::new(super::open(path.as_ref())?)
    }
}

impl<R: Read> SpectralVideoReader<R> {
    pub fn new(mut inner: R) -> Result<Self> {
        expect_magic(&mut inner, SPECTRAL_VIDEO_MAGIC, || {
            Error::CorruptFile("not an SPVC spectral video".into())
        })?;
        let t = truncated("spectral video header");
        let width = inner.read_u32::<LE>().map_err(&t)? as usize;
        let height = inner.read_u32::<LE>().map_err(&t)? as usize;
        let bands = inner.read_u32::<LE>().map_err(&t)? as usize;
        let frames = inner.read_u32::<LE>().map_err(&t)? as usize;
        let start = inner.read_f64::<LE>().map_err(&t)?;
        let step = inner.read_f64::<LE>().map_err(&t)?;
        if width == 0 || height == 0 {
            return Err(Error::CorruptFile(format!("spectral video: empty frame {width}x{height}")));
        }
        let grid = WavelengthGrid::new(start, step, bands)
            .map_err(|e| Error::CorruptFile(format!("spectral video: {e}")))?;
        Ok(Self {
            inner,
            width,
            height,
            grid,
            frames,
            next: 0,
            done: false,
        })
    }
}

impl<R: Read> Iterator for SpectralVideoReader<R> {
    type Item = Result<SpectralCube>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        if self.next == self.frames {
            self.done = true;
            return expect_eof(&mut self.inner, "spectral video").err().map(Err);
        }
        self.next += 1;
        let frame = decode_frame(&mut self.inner, self.height, self.width, self.grid, CubeEncoding::F32);
        if frame.is_err() {
            self.done = true;
        }
        Some(frame)
    }
}

pub struct SpectralVideoWriter<W: Write + Seek> {
    inner: W,
    width: usize,
    height: usize,
    grid: WavelengthGrid,
    frames: u32,
}

impl SpectralVideoWriter<BufWriter<File>> {
    pub fn create(path: impl AsRef<Path>, width: usize, height: usize, grid: WavelengthGrid) -> Result<Self> {
        Self::new(super::create(path.as_ref())?, width, height, grid)
    }
}

impl<W: Write + Seek> SpectralVideoWriter<W> {
    pub fn new(mut inner: W, width: usize, height: usize, grid: WavelengthGrid) -> Result<Self> {
        inner.write_all(SPECTRAL_VIDEO_MAGIC)?;
        inner.write_u32::<LE>(dim_u32(width)?)?;
        inner.write_u32::<LE>(dim_u32(height)?)?;
        inner.write_u32::<LE>(dim_u32(grid.count())?)?;
        inner.write_u32::<LE>(0)?;
        inner.write_f64::<LE>(grid.start_nm())?;
        inner.write_f64::<LE>(grid.step_nm())?;
        Ok(Self {
            inner,
            width,
            height,
            grid,
            frames: 0,
        })
    }

    pub fn push(&mut self, frame: &SpectralCube) -> Result<()> {
        if frame.width() != self.width || frame.height() != self.height {
            return Err(Error::ShapeMismatch(format!(
                "frame {}x{} in a {}x{} video",
                frame.width(),
                frame.height(),
                self.width,
                self.height
            )));
        }
        self.grid.ensure_same(frame.grid())?;
        encode_frame(&mut self.inner, frame, CubeEncoding::F32)?;
        self.frames += 1;
        Ok(())
    }

    pub fn frames(&self) -> u32 {
        self.frames
    }

    pub fn finish(mut self) -> Result<W> {
        self.inner.seek(SeekFrom::Start(SPECTRAL_COUNT_OFFSET))?;
        self.inner.write_u32::<LE>(self.frames)?;
        self.inner.seek(SeekFrom::End(0))?;
        self.inner.flush()?;
        Ok(self.inner)
    }
}

#[cfg(test)]
mod tests {
    use std::io::Cursor;

    use super::*;

    #[test]
    fn raw_roundtrip_and_trailing() {
        let mut w = RawVideoWriter::new(Cursor::new(Vec::new()), 2, 1).unwrap();
        for i in 0..3u8 {
            w.push(&RawImage {
                height: 1,
                width: 2,
                data: vec![i; 6],
            })
            .unwrap();
        }
        let mut buf = w.finish().unwrap().into_inner();
        let r = RawVideoReader::new(&buf[..]).unwrap();
        assert_eq!(r.frames, 3);
        let frames: Vec<RawImage> = r.collect::<Result<_>>().unwrap();
        assert_eq!(frames[2].data, vec![2; 6]);

        buf.push(0);
        let r = RawVideoReader::new(&buf[..]).unwrap();
        assert!(r.collect::<Result<Vec<_>>>().is_err());
        let short = &buf[..buf.len() - 3];
        let r = RawVideoReader::new(short).unwrap();
        assert!(matches!(r.collect::<Result<Vec<_>>>(), Err(Error::CorruptFile(_))));
    }

    #[test]
    fn spectral_roundtrip_is_f32() {
        let g = WavelengthGrid::new(400.0, 10.0, 3).unwrap();
        let frames: Vec<SpectralCube> = (0..2)
            .map(|t| SpectralCube::from_fn(2, 2, g, |y, x, px| px.fill(0.1 * (t + y + x) as f64 + 1e-9)).unwrap())
            .collect();
        let mut w = SpectralVideoWriter::new(Cursor::new(Vec::new()), 2, 2, g).unwrap();
        for f in &frames {
            w.push(f).unwrap();
        }
        let buf = w.finish().unwrap().into_inner();
        assert_eq!(buf.len(), 36 + 2 * 2 * 2 * 3 * 4);
        let back: Vec<SpectralCube> = SpectralVideoReader::new(&buf[..]).unwrap().collect::<Result<_>>().unwrap();
        assert_eq!(back.len(), 2);
        for (a, b) in frames.iter().zip(&back) {
            for (x, y) in a.samples().iter().zip(b.samples()) {
                assert_eq!(*y, *x as f32 as f64);
            }
        }
    }
}
