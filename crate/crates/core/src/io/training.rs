//! `SPTS` training-set files.
//!
//! ```text
//! "SPTS" u32 N  u32 M  u32 k  f64 start_nm  f64 step_nm
//! f64 R[N*k]  f64 P[M*k]              (column per sample)
//! f64 fraction  u64 seed
//! u32 n_sources  { u32 len, utf8 }*
//! u32 n_origins  { u32 source, u32 pixel }*
//! ```

use std::io::{Read, Write};
use std::path::Path;

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};
use nalgebra::DMatrix;

use super::{create, dim_u32, expect_eof, expect_magic, open, read_f64s, read_string, truncated, write_f64s, write_string};
use crate::error::{Error, Result};
use crate::estimators::{Provenance, SampleOrigin, TrainingSet};
use crate::spectral::WavelengthGrid;

pub const TRAINING_MAGIC: &[u8; 4] = b"SPTS";

pub fn write_training_to(w: &mut impl Write, ts: &TrainingSet) -> Result<()> {
    w.write_all(TRAINING_MAGIC)?;
    w.write_u32::<LE>(dim_u32(ts.grid().count())?)?;
    w.write_u32::<LE>(dim_u32(ts.channels())?)?;
    w.write_u32::<LE>(dim_u32(ts.len())?)?;
    w.write_f64::<LE>(ts.grid().start_nm())?;
    w.write_f64::<LE>(ts.grid().step_nm())?;
    write_f64s(w, ts.reflectances().as_slice())?;
    write_f64s(w, ts.responses().as_slice())?;
    let p = &ts.provenance;
    w.write_f64::<LE>(p.fraction)?;
    w.write_u64::<LE>(p.seed)?;
    w.write_u32::<LE>(dim_u32(p.sources.len())?)?;
    for s in &p.sources {
        write_string(w, s)?;
    }
    w.write_u32::<LE>(dim_u32(p.origins.len())?)?;
    for o in &p.origins {
        w.write_u32::<LE>(o.source)?;
        w.write_u32::<LE>(o.pixel)?;
    }
    Ok(())
}

pub fn read_training_from(r: &mut impl Read) -> Result<TrainingSet> {
    expect_magic(r, TRAINING_MAGIC, || Error::CorruptFile("not a training set file".into()))?;
    let t = truncated("training set");
    let n = r.read_u32::<LE>().map_err(&t)? as usize;
    let m = r.read_u32::<LE>().map_err(&t)? as usize;
    let k = r.read_u32::<LE>().map_err(&t)? as usize;
    let start = r.read_f64::<LE>().map_err(&t)?;
    let step = r.read_f64::<LE>().map_err(&t)?;
    let grid = WavelengthGrid::new(start, step, n).map_err(|e| Error::CorruptFile(format!("training set: {e}")))?;
    let refl = read_f64s(r, n * k, "training reflectances")?;
    let resp = read_f64s(r, m * k, "training responses")?;
    let fraction = r.read_f64::<LE>().map_err(&t)?;
    let seed = r.read_u64::<LE>().map_err(&t)?;
    let n_sources = r.read_u32::<LE>().map_err(&t)?;
    let mut sources = Vec::new();
    for _ in 0..n_sources {
        sources.push(read_string(r, "training sources")?);
    }
    let n_origins = r.read_u32::<LE>().map_err(&t)?;
    let mut origins = Vec::new();
    for _ in 0..n_origins {
        let source = r.read_u32::<LE>().map_err(&t)?;
        let pixel = r.read_u32::<LE>().map_err(&t)?;
        if source >= n_sources {
            return Err(Error::CorruptFile(format!("training set: origin source {source} out of range")));
        }
        origins.push(SampleOrigin { source, pixel });
    }
    expect_eof(r, "training set")?;
    TrainingSet::new(
        grid,
        DMatrix::from_vec(n, k, refl),
        DMatrix::from_vec(m, k, resp),
        Provenance {
            sources,
            fraction,
            seed,
            origins,
        },
    )
}

pub fn write_training(path: impl AsRef<Path>, ts: &TrainingSet) -> Result<()> {
    let mut w = create(path.as_ref())?;
    write_training_to(&mut w, ts)?;
    w.flush()?;
    Ok(())
}

pub fn read_training(path: impl AsRef<Path>) -> Result<TrainingSet> {
    read_training_from(&mut open(path.as_ref())?)
}
