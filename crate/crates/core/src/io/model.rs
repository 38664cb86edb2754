//! `SPEM` estimation-model files.
//!
//! ```text
//! "SPEM" u16 version  u8 kind  f64 start_nm  f64 step_nm  u32 bands
//! u16 n_terms  { u8 r, u8 g, u8 b }*
//! kind-specific matrices, each: u32 rows  u32 cols  f64 row-major
//!   wiener_prior | wiener_data | pseudoinverse : W
//!   linear     : V  Lambda  operator
//!   imai_berns : V  D  operator
//!   shi_healey : V  Q  R  then u32 min_basis
//! ```
//!
//! Shi-Healey per-size operators are rebuilt from `V` and `Q` on load.
//! Fit diagnostics are not stored.

use std::io::{Read, Write};
use std::path::Path;

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};

use super::{create, dim_u32, expect_eof, expect_magic, open, read_matrix, truncated, write_matrix};
use crate::error::{Error, Result};
use crate::estimators::{EstimationModel, MethodKind, ModelParams, PolyCombo, ShiHealeyBank, Term};
use crate::spectral::WavelengthGrid;

pub const MODEL_MAGIC: &[u8; 4] = b"SPEM";
pub const MODEL_VERSION: u16 = 1;

pub fn write_model_to(w: &mut impl Write, model: &EstimationModel) -> Result<()> {
    let params = model.params().ok_or(Error::ModelNotFitted)?;
    w.write_all(MODEL_MAGIC)?;
    w.write_u16::<LE>(MODEL_VERSION)?;
    w.write_u8(model.kind().code())?;
    let g = model.grid();
    w.write_f64::<LE>(g.start_nm())?;
    w.write_f64::<LE>(g.step_nm())?;
    w.write_u32::<LE>(dim_u32(g.count())?)?;
    let terms = model.combo().terms();
    w.write_u16::<LE>(terms.len() as u16)?;
    for t in terms {
        w.write_all(&t.0)?;
    }
    match params {
        ModelParams::Matrix { w: m } => write_matrix(w, m)?,
        ModelParams::Linear {
            basis,
            lambda,
            operator,
        } => {
            write_matrix(w, basis)?;
            write_matrix(w, lambda)?;
            write_matrix(w, operator)?;
        }
        ModelParams::ImaiBerns {
            basis,
            weights,
            operator,
        } => {
            write_matrix(w, basis)?;
            write_matrix(w, weights)?;
            write_matrix(w, operator)?;
        }
        ModelParams::ShiHealey(bank) => {
            write_matrix(w, bank.basis())?;
            write_matrix(w, bank.system())?;
            write_matrix(w, bank.reflectances())?;
            w.write_u32::<LE>(dim_u32(bank.min_basis())?)?;
        }
    }
    Ok(())
}

pub fn read_model_from(r: &mut impl Read) -> Result<EstimationModel> {
    expect_magic(r, MODEL_MAGIC, || Error::CorruptFile("not a model file".into()))?;
    let t = truncated("model header");
    let version = r.read_u16::<LE>().map_err(&t)?;
    if version != MODEL_VERSION {
        return Err(Error::UnsupportedFormat(format!("model version {version}")));
    }
    let code = r.read_u8().map_err(&t)?;
    let kind = MethodKind::from_code(code).ok_or_else(|| Error::CorruptFile(format!("model: unknown kind {code}")))?;
    let start = r.read_f64::<LE>().map_err(&t)?;
    let step = r.read_f64::<LE>().map_err(&t)?;
    let bands = r.read_u32::<LE>().map_err(&t)? as usize;
    let grid = WavelengthGrid::new(start, step, bands).map_err(|e| Error::CorruptFile(format!("model: {e}")))?;
    let n_terms = r.read_u16::<LE>().map_err(&t)?;
    let mut terms = Vec::with_capacity(n_terms as usize);
    for _ in 0..n_terms {
        let mut e = [0u8; 3];
        r.read_exact(&mut e).map_err(&t)?;
        terms.push(Term(e));
    }
    let combo = PolyCombo::new(terms).map_err(|e| Error::CorruptFile(format!("model combo: {e}")))?;
    let params = match kind {
        MethodKind::WienerPrior | MethodKind::WienerData | MethodKind::Pseudoinverse => ModelParams::Matrix {
            w: read_matrix(r, "model W")?,
        },
        MethodKind::Linear => ModelParams::Linear {
            basis: read_matrix(r, "model V")?,
            lambda: read_matrix(r, "model Lambda")?,
            operator: read_matrix(r, "model operator")?,
        },
        MethodKind::ImaiBerns => ModelParams::ImaiBerns {
            basis: read_matrix(r, "model V")?,
            weights: read_matrix(r, "model D")?,
            operator: read_matrix(r, "model operator")?,
        },
        MethodKind::ShiHealey => {
            let basis = read_matrix(r, "model V")?;
            let system = read_matrix(r, "model Q")?;
            let refl = read_matrix(r, "model bank")?;
            let min_basis = r.read_u32::<LE>().map_err(&t)? as usize;
            ModelParams::ShiHealey(ShiHealeyBank::new(refl, basis, system, min_basis)?)
        }
    };
    expect_eof(r, "model")?;
    EstimationModel::from_params(kind, grid, combo, params).map_err(|e| Error::CorruptFile(e.to_string()))
}

pub fn write_model(path: impl AsRef<Path>, model: &EstimationModel) -> Result<()> {
    let mut w = create(path.as_ref())?;
    write_model_to(&mut w, model)?;
    w.flush()?;
    Ok(())
}

pub fn read_model(path: impl AsRef<Path>) -> Result<EstimationModel> {
    read_model_from(&mut open(path.as_ref())?)
}
