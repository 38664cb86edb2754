//! Spectral estimators: fitting from training data and per-pixel application.
//!
//! | method          | sensitivities | illumination | reflectance | RGB values |
//! |-----------------|---------------|--------------|-------------|------------|
//! | `wiener_prior`  | yes           | yes          | yes         | no         |
//! | `wiener_data`   | no            | no           | yes         | yes        |
//! | `pseudoinverse` | no            | no           | yes         | yes        |
//! | `linear`        | yes           | yes          | yes         | no         |
//! | `imai_berns`    | no            | no           | yes         | yes        |
//! | `shi_healey`    | yes           | yes          | yes         | no         |
//!
//! Regression methods accept any [`PolyCombo`]; camera-based methods work on
//! the raw channel responses.

mod pca;
mod poly;
mod shi_healey;
mod training_set;

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rayon::prelude::*;

pub use pca::{pca_basis, pca_decompose, PcaBasis};
pub use poly::{PolyCombo, Term, PRESETS};
pub use shi_healey::{ShiHealeyBank, ShiHealeySelection};
pub use training_set::{expand_responses, Provenance, SampleOrigin, TrainingSet};

use crate::camera::CameraSpec;
use crate::error::{Error, Result};
use crate::linalg::{condition_number, inverse_checked, pseudoinverse};
use crate::spectral::{RgbImage, SpectralCube, Spectrum, WavelengthGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MethodKind {
    WienerPrior,
    WienerData,
    Pseudoinverse,
    Linear,
    ImaiBerns,
    ShiHealey,
}

/// One column of the prior-knowledge table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Requirement {
    Sensitivities,
    Illumination,
    Reflectance,
    RgbValues,
}

impl fmt::Display for Requirement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Requirement::Sensitivities => "Sensitivities",
            Requirement::Illumination => "Illumination",
            Requirement::Reflectance => "Reflectance",
            Requirement::RgbValues => "RGB Values",
        })
    }
}

impl MethodKind {
    pub const ALL: [MethodKind; 6] = [
        MethodKind::WienerPrior,
        MethodKind::WienerData,
        MethodKind::Pseudoinverse,
        MethodKind::Linear,
        MethodKind::ImaiBerns,
        MethodKind::ShiHealey,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            MethodKind::WienerPrior => "wiener_prior",
            MethodKind::WienerData => "wiener_data",
            MethodKind::Pseudoinverse => "pseudoinverse",
            MethodKind::Linear => "linear",
            MethodKind::ImaiBerns => "imai_berns",
            MethodKind::ShiHealey => "shi_healey",
        }
    }

    pub fn code(&self) -> u8 {
        match self {
            MethodKind::WienerPrior => 0,
            MethodKind::WienerData => 1,
            MethodKind::Pseudoinverse => 2,
            MethodKind::Linear => 3,
            MethodKind::ImaiBerns => 4,
            MethodKind::ShiHealey => 5,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.code() == code)
    }

    pub fn requirements(&self) -> &'static [Requirement] {
        use Requirement::*;
        match self {
            MethodKind::WienerPrior | MethodKind::Linear | MethodKind::ShiHealey => {
                &[Sensitivities, Illumination, Reflectance]
            }
            MethodKind::WienerData | MethodKind::Pseudoinverse | MethodKind::ImaiBerns => {
                &[Reflectance, RgbValues]
            }
        }
    }

    pub fn needs_camera(&self) -> bool {
        self.requirements().contains(&Requirement::Sensitivities)
    }

    /// Whether the method regresses on polynomial-expanded responses.
    pub fn uses_combo(&self) -> bool {
        !self.needs_camera()
    }
}

impl fmt::Display for MethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MethodKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        Self::ALL
            .into_iter()
            .find(|k| k.name() == norm)
            .or(match norm.as_str() {
                "wiener" => Some(MethodKind::WienerData),
                "pinv" => Some(MethodKind::Pseudoinverse),
                _ => None,
            })
            .ok_or_else(|| Error::InvalidInput(format!("unknown method {s:?}")))
    }
}

/// Fitted parameters; exactly one variant per method family.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelParams {
    /// `r_hat = W pe(rho)` (both Wiener forms and pseudoinverse).
    Matrix { w: DMatrix<f64> },
    /// Basis `V` (`N x d`) and system matrix `Lambda = Q V` (`M x d`).
    Linear {
        basis: DMatrix<f64>,
        lambda: DMatrix<f64>,
        operator: DMatrix<f64>,
    },
    /// Basis `V` (`N x d`) and weight regression `D` (`d x T`).
    ImaiBerns {
        basis: DMatrix<f64>,
        weights: DMatrix<f64>,
        operator: DMatrix<f64>,
    },
    ShiHealey(ShiHealeyBank),
}

/// Fit-time diagnostics; not persisted in model files.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitDiagnostics {
    pub samples: usize,
    /// Condition number of the matrix inverted (or pseudo-inverted) by the fit.
    pub condition: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimationModel {
    kind: MethodKind,
    grid: WavelengthGrid,
    combo: PolyCombo,
    params: Option<ModelParams>,
    pub diagnostics: Option<FitDiagnostics>,
}

impl EstimationModel {
    /// A model with no parameters; estimation fails with `ModelNotFitted`.
    pub fn unfitted(kind: MethodKind, grid: WavelengthGrid) -> Self {
        Self {
            kind,
            grid,
            combo: PolyCombo::linear(),
            params: None,
            diagnostics: None,
        }
    }

    /// Assemble a fitted model from stored parameters, checking the variant
    /// and dimensions against `kind`.
    pub fn from_params(
        kind: MethodKind,
        grid: WavelengthGrid,
        combo: PolyCombo,
        params: ModelParams,
    ) -> Result<Self> {
        let n = grid.count();
        let bad = |what: &str| Err(Error::ShapeMismatch(format!("{kind} model: {what}")));
        match (&params, kind) {
            (ModelParams::Matrix { w }, MethodKind::WienerPrior | MethodKind::WienerData | MethodKind::Pseudoinverse) => {
                if w.nrows() != n || (kind.uses_combo() && w.ncols() != combo.len()) {
                    return bad("W dimensions");
                }
            }
            (ModelParams::Linear { basis, lambda, .. }, MethodKind::Linear) => {
                if basis.nrows() != n || lambda.ncols() != basis.ncols() {
                    return bad("basis / Lambda dimensions");
                }
            }
            (ModelParams::ImaiBerns { basis, weights, .. }, MethodKind::ImaiBerns) => {
                if basis.nrows() != n || weights.nrows() != basis.ncols() || weights.ncols() != combo.len() {
                    return bad("basis / D dimensions");
                }
            }
            (ModelParams::ShiHealey(bank), MethodKind::ShiHealey) => {
                if bank.basis().nrows() != n {
                    return bad("bank dimensions");
                }
            }
            _ => return bad("parameters do not match the method"),
        }
        Ok(Self {
            kind,
            grid,
            combo,
            params: Some(params),
            diagnostics: None,
        })
    }

    pub fn kind(&self) -> MethodKind {
        self.kind
    }

    pub fn grid(&self) -> &WavelengthGrid {
        &self.grid
    }

    pub fn combo(&self) -> &PolyCombo {
        &self.combo
    }

    pub fn params(&self) -> Option<&ModelParams> {
        self.params.as_ref()
    }

    pub fn is_fitted(&self) -> bool {
        self.params.is_some()
    }

    /// Number of input features (`T`) the model consumes.
    pub fn term_count(&self) -> usize {
        match &self.params {
            Some(ModelParams::Matrix { w }) => w.ncols(),
            Some(ModelParams::Linear { lambda, .. }) => lambda.nrows(),
            Some(ModelParams::ImaiBerns { weights, .. }) => weights.ncols(),
            Some(ModelParams::ShiHealey(bank)) => bank.channels(),
            None => self.combo.len(),
        }
    }

    /// The estimation matrix for kinds that have one (`N x T`).
    pub fn operator(&self) -> Option<&DMatrix<f64>> {
        match self.params.as_ref()? {
            ModelParams::Matrix { w } => Some(w),
            ModelParams::Linear { operator, .. } | ModelParams::ImaiBerns { operator, .. } => Some(operator),
            ModelParams::ShiHealey(_) => None,
        }
    }

    /// Number of input channels expected by `estimate_into`.
    pub fn input_channels(&self) -> usize {
        match &self.params {
            Some(ModelParams::ShiHealey(bank)) => bank.channels(),
            Some(ModelParams::Linear { lambda, .. }) => lambda.nrows(),
            Some(ModelParams::Matrix { w }) if !self.kind.uses_combo() => w.ncols(),
            _ => 3,
        }
    }

    /// Estimate one pixel into `out` (length `N`). No clamping is applied.
    pub fn estimate_into(&self, rho: &[f64], out: &mut [f64]) -> Result<()> {
        let params = self.params.as_ref().ok_or(Error::ModelNotFitted)?;
        if rho.len() != self.input_channels() {
            return Err(Error::ShapeMismatch(format!(
                "{} responses, model expects {}",
                rho.len(),
                self.input_channels()
            )));
        }
        match params {
            ModelParams::ShiHealey(bank) => {
                let sel = bank.select(rho)?;
                out.copy_from_slice(&sel.reflectance);
            }
            _ => {
                let op = self.operator().expect("non-bank kinds have an operator");
                let mut features = [0.0f64; 32];
                let feats: &[f64] = if self.kind.uses_combo() {
                    let t = self.combo.len();
                    if t <= features.len() {
                        self.combo.expand_into(rho, &mut features[..t]);
                        &features[..t]
                    } else {
                        return apply_operator(op, &self.combo.expand(rho), out);
                    }
                } else {
                    rho
                };
                return apply_operator(op, feats, out);
            }
        }
        Ok(())
    }

    pub fn estimate_pixel(&self, rho: &[f64]) -> Result<Spectrum> {
        let mut out = vec![0.0; self.grid.count()];
        self.estimate_into(rho, &mut out)?;
        Spectrum::new(self.grid, out)
    }

    /// Shi-Healey search details for one pixel.
    pub fn estimate_shi_healey(&self, rho: &[f64]) -> Result<ShiHealeySelection> {
        match self.params.as_ref().ok_or(Error::ModelNotFitted)? {
            ModelParams::ShiHealey(bank) => bank.select(rho),
            _ => Err(Error::InvalidInput(format!("{} model is not shi_healey", self.kind))),
        }
    }

    /// Per-pixel estimation of a whole image, sequentially.
    pub fn estimate_cube(&self, image: &RgbImage) -> Result<SpectralCube> {
        let n = self.grid.count();
        let mut samples = vec![0.0; image.height() * image.width() * n];
        for (rgb, out) in image.pixels().zip(samples.chunks_exact_mut(n)) {
            self.estimate_into(rgb, out)?;
        }
        SpectralCube::from_samples(image.height(), image.width(), self.grid, samples)
    }

    /// Same result as [`estimate_cube`](Self::estimate_cube), with rows spread
    /// over the current rayon pool.
    pub fn estimate_cube_par(&self, image: &RgbImage) -> Result<SpectralCube> {
        let n = self.grid.count();
        let w = image.width();
        let mut samples = vec![0.0; image.height() * w * n];
        samples
            .par_chunks_mut(w * n)
            .zip(image.values().par_chunks(w * 3))
            .try_for_each(|(out_row, rgb_row)| {
                for (rgb, out) in rgb_row.chunks_exact(3).zip(out_row.chunks_exact_mut(n)) {
                    self.estimate_into(rgb, out)?;
                }
                Ok::<(), Error>(())
            })?;
        SpectralCube::from_samples(image.height(), w, self.grid, samples)
    }
}

#[inline]
fn apply_operator(op: &DMatrix<f64>, features: &[f64], out: &mut [f64]) -> Result<()> {
    out.fill(0.0);
    // column-major: accumulate one column per feature
    for (c, &f) in features.iter().enumerate() {
        let col = op.column(c);
        for (o, &v) in out.iter_mut().zip(col.iter()) {
            *o += v * f;
        }
    }
    Ok(())
}

fn check_reflectances(r: &DMatrix<f64>, grid: &WavelengthGrid) -> Result<()> {
    if r.ncols() == 0 {
        return Err(Error::EmptyTrainingSet);
    }
    if r.nrows() != grid.count() {
        return Err(Error::GridMismatch(format!(
            "{} reflectance rows for a {}-band grid",
            r.nrows(),
            grid.count()
        )));
    }
    Ok(())
}

/// Wiener estimation from prior statistics:
/// `W = Rss Q^t (Q Rss Q^t + Rdd)^-1` with `Rss = R R^t / k`.
pub fn fit_wiener_prior(
    reflectances: &DMatrix<f64>,
    camera: &CameraSpec,
    noise_autocorr: &DMatrix<f64>,
) -> Result<EstimationModel> {
    let grid = *camera.grid();
    check_reflectances(reflectances, &grid)?;
    let m = camera.channels();
    if noise_autocorr.shape() != (m, m) {
        return Err(Error::ShapeMismatch(format!("noise autocorrelation must be {m}x{m}")));
    }
    let k = reflectances.ncols() as f64;
    let r_ss = reflectances * reflectances.transpose() / k;
    let q = camera.system_matrix();
    let inner = q * &r_ss * q.transpose() + noise_autocorr;
    let condition = condition_number(&inner);
    let w = &r_ss * q.transpose() * inverse_checked(&inner, "Wiener Q*Rss*Q^t + Rdd")?;
    let mut model = EstimationModel::from_params(
        MethodKind::WienerPrior,
        grid,
        PolyCombo::linear(),
        ModelParams::Matrix { w },
    )?;
    model.diagnostics = Some(FitDiagnostics {
        samples: reflectances.ncols(),
        condition,
    });
    Ok(model)
}

/// Wiener estimation from training correlations: `W = (R Pe^t)(Pe Pe^t)^-1`.
pub fn fit_wiener_data(training: &TrainingSet, combo: &PolyCombo) -> Result<EstimationModel> {
    let pe = training.expanded_responses(combo)?;
    let k = training.len() as f64;
    let r_rp = training.reflectances() * pe.transpose() / k;
    let r_pp = &pe * pe.transpose() / k;
    let condition = condition_number(&r_pp);
    let w = r_rp * inverse_checked(&r_pp, "Wiener response autocorrelation")?;
    let mut model = EstimationModel::from_params(
        MethodKind::WienerData,
        *training.grid(),
        combo.clone(),
        ModelParams::Matrix { w },
    )?;
    model.diagnostics = Some(FitDiagnostics {
        samples: training.len(),
        condition,
    });
    Ok(model)
}

/// Least-squares mapping `W = R Pe^+`.
pub fn fit_pseudoinverse(training: &TrainingSet, combo: &PolyCombo) -> Result<EstimationModel> {
    let pe = training.expanded_responses(combo)?;
    let condition = condition_number(&pe);
    let w = training.reflectances() * pseudoinverse(&pe);
    let mut model = EstimationModel::from_params(
        MethodKind::Pseudoinverse,
        *training.grid(),
        combo.clone(),
        ModelParams::Matrix { w },
    )?;
    model.diagnostics = Some(FitDiagnostics {
        samples: training.len(),
        condition,
    });
    Ok(model)
}

/// Linear model: `r_hat = V Lambda^-1 rho` with `Lambda = Q V`
/// (`Lambda^+` when `d != M`).
pub fn fit_linear(reflectances: &DMatrix<f64>, camera: &CameraSpec, d: usize) -> Result<EstimationModel> {
    let grid = *camera.grid();
    check_reflectances(reflectances, &grid)?;
    let basis = pca_basis(reflectances, d)?;
    let lambda = camera.system_matrix() * &basis;
    let inv = if d == camera.channels() {
        inverse_checked(&lambda, "linear system matrix Lambda")?
    } else {
        pseudoinverse(&lambda)
    };
    let condition = condition_number(&lambda);
    let operator = &basis * inv;
    let mut model = EstimationModel::from_params(
        MethodKind::Linear,
        grid,
        PolyCombo::linear(),
        ModelParams::Linear {
            basis,
            lambda,
            operator,
        },
    )?;
    model.diagnostics = Some(FitDiagnostics {
        samples: reflectances.ncols(),
        condition,
    });
    Ok(model)
}

/// Imai-Berns: basis weights `B = V^t R` regressed on responses, `D = B Pe^+`,
/// `r_hat = V D pe(rho)`.
pub fn fit_imai_berns(training: &TrainingSet, d: usize, combo: &PolyCombo) -> Result<EstimationModel> {
    let basis = pca_basis(training.reflectances(), d)?;
    let pe = training.expanded_responses(combo)?;
    let b = basis.transpose() * training.reflectances();
    let weights = b * pseudoinverse(&pe);
    let operator = &basis * &weights;
    let mut model = EstimationModel::from_params(
        MethodKind::ImaiBerns,
        *training.grid(),
        combo.clone(),
        ModelParams::ImaiBerns {
            basis,
            weights,
            operator,
        },
    )?;
    model.diagnostics = Some(FitDiagnostics {
        samples: training.len(),
        condition: condition_number(&pe),
    });
    Ok(model)
}

/// Shi-Healey bank with `d` basis vectors; with `search_from = Some(d0)` every
/// basis size `d0..=d` is tried per pixel.
pub fn fit_shi_healey(
    reflectances: &DMatrix<f64>,
    camera: &CameraSpec,
    d: usize,
    search_from: Option<usize>,
) -> Result<EstimationModel> {
    let grid = *camera.grid();
    check_reflectances(reflectances, &grid)?;
    let m = camera.channels();
    if d <= m {
        return Err(Error::BadBasisCount {
            requested: d,
            max: grid.count().min(reflectances.ncols()),
        });
    }
    let basis = pca_basis(reflectances, d)?;
    let q = camera.system_matrix().clone();
    let condition = condition_number(&(&q * basis.columns(d - m, m)));
    let bank = ShiHealeyBank::new(reflectances.clone(), basis, q, search_from.unwrap_or(d))?;
    let mut model = EstimationModel::from_params(
        MethodKind::ShiHealey,
        grid,
        PolyCombo::linear(),
        ModelParams::ShiHealey(bank),
    )?;
    model.diagnostics = Some(FitDiagnostics {
        samples: reflectances.ncols(),
        condition,
    });
    Ok(model)
}

/// Default Shi-Healey basis size.
pub const SHI_HEALEY_DEFAULT_D: usize = 5;

/// A method with all its hyper-parameters, fit-able from a training set.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodSpec {
    pub kind: MethodKind,
    pub combo: PolyCombo,
    /// Basis count for linear / Imai-Berns / Shi-Healey.
    pub basis_count: usize,
    /// Shi-Healey: smallest basis size tried per pixel (`None` = fixed `basis_count`).
    pub basis_search_from: Option<usize>,
    /// Wiener prior: noise autocorrelation; `None` uses the camera's noise model.
    pub noise_autocorr: Option<DMatrix<f64>>,
}

impl MethodSpec {
    pub fn new(kind: MethodKind) -> Self {
        Self {
            kind,
            combo: PolyCombo::linear(),
            basis_count: match kind {
                MethodKind::ShiHealey => SHI_HEALEY_DEFAULT_D,
                _ => 3,
            },
            basis_search_from: None,
            noise_autocorr: None,
        }
    }

    pub fn with_combo(mut self, combo: PolyCombo) -> Self {
        self.combo = combo;
        self
    }

    pub fn with_basis_count(mut self, d: usize) -> Self {
        self.basis_count = d;
        self
    }

    /// Missing prior knowledge given what the caller has available.
    pub fn missing_requirements(&self, has_camera: bool, has_responses: bool) -> Vec<Requirement> {
        self.kind
            .requirements()
            .iter()
            .copied()
            .filter(|r| match r {
                Requirement::Sensitivities | Requirement::Illumination => !has_camera,
                Requirement::RgbValues => !has_responses,
                Requirement::Reflectance => false,
            })
            .collect()
    }

    fn require(&self, has_camera: bool, has_responses: bool) -> Result<()> {
        let missing = self.missing_requirements(has_camera, has_responses);
        if missing.is_empty() {
            return Ok(());
        }
        Err(Error::MissingPriorKnowledge {
            method: self.kind.name(),
            missing: missing.iter().map(|r| format!("\"{r}\"")).collect::<Vec<_>>().join(", "),
        })
    }

    /// Fit from a paired training set; camera-based methods use only its
    /// reflectances.
    pub fn fit(&self, training: &TrainingSet, camera: Option<&CameraSpec>) -> Result<EstimationModel> {
        self.require(camera.is_some(), training.channels() > 0)?;
        if self.kind.uses_combo() && !self.combo.is_linear() && training.channels() != 3 {
            return Err(Error::ShapeMismatch("polynomial combos need RGB responses".into()));
        }
        self.fit_reflectances(training.reflectances(), Some(training), camera)
    }

    /// Fit from reflectances alone (camera-based methods only).
    pub fn fit_from_reflectances(&self, reflectances: &DMatrix<f64>, camera: &CameraSpec) -> Result<EstimationModel> {
        self.require(true, false)?;
        self.fit_reflectances(reflectances, None, Some(camera))
    }

    fn fit_reflectances(
        &self,
        reflectances: &DMatrix<f64>,
        training: Option<&TrainingSet>,
        camera: Option<&CameraSpec>,
    ) -> Result<EstimationModel> {
        let training = || training.expect("checked by require");
        let camera = || camera.expect("checked by require");
        match self.kind {
            MethodKind::WienerPrior => {
                let cam = camera();
                let noise = self
                    .noise_autocorr
                    .clone()
                    .unwrap_or_else(|| cam.noise().autocorrelation());
                fit_wiener_prior(reflectances, cam, &noise)
            }
            MethodKind::WienerData => fit_wiener_data(training(), &self.combo),
            MethodKind::Pseudoinverse => fit_pseudoinverse(training(), &self.combo),
            MethodKind::Linear => fit_linear(reflectances, camera(), self.basis_count),
            MethodKind::ImaiBerns => fit_imai_berns(training(), self.basis_count, &self.combo),
            MethodKind::ShiHealey => fit_shi_healey(reflectances, camera(), self.basis_count, self.basis_search_from),
        }
    }
}

impl fmt::Display for MethodSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        if self.kind.uses_combo() {
            write!(f, " combo={}", self.combo)?;
        }
        if matches!(self.kind, MethodKind::Linear | MethodKind::ImaiBerns | MethodKind::ShiHealey) {
            write!(f, " d={}", self.basis_count)?;
        }
        if let Some(d0) = self.basis_search_from {
            write!(f, " search_from={d0}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests;
