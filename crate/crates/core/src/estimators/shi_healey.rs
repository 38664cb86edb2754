//! Per-pixel constrained search over a bank of training reflectances.
//!
//! The basis `V = [V1 | V2]` has `d > M` columns with `V2` the last `M`. Every
//! candidate is forced to reproduce the observed response exactly:
//!
//! ```text
//! r_hat = V1 w1 + V2 (Q V2)^-1 (rho - Q V1 w1)
//! ```
//!
//! and `w1` is fitted to each training spectrum `r_i` in the least-squares
//! sense. The candidate closest to its own `r_i` wins.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{inverse_checked, pseudoinverse};

/// Precomputed operators for one basis size `d`.
#[derive(Debug, Clone, PartialEq)]
struct Stage {
    d: usize,
    /// `V2 (Q V2)^-1`, `N x M`.
    back_projection: DMatrix<f64>,
    /// `V1 - V2 (Q V2)^-1 Q V1`, `N x (d - M)`.
    free: DMatrix<f64>,
    /// Pseudoinverse of `free`.
    free_pinv: DMatrix<f64>,
}

impl Stage {
    fn new(basis: &DMatrix<f64>, q: &DMatrix<f64>, d: usize) -> Result<Self> {
        let m = q.nrows();
        let n = basis.nrows();
        let v1 = basis.columns(0, d - m).into_owned();
        let v2 = basis.columns(d - m, m).into_owned();
        let qv2_inv = inverse_checked(&(q * &v2), "Shi-Healey Q*V2")?;
        let back_projection = &v2 * qv2_inv;
        let free = if d > m {
            &v1 - &back_projection * (q * &v1)
        } else {
            DMatrix::zeros(n, 0)
        };
        let free_pinv = pseudoinverse(&free);
        Ok(Self {
            d,
            back_projection,
            free,
            free_pinv,
        })
    }
}

/// Training bank plus basis for the constrained search.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiHealeyBank {
    reflectances: DMatrix<f64>,
    basis: DMatrix<f64>,
    system: DMatrix<f64>,
    min_basis: usize,
    stages: Vec<Stage>,
}

/// Result of one constrained search.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiHealeySelection {
    pub reflectance: Vec<f64>,
    /// Index of the winning training spectrum.
    pub index: usize,
    /// Basis size of the winning candidate.
    pub basis_count: usize,
    /// `|r_hat - r_i|` of the winner.
    pub distance: f64,
}

impl ShiHealeyBank {
    /// `basis` is `N x d` (ordered principal components), `system` is `Q`.
    /// With `min_basis < d`, every size `min_basis..=d` is tried per pixel and
    /// the best candidate over all sizes is kept.
    pub fn new(
        reflectances: DMatrix<f64>,
        basis: DMatrix<f64>,
        system: DMatrix<f64>,
        min_basis: usize,
    ) -> Result<Self> {
        if reflectances.ncols() == 0 {
            return Err(Error::EmptyTrainingSet);
        }
        let m = system.nrows();
        let d = basis.ncols();
        if d <= m || min_basis <= m || min_basis > d {
            return Err(Error::BadBasisCount {
                requested: d.min(min_basis),
                max: basis.nrows(),
            });
        }
        if basis.nrows() != system.ncols() || reflectances.nrows() != basis.nrows() {
            return Err(Error::ShapeMismatch("Shi-Healey bank dimensions".into()));
        }
        let stages = (min_basis..=d)
            .map(|k| Stage::new(&basis, &system, k))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            reflectances,
            basis,
            system,
            min_basis,
            stages,
        })
    }

    pub fn reflectances(&self) -> &DMatrix<f64> {
        &self.reflectances
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn system(&self) -> &DMatrix<f64> {
        &self.system
    }

    pub fn basis_count(&self) -> usize {
        self.basis.ncols()
    }

    pub fn min_basis(&self) -> usize {
        self.min_basis
    }

    pub fn channels(&self) -> usize {
        self.system.nrows()
    }

    /// First `d - M` basis columns.
    pub fn v1(&self) -> DMatrix<f64> {
        let d = self.basis_count();
        self.basis.columns(0, d - self.channels()).into_owned()
    }

    /// Last `M` basis columns.
    pub fn v2(&self) -> DMatrix<f64> {
        let d = self.basis_count();
        let m = self.channels();
        self.basis.columns(d - m, m).into_owned()
    }

    pub fn select(&self, rho: &[f64]) -> Result<ShiHealeySelection> {
        let m = self.channels();
        if rho.len() != m {
            return Err(Error::ShapeMismatch(format!("{} responses for {m} channels", rho.len())));
        }
        let rho = DVector::from_column_slice(rho);
        let n = self.basis.nrows();
        let mut diff = DVector::zeros(n);
        let mut best: Option<(f64, usize, usize)> = None;
        let mut best_spectrum = DVector::zeros(n);

        for (stage_idx, stage) in self.stages.iter().enumerate() {
            let anchor = &stage.back_projection * &rho;
            let free_dim = stage.free.ncols();
            let mut w1 = DVector::zeros(free_dim);
            for i in 0..self.reflectances.ncols() {
                let r_i = self.reflectances.column(i);
                diff.copy_from(&r_i);
                diff -= &anchor;
                w1.gemv(1.0, &stage.free_pinv, &diff, 0.0);
                // r_hat - r_i = free * w1 - (r_i - anchor)
                let mut err = 0.0;
                for row in 0..n {
                    let mut fit = 0.0;
                    for c in 0..free_dim {
                        fit += stage.free[(row, c)] * w1[c];
                    }
                    let e = fit - diff[row];
                    err += e * e;
                }
                if best.is_none_or(|(b, _, _)| err < b) {
                    best = Some((err, i, stage_idx));
                    best_spectrum.copy_from(&anchor);
                    best_spectrum.gemv(1.0, &stage.free, &w1, 1.0);
                }
            }
        }
        let (err, index, stage_idx) = best.ok_or(Error::EmptyTrainingSet)?;
        Ok(ShiHealeySelection {
            reflectance: best_spectrum.as_slice().to_vec(),
            index,
            basis_count: self.stages[stage_idx].d,
            distance: err.sqrt(),
        })
    }
}
