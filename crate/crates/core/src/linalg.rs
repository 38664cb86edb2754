//! Dense linear algebra helpers on top of `nalgebra`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Relative singular-value cutoff for Moore-Penrose pseudoinverses.
pub const PINV_RCOND: f64 = 1e-10;

/// Reciprocal condition number below which a square system counts as singular.
pub const SINGULAR_RCOND: f64 = 1e-13;

/// Moore-Penrose pseudoinverse via SVD; singular values at or below
/// `PINV_RCOND * sigma_max` are treated as zero.
pub fn pseudoinverse(a: &DMatrix<f64>) -> DMatrix<f64> {
    let (rows, cols) = a.shape();
    if rows == 0 || cols == 0 {
        return DMatrix::zeros(cols, rows);
    }
    let svd = a.clone().svd(true, true);
    let sigma_max = svd.singular_values.max();
    if sigma_max == 0.0 {
        return DMatrix::zeros(cols, rows);
    }
    svd.pseudo_inverse(PINV_RCOND * sigma_max)
        .expect("u and v were computed")
}

/// sigma_max / sigma_min; infinite for rank-deficient input.
pub fn condition_number(a: &DMatrix<f64>) -> f64 {
    if a.is_empty() {
        return f64::INFINITY;
    }
    let sv = a.singular_values();
    let max = sv.max();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Inverse of a square matrix, refusing numerically singular input.
pub fn inverse_checked(a: &DMatrix<f64>, context: &'static str) -> Result<DMatrix<f64>> {
    if !a.is_square() || a.is_empty() {
        return Err(Error::SingularSystem(context));
    }
    // NaN condition (non-finite input) counts as singular
    let rcond = 1.0 / condition_number(a);
    if rcond.is_nan() || rcond <= SINGULAR_RCOND {
        return Err(Error::SingularSystem(context));
    }
    a.clone()
        .try_inverse()
        .ok_or(Error::SingularSystem(context))
}

/// Columns of a column-major `rows x cols` slice as a matrix.
pub fn matrix_from_columns(rows: usize, cols: usize, data: &[f64]) -> DMatrix<f64> {
    DMatrix::from_column_slice(rows, cols, data)
}
