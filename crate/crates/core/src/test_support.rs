//! Explicit-loop reference implementations used as independent oracles in unit tests.

use nalgebra::DMatrix;

use crate::camera::{CameraSpec, NoiseModel};
use crate::rng::CounterRng;
use crate::spectral::WavelengthGrid;

pub fn random_matrix(rows: usize, cols: usize, seed: u64) -> DMatrix<f64> {
    let rng = CounterRng::new(seed, 0xAB);
    DMatrix::from_fn(rows, cols, |i, j| rng.uniform_at((i * cols + j) as u64))
}

pub fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

pub fn naive_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let k = b.len();
    let m = b[0].len();
    let mut out = vec![vec![0.0; m]; n];
    for i in 0..n {
        for j in 0..m {
            let mut s = 0.0;
            for l in 0..k {
                s += a[i][l] * b[l][j];
            }
            out[i][j] = s;
        }
    }
    out
}

pub fn naive_transpose(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    (0..a[0].len()).map(|j| a.iter().map(|row| row[j]).collect()).collect()
}

/// Gauss-Jordan with partial pivoting.
pub fn naive_inverse(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut aug: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| aug[x][col].abs().total_cmp(&aug[y][col].abs()))
            .unwrap();
        aug.swap(col, pivot);
        let p = aug[col][col];
        assert!(p.abs() > 1e-300, "singular");
        for v in aug[col].iter_mut() {
            *v /= p;
        }
        for row in 0..n {
            if row != col {
                let f = aug[row][col];
                if f != 0.0 {
                    for j in 0..2 * n {
                        aug[row][j] -= f * aug[col][j];
                    }
                }
            }
        }
    }
    aug.into_iter().map(|r| r[n..].to_vec()).collect()
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &[Vec<f64>]) -> f64 {
    let mut m = 0.0f64;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            m = m.max((a[(i, j)] - b[i][j]).abs());
        }
    }
    m
}

/// A camera whose system matrix is exactly `q` (rows must each sum to 1).
pub fn camera_with_system(grid: WavelengthGrid, q: DMatrix<f64>) -> CameraSpec {
    let m = q.nrows();
    let cam = CameraSpec::new(grid, q.clone(), vec![1.0; grid.count()], NoiseModel::none(m)).unwrap();
    assert!((cam.system_matrix() - q).abs().max() < 1e-14);
    cam
}
