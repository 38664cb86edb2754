//! Principal component basis of a set of reflectances.
//!
//! The basis is taken from the uncentred scatter matrix `R R^t`, so spectra are
//! reconstructed as `V w` with no mean term.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct PcaBasis {
    /// `N x d`, orthonormal columns in decreasing eigenvalue order.
    pub vectors: DMatrix<f64>,
    /// Eigenvalues of `R R^t` matching each column.
    pub eigenvalues: Vec<f64>,
}

/// Top-`d` eigenvectors of `R R^t` where `R` holds one spectrum per column.
pub fn pca_basis(reflectances: &DMatrix<f64>, d: usize) -> Result<DMatrix<f64>> {
    pca_decompose(reflectances, d).map(|b| b.vectors)
}

pub fn pca_decompose(reflectances: &DMatrix<f64>, d: usize) -> Result<PcaBasis> {
    let (n, k) = reflectances.shape();
    let max = n.min(k);
    if d == 0 || d > max {
        return Err(Error::BadBasisCount { requested: d, max });
    }
    let scatter = reflectances * reflectances.transpose();
    let eig = scatter.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    // stable sort keeps the decomposition's order among equal eigenvalues
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let mut vectors = DMatrix::zeros(n, d);
    let mut eigenvalues = Vec::with_capacity(d);
    for (col, &src) in order.iter().take(d).enumerate() {
        let mut v = eig.eigenvectors.column(src).into_owned();
        let mut pivot = 0;
        for i in 1..n {
            if v[i].abs() > v[pivot].abs() {
                pivot = i;
            }
        }
        if v[pivot] < 0.0 {
            v.neg_mut();
        }
        vectors.set_column(col, &v);
        eigenvalues.push(eig.eigenvalues[src]);
    }
    Ok(PcaBasis {
        vectors,
        eigenvalues,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::CounterRng;

    fn random(rows: usize, cols: usize, seed: u64) -> DMatrix<f64> {
        let rng = CounterRng::new(seed, 0);
        DMatrix::from_fn(rows, cols, |i, j| rng.uniform_at((i * cols + j) as u64))
    }

    #[test]
    fn repeated_column_gives_normalised_direction() {
        let r0 = random(31, 1, 1);
        let r = DMatrix::from_fn(31, 8, |i, _| r0[i]);
        let v = pca_basis(&r, 1).unwrap();
        let expect = &r0 / r0.norm();
        assert!((v - expect).abs().max() < 1e-10);
    }

    #[test]
    fn rank3_reconstruction() {
        let basis = random(31, 3, 2);
        let weights = random(3, 50, 3);
        let r = &basis * &weights;
        let v = pca_basis(&r, 3).unwrap();
        let recon = &v * v.transpose() * &r;
        assert!((recon - &r).abs().max() < 1e-8);
    }

    #[test]
    fn two_orthogonal_equal_norm_columns() {
        // Gram matrix is diag(4, 4): the scatter eigenvalue is 4 on the whole
        // span, so the leading vector is any unit vector of that plane.
        let mut r = DMatrix::zeros(4, 2);
        r[(0, 0)] = 2.0;
        r[(2, 1)] = 2.0;
        let b = pca_decompose(&r, 1).unwrap();
        let v = b.vectors.column(0);
        assert!(v[1].abs() < 1e-12 && v[3].abs() < 1e-12);
        assert!((v[0] * v[0] + v[2] * v[2] - 1.0).abs() < 1e-12);
        assert!((b.eigenvalues[0] - 4.0).abs() < 1e-12);
        let proj: Vec<f64> = r.column_iter().map(|c| c.dot(&v)).collect();
        assert!((proj[0].powi(2) + proj[1].powi(2) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn orthonormal_ordered_and_signed() {
        let r = random(31, 40, 5);
        let b = pca_decompose(&r, 6).unwrap();
        let gram = b.vectors.transpose() * &b.vectors;
        assert!((gram - DMatrix::identity(6, 6)).abs().max() < 1e-10);
        for w in b.eigenvalues.windows(2) {
            assert!(w[0] >= w[1]);
        }
        for col in b.vectors.column_iter() {
            let max = col.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
            assert!(max > 0.0);
        }
    }

    #[test]
    fn basis_count_range() {
        let r = random(31, 4, 6);
        assert!(matches!(pca_basis(&r, 0), Err(Error::BadBasisCount { .. })));
        assert!(matches!(pca_basis(&r, 5), Err(Error::BadBasisCount { requested: 5, max: 4 })));
        assert!(pca_basis(&r, 4).is_ok());
    }
}
