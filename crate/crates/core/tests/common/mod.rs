//! Independent oracles for integration tests: explicit loops only, no
//! library estimators or metrics.

#![allow(dead_code)]

use spectracast::rng::CounterRng;
use spectracast::spectral::{ColorimetryTables, SpectralCube, WavelengthGrid};

pub type Rows = Vec<Vec<f64>>;

pub fn uniform_rows(rows: usize, cols: usize, seed: u64, lo: f64, hi: f64) -> Rows {
    let rng = CounterRng::new(seed, 0x7E57);
    (0..rows)
        .map(|i| (0..cols).map(|j| rng.range_at((i * cols + j) as u64, lo, hi)).collect())
        .collect()
}

pub fn mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Rows {
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    let mut out = vec![vec![0.0; m]; n];
    for i in 0..n {
        for l in 0..k {
            let f = a[i][l];
            for j in 0..m {
                out[i][j] += f * b[l][j];
            }
        }
    }
    out
}

pub fn transpose(a: &[Vec<f64>]) -> Rows {
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

/// Gauss-Jordan with partial pivoting.
pub fn inverse(a: &[Vec<f64>]) -> Rows {
    let n = a.len();
    let mut aug: Rows = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| aug[x][c].abs().total_cmp(&aug[y][c].abs())).unwrap();
        aug.swap(c, p);
        let d = aug[c][c];
        assert!(d.abs() > 1e-300, "oracle inverse: singular");
        aug[c].iter_mut().for_each(|v| *v /= d);
        for r in 0..n {
            if r != c {
                let f = aug[r][c];
                if f != 0.0 {
                    for j in 0..2 * n {
                        aug[r][j] -= f * aug[c][j];
                    }
                }
            }
        }
    }
    aug.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// Least-squares `W` with `W P ~ R` via normal equations, `R` is `N x k`, `P` is `T x k`.
pub fn least_squares(r: &[Vec<f64>], p: &[Vec<f64>]) -> Rows {
    let pt = transpose(p);
    mul(&mul(r, &pt), &inverse(&mul(p, &pt)))
}

/// Polynomial terms as exponent triples, evaluated explicitly.
pub fn expand(rgb: &[f64], terms: &[[u8; 3]]) -> Vec<f64> {
    terms
        .iter()
        .map(|e| (0..3).map(|c| rgb[c].powi(e[c] as i32)).product())
        .collect()
}

pub const SQ6: [[u8; 3]; 6] = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [2, 0, 0], [0, 2, 0], [0, 0, 2]];

pub fn rmse(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..a.len() {
        s += (a[i] - b[i]) * (a[i] - b[i]);
    }
    (s / a.len() as f64).sqrt()
}

pub fn gfc(a: &[f64], b: &[f64]) -> f64 {
    let (mut d, mut na, mut nb) = (0.0, 0.0, 0.0);
    for i in 0..a.len() {
        d += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    d.abs() / (na.sqrt() * nb.sqrt())
}

/// CIE L*a*b* of a reflectance under D65, straight from the tables.
pub fn lab(r: &[f64], t: &ColorimetryTables) -> [f64; 3] {
    let n = r.len();
    let (mut x, mut y, mut z, mut yw, mut xw, mut zw) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        x += t.d65[i] * t.cmf_x[i] * r[i];
        y += t.d65[i] * t.cmf_y[i] * r[i];
        z += t.d65[i] * t.cmf_z[i] * r[i];
        xw += t.d65[i] * t.cmf_x[i];
        yw += t.d65[i] * t.cmf_y[i];
        zw += t.d65[i] * t.cmf_z[i];
    }
    let f = |v: f64| {
        let e = 216.0 / 24389.0;
        let k = 24389.0 / 27.0;
        if v > e {
            v.cbrt()
        } else {
            (k * v + 16.0) / 116.0
        }
    };
    let (fx, fy, fz) = (f(x / xw), f(y / yw), f(z / zw));
    [116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)]
}

pub fn delta_e(a: &[f64], b: &[f64], t: &ColorimetryTables) -> f64 {
    let (la, lb) = (lab(a, t), lab(b, t));
    ((la[0] - lb[0]).powi(2) + (la[1] - lb[1]).powi(2) + (la[2] - lb[2]).powi(2)).sqrt()
}

/// Three smooth, positive basis spectra on `grid`, as columns of an `N x 3` row matrix.
pub fn smooth_basis3(grid: &WavelengthGrid) -> Rows {
    (0..grid.count())
        .map(|i| {
            let t = i as f64 / (grid.count() - 1) as f64;
            vec![1.0, 0.5 + 0.5 * (std::f64::consts::PI * t).cos(), 0.5 + 0.5 * (3.0 * t).sin()]
        })
        .collect()
}

/// `H x W` cube whose pixels are `basis * c` with per-pixel coefficients in `[lo, hi]`.
pub fn span_cube(h: usize, w: usize, grid: WavelengthGrid, basis: &[Vec<f64>], seed: u64, lo: f64, hi: f64) -> SpectralCube {
    let d = basis[0].len();
    let coef = uniform_rows(h * w, d, seed, lo, hi);
    SpectralCube::from_fn(h, w, grid, |y, x, px| {
        let c = &coef[y * w + x];
        for (b, v) in px.iter_mut().enumerate() {
            *v = (0..d).map(|j| basis[b][j] * c[j]).sum();
        }
    })
    .unwrap()
}

pub fn cube_pixels(c: &SpectralCube) -> Rows {
    c.pixels().map(|p| p.to_vec()).collect()
}
