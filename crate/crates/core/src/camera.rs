//! Camera forward model (`rho = S L r + noise`) and colorimetric conversions.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::rng::CounterRng;
use crate::spectral::{ColorimetryTables, RgbImage, SpectralCube, Spectrum, WavelengthGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    None,
    AdditiveGaussian,
}

/// Additive per-channel sensor noise.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    kind: NoiseKind,
    sigma: Vec<f64>,
    seed: u64,
}

impl NoiseModel {
    pub fn none(channels: usize) -> Self {
        Self {
            kind: NoiseKind::None,
            sigma: vec![0.0; channels],
            seed: 0,
        }
    }

    pub fn gaussian(sigma: Vec<f64>, seed: u64) -> Result<Self> {
        if sigma.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err(Error::InvalidInput("noise sigma must be finite and >= 0".into()));
        }
        Ok(Self {
            kind: NoiseKind::AdditiveGaussian,
            sigma,
            seed,
        })
    }

    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `diag(sigma^2)`.
    pub fn autocorrelation(&self) -> DMatrix<f64> {
        let m = self.sigma.len();
        DMatrix::from_fn(m, m, |i, j| if i == j { self.sigma[i] * self.sigma[i] } else { 0.0 })
    }
}

/// Sensor sensitivities, illuminant and noise on a wavelength grid.
///
/// `white_scale` is derived so a perfect reflector produces a response of one
/// in every channel; the cached system matrix already includes it.
#[derive(Debug, Clone, PartialEq)]
pub struct CameraSpec {
    grid: WavelengthGrid,
    sensitivities: DMatrix<f64>,
    illuminant: Vec<f64>,
    noise: NoiseModel,
    white_scale: Vec<f64>,
    system: DMatrix<f64>,
}

impl CameraSpec {
    pub fn new(
        grid: WavelengthGrid,
        sensitivities: DMatrix<f64>,
        illuminant: Vec<f64>,
        noise: NoiseModel,
    ) -> Result<Self> {
        let (m, n) = sensitivities.shape();
        if m == 0 {
            return Err(Error::InvalidInput("camera needs at least one channel".into()));
        }
        if n != grid.count() || illuminant.len() != n {
            return Err(Error::GridMismatch(format!(
                "sensitivities {m}x{n}, illuminant {} for {}-band grid",
                illuminant.len(),
                grid.count()
            )));
        }
        let valid = |v: &f64| v.is_finite() && *v >= 0.0;
        if !sensitivities.iter().all(valid) || !illuminant.iter().all(valid) {
            return Err(Error::InvalidInput(
                "sensitivities and illuminant must be finite and non-negative".into(),
            ));
        }
        if noise.sigma.len() != m {
            return Err(Error::ShapeMismatch(format!(
                "{} noise sigmas for {m} channels",
                noise.sigma.len()
            )));
        }
        let mut white_scale = Vec::with_capacity(m);
        for i in 0..m {
            let white: f64 = (0..n).map(|j| sensitivities[(i, j)] * illuminant[j]).sum();
            // a blind channel keeps unit scale and a zero row in Q
            white_scale.push(if white > 0.0 { 1.0 / white } else { 1.0 });
        }
        let system = DMatrix::from_fn(m, n, |i, j| white_scale[i] * sensitivities[(i, j)] * illuminant[j]);
        Ok(Self {
            grid,
            sensitivities,
            illuminant,
            noise,
            white_scale,
            system,
        })
    }

    /// Three Gaussian channels (R 600 nm, G 550 nm, B 450 nm; sigma 30 nm) under D65.
    pub fn gaussian_rgb(grid: &WavelengthGrid) -> Self {
        let peaks = [600.0, 550.0, 450.0];
        let sigma = 30.0;
        let s = DMatrix::from_fn(3, grid.count(), |i, j| {
            let d = grid.wavelength(j) - peaks[i];
            (-0.5 * d * d / (sigma * sigma)).exp()
        });
        let d65 = ColorimetryTables::load(grid).d65;
        Self::new(*grid, s, d65, NoiseModel::none(3)).expect("preset is valid")
    }

    /// CIE 1931 colour matching functions under D65: responses are XYZ scaled
    /// so the D65 white point maps to (1, 1, 1).
    pub fn colorimetric(grid: &WavelengthGrid) -> Self {
        let t = ColorimetryTables::load(grid);
        let rows = [&t.cmf_x, &t.cmf_y, &t.cmf_z];
        let s = DMatrix::from_fn(3, grid.count(), |i, j| rows[i][j]);
        Self::new(*grid, s, t.d65, NoiseModel::none(3)).expect("preset is valid")
    }

    pub fn with_noise(mut self, noise: NoiseModel) -> Result<Self> {
        if noise.sigma.len() != self.channels() {
            return Err(Error::ShapeMismatch("noise channel count".into()));
        }
        self.noise = noise;
        Ok(self)
    }

    pub fn grid(&self) -> &WavelengthGrid {
        &self.grid
    }

    pub fn channels(&self) -> usize {
        self.sensitivities.nrows()
    }

    pub fn sensitivities(&self) -> &DMatrix<f64> {
        &self.sensitivities
    }

    pub fn illuminant(&self) -> &[f64] {
        &self.illuminant
    }

    pub fn noise(&self) -> &NoiseModel {
        &self.noise
    }

    pub fn white_scale(&self) -> &[f64] {
        &self.white_scale
    }

    /// `Q[i][j] = white_scale[i] * S[i][j] * L[j]`.
    pub fn system_matrix(&self) -> &DMatrix<f64> {
        &self.system
    }

    /// Noise-free `Q r` written into `out`.
    #[inline]
    pub fn response_into(&self, reflectance: &[f64], out: &mut [f64]) {
        let q = &self.system;
        for (i, o) in out.iter_mut().enumerate() {
            *o = q.row(i).iter().zip(reflectance).map(|(a, b)| a * b).sum();
        }
    }

    /// `Q r + delta`. Noise for call `counter` is a pure function of the noise
    /// seed, the channel and the counter, so concurrent callers stay reproducible.
    pub fn simulate_response(&self, r: &Spectrum, counter: u64) -> Result<Vec<f64>> {
        self.grid.ensure_same(r.grid())?;
        let mut out = vec![0.0; self.channels()];
        self.response_into(r.values(), &mut out);
        if self.noise.kind == NoiseKind::AdditiveGaussian {
            for (i, o) in out.iter_mut().enumerate() {
                let rng = CounterRng::new(self.noise.seed, i as u64);
                *o += self.noise.sigma[i] * rng.normal_at(counter);
            }
        }
        Ok(out)
    }

    /// Noise-free render of a cube, clipped to `[0, 1]`.
    pub fn render_rgb_cube(&self, cube: &SpectralCube) -> Result<RenderedImage> {
        if self.channels() != 3 {
            return Err(Error::InvalidInput(format!(
                "RGB rendering needs 3 channels, camera has {}",
                self.channels()
            )));
        }
        self.grid.ensure_same(cube.grid())?;
        let mut values = vec![0.0; cube.pixel_count() * 3];
        let mut clipped = 0;
        for (px, out) in cube.pixels().zip(values.chunks_exact_mut(3)) {
            self.response_into(px, out);
            for v in out.iter_mut() {
                if !(0.0..=1.0).contains(v) {
                    *v = v.clamp(0.0, 1.0);
                    clipped += 1;
                }
            }
        }
        Ok(RenderedImage {
            image: RgbImage::new(cube.height(), cube.width(), values)?,
            clipped,
        })
    }
}

#[derive(Debug, Clone)]
pub struct RenderedImage {
    pub image: RgbImage,
    /// Number of channel values that fell outside `[0, 1]`.
    pub clipped: usize,
}

/// Precomputed D65-weighted colour matching functions, `Y(white) = 100`.
#[derive(Debug, Clone)]
pub struct Colorimeter {
    grid: WavelengthGrid,
    weights: [Vec<f64>; 3],
    white: [f64; 3],
}

impl Colorimeter {
    pub fn new(tables: &ColorimetryTables) -> Self {
        let norm: f64 = tables.d65.iter().zip(&tables.cmf_y).map(|(l, y)| l * y).sum();
        let k = 100.0 / norm;
        let weigh = |cmf: &[f64]| -> Vec<f64> {
            tables.d65.iter().zip(cmf).map(|(l, c)| k * l * c).collect()
        };
        let weights = [weigh(&tables.cmf_x), weigh(&tables.cmf_y), weigh(&tables.cmf_z)];
        let white = [
            weights[0].iter().sum(),
            weights[1].iter().sum(),
            weights[2].iter().sum(),
        ];
        Self {
            grid: *tables.grid(),
            weights,
            white,
        }
    }

    pub fn grid(&self) -> &WavelengthGrid {
        &self.grid
    }

    /// XYZ of a perfect reflector.
    pub fn white_point(&self) -> [f64; 3] {
        self.white
    }

    #[inline]
    pub fn xyz(&self, reflectance: &[f64]) -> [f64; 3] {
        let dot = |w: &[f64]| w.iter().zip(reflectance).map(|(a, b)| a * b).sum::<f64>();
        [dot(&self.weights[0]), dot(&self.weights[1]), dot(&self.weights[2])]
    }

    #[inline]
    pub fn lab(&self, reflectance: &[f64]) -> [f64; 3] {
        lab_from_xyz(self.xyz(reflectance), self.white)
    }
}

pub fn xyz_from_spectrum(r: &Spectrum, tables: &ColorimetryTables) -> Result<[f64; 3]> {
    tables.grid().ensure_same(r.grid())?;
    Ok(Colorimeter::new(tables).xyz(r.values()))
}

/// CIE 1976 L*a*b* relative to `white`.
pub fn lab_from_xyz(xyz: [f64; 3], white: [f64; 3]) -> [f64; 3] {
    const DELTA: f64 = 6.0 / 29.0;
    fn f(t: f64) -> f64 {
        if t > DELTA * DELTA * DELTA {
            t.cbrt()
        } else {
            t / (3.0 * DELTA * DELTA) + 4.0 / 29.0
        }
    }
    let fx = f(xyz[0] / white[0]);
    let fy = f(xyz[1] / white[1]);
    let fz = f(xyz[2] / white[2]);
    [116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid3() -> WavelengthGrid {
        WavelengthGrid::new(400.0, 100.0, 3).unwrap()
    }

    #[test]
    fn identity_sensitivity_gives_identity_system() {
        let s = DMatrix::<f64>::identity(3, 3);
        let cam = CameraSpec::new(grid3(), s.clone(), vec![1.0; 3], NoiseModel::none(3)).unwrap();
        assert_eq!(cam.system_matrix(), &s);
        assert_eq!(cam.white_scale(), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn zero_illuminant_gives_zero_system() {
        let s = DMatrix::<f64>::identity(3, 3);
        let cam = CameraSpec::new(grid3(), s, vec![0.0; 3], NoiseModel::none(3)).unwrap();
        assert!(cam.system_matrix().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn system_matrix_matches_elementwise_loop() {
        let g = WavelengthGrid::default();
        let rng = CounterRng::new(3, 0);
        let s = DMatrix::from_fn(3, 31, |i, j| rng.uniform_at((i * 31 + j) as u64));
        let l: Vec<f64> = (0..31).map(|j| 0.5 + rng.uniform_at(1000 + j as u64)).collect();
        let cam = CameraSpec::new(g, s.clone(), l.clone(), NoiseModel::none(3)).unwrap();
        let q = cam.system_matrix();
        for i in 0..3 {
            let mut total = 0.0;
            for j in 0..31 {
                total += s[(i, j)] * l[j];
            }
            for j in 0..31 {
                let oracle = s[(i, j)] * l[j] / total;
                assert!((q[(i, j)] - oracle).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn white_and_black_responses() {
        let g = WavelengthGrid::default();
        for cam in [CameraSpec::gaussian_rgb(&g), CameraSpec::colorimetric(&g)] {
            let w = cam.simulate_response(&Spectrum::constant(g, 1.0), 0).unwrap();
            let b = cam.simulate_response(&Spectrum::constant(g, 0.0), 0).unwrap();
            for v in w {
                assert!((v - 1.0).abs() < 1e-12);
            }
            assert_eq!(b, vec![0.0; 3]);
        }
    }

    #[test]
    fn response_matches_dot_product_oracle() {
        let g = WavelengthGrid::default();
        let cam = CameraSpec::gaussian_rgb(&g);
        let rng = CounterRng::new(11, 0);
        let r: Vec<f64> = (0..31).map(|j| rng.uniform_at(j)).collect();
        let resp = cam.simulate_response(&Spectrum::new(g, r.clone()).unwrap(), 0).unwrap();
        let d65 = ColorimetryTables::load(&g).d65;
        let peaks = [600.0, 550.0, 450.0];
        for i in 0..3 {
            let sens = |j: usize| (-0.5 * ((g.wavelength(j) - peaks[i]) / 30.0f64).powi(2)).exp();
            let num: f64 = (0..31).map(|j| sens(j) * d65[j] * r[j]).sum();
            let den: f64 = (0..31).map(|j| sens(j) * d65[j]).sum();
            assert!((resp[i] - num / den).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let cam = CameraSpec::gaussian_rgb(&WavelengthGrid::default());
        let r = Spectrum::constant(grid3(), 0.5);
        assert!(matches!(cam.simulate_response(&r, 0), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn noise_is_deterministic() {
        let g = WavelengthGrid::default();
        let cam = CameraSpec::gaussian_rgb(&g)
            .with_noise(NoiseModel::gaussian(vec![0.01; 3], 5).unwrap())
            .unwrap();
        let r = Spectrum::constant(g, 0.3);
        let a = cam.simulate_response(&r, 17).unwrap();
        let b = cam.simulate_response(&r, 17).unwrap();
        let c = cam.simulate_response(&r, 18).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(cam.noise().autocorrelation()[(1, 1)], 1e-4);
    }

    #[test]
    fn render_matches_per_pixel_simulation() {
        let g = WavelengthGrid::default();
        let cam = CameraSpec::gaussian_rgb(&g);
        let rng = CounterRng::new(4, 0);
        let cube = SpectralCube::from_fn(2, 2, g, |y, x, px| {
            for (b, v) in px.iter_mut().enumerate() {
                *v = rng.uniform_at(((y * 2 + x) * 31 + b) as u64);
            }
        })
        .unwrap();
        let out = cam.render_rgb_cube(&cube).unwrap();
        assert_eq!(out.clipped, 0);
        for y in 0..2 {
            for x in 0..2 {
                let oracle = cam.simulate_response(&cube.spectrum(y, x), 0).unwrap();
                assert_eq!(out.image.pixel(y, x).to_vec(), oracle);
            }
        }
    }

    #[test]
    fn render_extremes_and_clipping() {
        let g = WavelengthGrid::default();
        let cam = CameraSpec::gaussian_rgb(&g);
        let white = SpectralCube::from_fn(2, 2, g, |_, _, px| px.fill(1.0)).unwrap();
        let img = cam.render_rgb_cube(&white).unwrap().image;
        assert!(img.values().iter().all(|v| (v - 1.0).abs() < 1e-12));
        let black = SpectralCube::zeros(2, 2, g).unwrap();
        assert!(cam.render_rgb_cube(&black).unwrap().image.values().iter().all(|&v| v == 0.0));
        let hot = SpectralCube::from_fn(1, 1, g, |_, _, px| px.fill(2.0)).unwrap();
        let out = cam.render_rgb_cube(&hot).unwrap();
        assert_eq!(out.clipped, 3);
        assert!(out.image.values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn xyz_normalisation_and_linearity() {
        let g = WavelengthGrid::default();
        let t = ColorimetryTables::load(&g);
        let white = xyz_from_spectrum(&Spectrum::constant(g, 1.0), &t).unwrap();
        assert!((white[1] - 100.0).abs() < 1e-12);
        assert_eq!(xyz_from_spectrum(&Spectrum::constant(g, 0.0), &t).unwrap(), [0.0; 3]);
        let half = xyz_from_spectrum(&Spectrum::constant(g, 0.5), &t).unwrap();
        for c in 0..3 {
            assert!((half[c] - 0.5 * white[c]).abs() < 1e-12);
        }
    }

    #[test]
    fn lab_reference_points() {
        let white = [95.0, 100.0, 108.0];
        let l = lab_from_xyz(white, white);
        assert!((l[0] - 100.0).abs() < 1e-12 && l[1].abs() < 1e-12 && l[2].abs() < 1e-12);
        let l = lab_from_xyz([0.0; 3], white);
        assert!(l.iter().all(|v| v.abs() < 1e-12));
        let eighth = white.map(|v| v / 8.0);
        let l = lab_from_xyz(eighth, white);
        // 116 * 0.5 - 16
        assert!((l[0] - 42.0).abs() < 1e-12);
        assert!(l[1].abs() < 1e-12 && l[2].abs() < 1e-12);
    }
}
