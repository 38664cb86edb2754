//! Wavelength grids, spectra, spectral cubes, RGB images and the embedded
//! colorimetric reference tables.

use crate::cie_data::{CIE1931_2DEG_5NM, D65_5NM};
use crate::error::{Error, Result};

/// A uniform wavelength sampling `start_nm + i * step_nm` for `i < count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavelengthGrid {
    start_nm: f64,
    step_nm: f64,
    count: usize,
}

impl WavelengthGrid {
    pub fn new(start_nm: f64, step_nm: f64, count: usize) -> Result<Self> {
        if !(start_nm.is_finite() && start_nm > 0.0) {
            return Err(Error::InvalidGrid(format!("start {start_nm} must be positive")));
        }
        if !(step_nm.is_finite() && step_nm > 0.0) {
            return Err(Error::InvalidGrid(format!("step {step_nm} must be positive")));
        }
        if count < 2 {
            return Err(Error::InvalidGrid(format!("count {count} must be at least 2")));
        }
        Ok(Self {
            start_nm,
            step_nm,
            count,
        })
    }

    pub fn start_nm(&self) -> f64 {
        self.start_nm
    }

    pub fn step_nm(&self) -> f64 {
        self.step_nm
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn end_nm(&self) -> f64 {
        self.wavelength(self.count - 1)
    }

    #[inline]
    pub fn wavelength(&self, i: usize) -> f64 {
        self.start_nm + i as f64 * self.step_nm
    }

    pub fn wavelengths(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.wavelength(i)).collect()
    }

    /// Band index whose wavelength is within half a step of `nm`.
    pub fn band_of(&self, nm: f64) -> Option<usize> {
        let pos = ((nm - self.start_nm) / self.step_nm).round();
        if pos < 0.0 || pos >= self.count as f64 {
            return None;
        }
        let i = pos as usize;
        ((self.wavelength(i) - nm).abs() <= 0.5 * self.step_nm).then_some(i)
    }

    pub(crate) fn ensure_same(&self, other: &WavelengthGrid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self} vs {other}")))
        }
    }
}

impl Default for WavelengthGrid {
    /// 420 nm to 720 nm in 10 nm steps (31 bands).
    fn default() -> Self {
        Self {
            start_nm: 420.0,
            step_nm: 10.0,
            count: 31,
        }
    }
}

impl std::fmt::Display for WavelengthGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}..{} nm step {} ({} bands)",
            self.start_nm,
            self.end_nm(),
            self.step_nm,
            self.count
        )
    }
}

/// Linear interpolation of a tabulated function at each grid wavelength;
/// zero outside the table's coverage. `table` must be sorted by wavelength.
pub fn resample(table: &[(f64, f64)], grid: &WavelengthGrid) -> Result<Vec<f64>> {
    if table.is_empty() {
        return Err(Error::EmptyTable);
    }
    let first = table[0].0;
    let last = table[table.len() - 1].0;
    let out = (0..grid.count())
        .map(|i| {
            let wl = grid.wavelength(i);
            if wl < first || wl > last {
                return 0.0;
            }
            // index of the first knot strictly greater than wl
            let hi = table.partition_point(|&(w, _)| w <= wl);
            if hi == 0 {
                return 0.0;
            }
            let (w0, v0) = table[hi - 1];
            if hi == table.len() || w0 == wl {
                return v0;
            }
            let (w1, v1) = table[hi];
            v0 + (v1 - v0) * (wl - w0) / (w1 - w0)
        })
        .collect();
    Ok(out)
}

/// A sampled reflectance spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: WavelengthGrid,
    values: Vec<f64>,
    clamped: bool,
}

impl Spectrum {
    pub fn new(grid: WavelengthGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.count() {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a {}-band grid",
                values.len(),
                grid.count()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("spectrum contains non-finite values".into()));
        }
        Ok(Self {
            grid,
            values,
            clamped: false,
        })
    }

    pub fn constant(grid: WavelengthGrid, value: f64) -> Self {
        Self {
            grid,
            values: vec![value; grid.count()],
            clamped: false,
        }
    }

    pub fn grid(&self) -> &WavelengthGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_clamped(&self) -> bool {
        self.clamped
    }

    /// Copy with every value clamped to `[0, 1]`.
    pub fn clamp_unit(&self) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v.clamp(0.0, 1.0)).collect(),
            clamped: true,
        }
    }
}

/// An `height x width` image whose pixels are spectra on a shared grid.
/// Storage is pixel-interleaved: `samples[(y * width + x) * bands + b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCube {
    height: usize,
    width: usize,
    grid: WavelengthGrid,
    samples: Vec<f64>,
}

impl SpectralCube {
    pub fn zeros(height: usize, width: usize, grid: WavelengthGrid) -> Result<Self> {
        Self::from_samples(height, width, grid, vec![0.0; height * width * grid.count()])
    }

    pub fn from_samples(
        height: usize,
        width: usize,
        grid: WavelengthGrid,
        samples: Vec<f64>,
    ) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::ShapeMismatch(format!("empty cube {height}x{width}")));
        }
        let expected = height * width * grid.count();
        if samples.len() != expected {
            return Err(Error::ShapeMismatch(format!(
                "{} samples, expected {expected}",
                samples.len()
            )));
        }
        Ok(Self {
            height,
            width,
            grid,
            samples,
        })
    }

    /// Build a cube by evaluating `f(y, x, out)` for every pixel.
    pub fn from_fn(
        height: usize,
        width: usize,
        grid: WavelengthGrid,
        mut f: impl FnMut(usize, usize, &mut [f64]),
    ) -> Result<Self> {
        let mut cube = Self::zeros(height, width, grid)?;
        let n = grid.count();
        for (i, px) in cube.samples.chunks_exact_mut(n).enumerate() {
            f(i / width, i % width, px);
        }
        Ok(cube)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn pixel_count(&self) -> usize {
        self.height * self.width
    }

    pub fn bands(&self) -> usize {
        self.grid.count()
    }

    pub fn grid(&self) -> &WavelengthGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [f64] {
        &mut self.samples
    }

    #[inline]
    pub fn pixel(&self, y: usize, x: usize) -> &[f64] {
        self.pixel_at(y * self.width + x)
    }

    /// Pixel by flat row-major index.
    #[inline]
    pub fn pixel_at(&self, index: usize) -> &[f64] {
        let n = self.bands();
        &self.samples[index * n..(index + 1) * n]
    }

    #[inline]
    pub fn pixel_mut(&mut self, y: usize, x: usize) -> &mut [f64] {
        let n = self.bands();
        let i = y * self.width + x;
        &mut self.samples[i * n..(i + 1) * n]
    }

    pub fn spectrum(&self, y: usize, x: usize) -> Spectrum {
        Spectrum {
            grid: self.grid,
            values: self.pixel(y, x).to_vec(),
            clamped: false,
        }
    }

    pub fn set_spectrum(&mut self, y: usize, x: usize, s: &Spectrum) -> Result<()> {
        self.grid.ensure_same(s.grid())?;
        self.pixel_mut(y, x).copy_from_slice(s.values());
        Ok(())
    }

    pub fn pixels(&self) -> std::slice::ChunksExact<'_, f64> {
        self.samples.chunks_exact(self.bands())
    }

    /// One band as a row-major `height x width` plane.
    pub fn band(&self, b: usize) -> Vec<f64> {
        self.pixels().map(|px| px[b]).collect()
    }

    pub(crate) fn ensure_same_shape(&self, other: &SpectralCube) -> Result<()> {
        self.grid.ensure_same(other.grid())?;
        if self.height != other.height || self.width != other.width {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} vs {}x{}",
                self.height, self.width, other.height, other.width
            )));
        }
        Ok(())
    }
}

/// A linear RGB image with values nominally in `[0, 1]`.
/// Storage is interleaved: `values[(y * width + x) * 3 + c]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RgbImage {
    height: usize,
    width: usize,
    values: Vec<f64>,
}

impl RgbImage {
    pub fn new(height: usize, width: usize, values: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::ShapeMismatch(format!("empty image {height}x{width}")));
        }
        if values.len() != height * width * 3 {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a {height}x{width} RGB image",
                values.len()
            )));
        }
        Ok(Self {
            height,
            width,
            values,
        })
    }

    pub fn filled(height: usize, width: usize, rgb: [f64; 3]) -> Result<Self> {
        let values = rgb.iter().copied().cycle().take(height * width * 3).collect();
        Self::new(height, width, values)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn pixel(&self, y: usize, x: usize) -> [f64; 3] {
        let i = (y * self.width + x) * 3;
        [self.values[i], self.values[i + 1], self.values[i + 2]]
    }

    pub fn pixels(&self) -> std::slice::ChunksExact<'_, f64> {
        self.values.chunks_exact(3)
    }

    pub(crate) fn ensure_same_shape(&self, other: &RgbImage) -> Result<()> {
        if self.height != other.height || self.width != other.width {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} vs {}x{}",
                self.height, self.width, other.height, other.width
            )));
        }
        Ok(())
    }
}

/// CIE 1931 2 degree colour matching functions and D65 on a particular grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ColorimetryTables {
    grid: WavelengthGrid,
    pub cmf_x: Vec<f64>,
    pub cmf_y: Vec<f64>,
    pub cmf_z: Vec<f64>,
    pub d65: Vec<f64>,
}

impl ColorimetryTables {
    pub fn load(grid: &WavelengthGrid) -> Self {
        let column = |pick: fn(&(f64, f64, f64, f64)) -> f64| {
            let table: Vec<(f64, f64)> = CIE1931_2DEG_5NM.iter().map(|row| (row.0, pick(row))).collect();
            resample(&table, grid).expect("embedded table is non-empty")
        };
        Self {
            grid: *grid,
            cmf_x: column(|r| r.1),
            cmf_y: column(|r| r.2),
            cmf_z: column(|r| r.3),
            d65: resample(&D65_5NM, grid).expect("embedded table is non-empty"),
        }
    }

    pub fn grid(&self) -> &WavelengthGrid {
        &self.grid
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_endpoints() {
        let g = WavelengthGrid::default();
        let wl = g.wavelengths();
        assert_eq!(wl.len(), 31);
        assert_eq!(wl[0], 420.0);
        assert_eq!(wl[30], 720.0);
        assert_eq!(
            WavelengthGrid::new(400.0, 50.0, 3).unwrap().wavelengths(),
            vec![400.0, 450.0, 500.0]
        );
    }

    #[test]
    fn grid_validation() {
        assert!(WavelengthGrid::new(0.0, 10.0, 31).is_err());
        assert!(WavelengthGrid::new(400.0, -1.0, 31).is_err());
        assert!(WavelengthGrid::new(400.0, 10.0, 1).is_err());
    }

    #[test]
    fn resample_constant_and_ramp() {
        let g = WavelengthGrid::default();
        let ones = resample(&[(420.0, 1.0), (720.0, 1.0)], &g).unwrap();
        assert!(ones.iter().all(|&v| v == 1.0));
        let ramp = resample(&[(420.0, 0.0), (720.0, 3.0)], &g).unwrap();
        assert!((ramp[g.band_of(570.0).unwrap()] - 1.5).abs() < 1e-12);
    }

    #[test]
    fn resample_outside_coverage_is_zero() {
        let g = WavelengthGrid::default();
        let part = resample(&[(500.0, 2.0), (600.0, 2.0)], &g).unwrap();
        assert_eq!(part[0], 0.0);
        assert_eq!(part[8], 2.0);
        assert_eq!(part[30], 0.0);
        assert!(matches!(resample(&[], &g), Err(Error::EmptyTable)));
    }

    #[test]
    fn ybar_at_550_matches_table_knot() {
        let g = WavelengthGrid::default();
        let t = ColorimetryTables::load(&g);
        // CIE 1931 2 degree, y-bar(550 nm) = 0.994950
        assert!((t.cmf_y[g.band_of(550.0).unwrap()] - 0.994950).abs() < 1e-3);
        assert!((t.d65[g.band_of(560.0).unwrap()] - 100.0).abs() < 1e-12);
    }

    #[test]
    fn tables_are_deterministic_and_non_negative() {
        let g = WavelengthGrid::default();
        let a = ColorimetryTables::load(&g);
        let b = ColorimetryTables::load(&g);
        assert_eq!(a, b);
        for v in [&a.cmf_x, &a.cmf_y, &a.cmf_z, &a.d65] {
            assert_eq!(v.len(), 31);
            assert!(v.iter().all(|&x| x >= 0.0), "{v:?}");
        }
    }

    #[test]
    fn pixel_roundtrip_is_identity() {
        let g = WavelengthGrid::new(400.0, 100.0, 3).unwrap();
        let mut cube = SpectralCube::from_fn(2, 3, g, |y, x, px| {
            for (b, v) in px.iter_mut().enumerate() {
                *v = (y * 100 + x * 10 + b) as f64;
            }
        })
        .unwrap();
        let before = cube.clone();
        let s = cube.spectrum(1, 2);
        cube.set_spectrum(1, 2, &s).unwrap();
        assert_eq!(cube, before);
        assert_eq!(s.values(), &[120.0, 121.0, 122.0]);
    }

    #[test]
    fn clamp_sets_flag() {
        let g = WavelengthGrid::new(400.0, 100.0, 3).unwrap();
        let s = Spectrum::new(g, vec![-0.5, 0.5, 1.5]).unwrap();
        assert!(!s.is_clamped());
        let c = s.clamp_unit();
        assert!(c.is_clamped());
        assert_eq!(c.values(), &[0.0, 0.5, 1.0]);
    }
}
