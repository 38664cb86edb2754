//! Synthetic spectral scenes and drifting videos.
//!
//! A scene is a soft blend of a few material reflectances over smooth random
//! fields, with per-band jitter and a set of spiky highlight pixels. Every
//! random draw comes from [`CounterRng`] keyed by the recipe seed and a fixed
//! stream per purpose, so scenes reproduce exactly:
//!
//! | stream | use                                   | counter            |
//! |--------|---------------------------------------|--------------------|
//! | 1      | material curves                       | `material * 64 + j` |
//! | 2      | blend fields                          | `material * 64 + j` |
//! | 3      | per-band jitter (normal)              | `pixel * N + band`  |
//! | 4      | highlight positions                   | Fisher-Yates step   |
//! | 5      | highlight peaks                       | `rank * 8 + j`      |

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::rng::CounterRng;
use crate::spectral::{SpectralCube, WavelengthGrid};

const STREAM_MATERIALS: u64 = 1;
const STREAM_FIELDS: u64 = 2;
const STREAM_JITTER: u64 = 3;
const STREAM_HIGHLIGHT_POS: u64 = 4;
const STREAM_HIGHLIGHT_PEAKS: u64 = 5;

const GAUSSIANS_PER_MATERIAL: usize = 3;
const WAVES_PER_FIELD: usize = 3;
/// Softmax sharpness of the material blend.
const BLEND_SHARPNESS: f64 = 4.0;
const HIGHLIGHT_PEAKS: usize = 3;
const HIGHLIGHT_PEAK_SIGMA_NM: f64 = 8.0;
const HIGHLIGHT_PEAK_AMPLITUDE: (f64, f64) = (0.1, 0.25);

#[derive(Debug, Clone, PartialEq)]
pub struct SceneRecipe {
    pub height: usize,
    pub width: usize,
    pub grid: WavelengthGrid,
    pub n_materials: usize,
    /// Typical width of the Gaussian bumps in material curves.
    pub smoothness_sigma_nm: f64,
    pub highlight_fraction: f64,
    pub highlight_gain: f64,
    /// Height of the linear ramp added towards the red end.
    pub red_bias: f64,
    /// Standard deviation of the per-band noise that roughens spectra.
    pub jitter: f64,
    pub seed: u64,
}

impl Default for SceneRecipe {
    fn default() -> Self {
        Self {
            height: 64,
            width: 64,
            grid: WavelengthGrid::default(),
            n_materials: 6,
            smoothness_sigma_nm: 40.0,
            highlight_fraction: 0.03,
            highlight_gain: 3.0,
            red_bias: 0.3,
            jitter: 0.01,
            seed: 0,
        }
    }
}

impl SceneRecipe {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        if self.height == 0 || self.width == 0 {
            return bad(format!("scene size {}x{}", self.height, self.width));
        }
        if self.n_materials == 0 {
            return bad("n_materials must be at least 1".into());
        }
        let scalars = [
            self.smoothness_sigma_nm,
            self.highlight_fraction,
            self.highlight_gain,
            self.red_bias,
            self.jitter,
        ];
        if scalars.iter().any(|v| !v.is_finite()) {
            return bad("recipe scalars must be finite".into());
        }
        if !(0.0..1.0).contains(&self.highlight_fraction) {
            return bad(format!("highlight_fraction {} not in [0, 1)", self.highlight_fraction));
        }
        if self.highlight_gain <= 1.0 {
            return bad(format!("highlight_gain {} must exceed 1", self.highlight_gain));
        }
        if self.smoothness_sigma_nm <= 0.0 || self.red_bias < 0.0 || self.jitter < 0.0 {
            return bad("smoothness must be positive; red_bias and jitter non-negative".into());
        }
        Ok(())
    }

    pub fn highlight_count(&self) -> usize {
        (self.highlight_fraction * (self.height * self.width) as f64).round() as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub cube: SpectralCube,
    /// Row-major ground truth of injected highlight pixels.
    pub highlight_mask: Vec<bool>,
}

/// Material reflectance curves in `[0, 1]`, `n_materials x N`.
pub fn material_curves(recipe: &SceneRecipe) -> Vec<Vec<f64>> {
    let g = &recipe.grid;
    let (lo, hi) = (g.start_nm(), g.end_nm());
    let rng = CounterRng::new(recipe.seed, STREAM_MATERIALS);
    (0..recipe.n_materials)
        .map(|m| {
            let c = |j: usize| (m * 64 + j) as u64;
            let base = rng.range_at(c(0), 0.02, 0.2);
            let bumps: Vec<(f64, f64, f64)> = (0..GAUSSIANS_PER_MATERIAL)
                .map(|k| {
                    let center = rng.range_at(c(1 + 3 * k), lo, hi);
                    let width = recipe.smoothness_sigma_nm * rng.range_at(c(2 + 3 * k), 0.5, 1.5);
                    let amp = rng.range_at(c(3 + 3 * k), 0.1, 0.6);
                    (center, width, amp)
                })
                .collect();
            let mut curve: Vec<f64> = (0..g.count())
                .map(|i| {
                    let wl = g.wavelength(i);
                    let ramp = recipe.red_bias * (wl - lo) / (hi - lo);
                    base + ramp
                        + bumps
                            .iter()
                            .map(|&(c, w, a)| a * (-0.5 * ((wl - c) / w).powi(2)).exp())
                            .sum::<f64>()
                })
                .collect();
            let peak = curve.iter().cloned().fold(0.0, f64::max);
            if peak > 1.0 {
                curve.iter_mut().for_each(|v| *v /= peak);
            }
            curve
        })
        .collect()
}

/// Smooth random field for one material at pixel `(y, x)`.
fn field(rng: &CounterRng, m: usize, y: usize, x: usize, h: usize, w: usize) -> f64 {
    let c = |j: usize| (m * 64 + j) as u64;
    let (fy, fx) = (y as f64 / h as f64, x as f64 / w as f64);
    (0..WAVES_PER_FIELD)
        .map(|k| {
            let kx = rng.range_at(c(4 * k), -2.5, 2.5);
            let ky = rng.range_at(c(4 * k + 1), -2.5, 2.5);
            let phase = rng.range_at(c(4 * k + 2), 0.0, TAU);
            let amp = rng.range_at(c(4 * k + 3), 0.5, 1.0);
            amp * (TAU * (kx * fx + ky * fy) + phase).sin()
        })
        .sum()
}

pub fn generate_scene(recipe: &SceneRecipe) -> Result<Scene> {
    recipe.validate()?;
    let (h, w) = (recipe.height, recipe.width);
    let n = recipe.grid.count();
    let materials = material_curves(recipe);
    let fields = CounterRng::new(recipe.seed, STREAM_FIELDS);
    let jitter = CounterRng::new(recipe.seed, STREAM_JITTER);
    let mut weights = vec![0.0; recipe.n_materials];

    let mut cube = SpectralCube::from_fn(h, w, recipe.grid, |y, x, px| {
        for (m, wt) in weights.iter_mut().enumerate() {
            *wt = field(&fields, m, y, x, h, w);
        }
        let top = weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        weights.iter_mut().for_each(|v| *v = (BLEND_SHARPNESS * (*v - top)).exp());
        let total: f64 = weights.iter().sum();
        let pixel = (y * w + x) as u64;
        for (b, out) in px.iter_mut().enumerate() {
            let mut v: f64 = weights.iter().zip(&materials).map(|(wt, mat)| wt * mat[b]).sum::<f64>() / total;
            if recipe.jitter > 0.0 {
                v += recipe.jitter * jitter.normal_at(pixel * n as u64 + b as u64);
            }
            *out = v.clamp(0.0, 1.0);
        }
    })?;

    let mut highlight_mask = vec![false; h * w];
    let positions =
        CounterRng::new(recipe.seed, STREAM_HIGHLIGHT_POS).sample_without_replacement(h * w, recipe.highlight_count());
    let peaks = CounterRng::new(recipe.seed, STREAM_HIGHLIGHT_PEAKS);
    let g = recipe.grid;
    for (rank, &p) in positions.iter().enumerate() {
        highlight_mask[p] = true;
        let c = |j: usize| (rank * 8 + j) as u64;
        let spikes: Vec<(f64, f64)> = (0..HIGHLIGHT_PEAKS)
            .map(|k| {
                let center = peaks.range_at(c(2 * k), g.start_nm(), g.end_nm());
                let amp = peaks.range_at(c(2 * k + 1), HIGHLIGHT_PEAK_AMPLITUDE.0, HIGHLIGHT_PEAK_AMPLITUDE.1);
                (center, amp)
            })
            .collect();
        let px = &mut cube.samples_mut()[p * n..(p + 1) * n];
        for (b, v) in px.iter_mut().enumerate() {
            let wl = g.wavelength(b);
            let spike: f64 = spikes
                .iter()
                .map(|&(c, a)| a * (-0.5 * ((wl - c) / HIGHLIGHT_PEAK_SIGMA_NM).powi(2)).exp())
                .sum();
            *v = (*v + recipe.highlight_gain * spike).min(1.0);
        }
    }
    Ok(Scene { cube, highlight_mask })
}

/// Horizontal shift of frame `t`.
pub fn frame_shift(t: usize, drift_px_per_frame: f64) -> i64 {
    (t as f64 * drift_px_per_frame).round() as i64
}

/// Translate right by `shift` pixels with wrap-around.
pub fn shift_cube(cube: &SpectralCube, shift: i64) -> SpectralCube {
    let (h, w, n) = (cube.height(), cube.width(), cube.bands());
    let s = shift.rem_euclid(w as i64) as usize;
    let mut out = cube.clone();
    let src = cube.samples();
    let dst = out.samples_mut();
    for y in 0..h {
        for x in 0..w {
            let from = (y * w + (x + w - s) % w) * n;
            let to = (y * w + x) * n;
            dst[to..to + n].copy_from_slice(&src[from..from + n]);
        }
    }
    out
}

pub fn shift_mask(mask: &[bool], height: usize, width: usize, shift: i64) -> Vec<bool> {
    let s = shift.rem_euclid(width as i64) as usize;
    (0..height * width)
        .map(|i| {
            let (y, x) = (i / width, i % width);
            mask[y * width + (x + width - s) % width]
        })
        .collect()
}

/// Lazily produced drifting frames of one base scene.
#[derive(Debug, Clone)]
pub struct VideoGenerator {
    pub base: Scene,
    pub n_frames: usize,
    pub drift_px_per_frame: f64,
}

impl VideoGenerator {
    pub fn new(recipe: &SceneRecipe, n_frames: usize, drift_px_per_frame: f64) -> Result<Self> {
        if n_frames == 0 {
            return Err(Error::InvalidInput("a video needs at least one frame".into()));
        }
        if !drift_px_per_frame.is_finite() {
            return Err(Error::InvalidInput("drift must be finite".into()));
        }
        Ok(Self {
            base: generate_scene(recipe)?,
            n_frames,
            drift_px_per_frame,
        })
    }

    pub fn frame(&self, t: usize) -> SpectralCube {
        shift_cube(&self.base.cube, frame_shift(t, self.drift_px_per_frame))
    }

    pub fn mask(&self, t: usize) -> Vec<bool> {
        let c = &self.base.cube;
        shift_mask(&self.base.highlight_mask, c.height(), c.width(), frame_shift(t, self.drift_px_per_frame))
    }

    pub fn frames(&self) -> impl Iterator<Item = SpectralCube> + '_ {
        (0..self.n_frames).map(|t| self.frame(t))
    }
}

pub fn generate_video(recipe: &SceneRecipe, n_frames: usize, drift_px_per_frame: f64) -> Result<Vec<SpectralCube>> {
    Ok(VideoGenerator::new(recipe, n_frames, drift_px_per_frame)?.frames().collect())
}
