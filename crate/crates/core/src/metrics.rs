//! Spectral and colorimetric accuracy measures and highlight-error analysis.
//!
//! Image-level figures are unweighted per-pixel means. All reductions use
//! pairwise summation over a fixed pixel order, so parallel and sequential
//! evaluation agree bit for bit.

use rayon::prelude::*;

use crate::camera::Colorimeter;
use crate::error::{Error, Result};
use crate::spectral::{ColorimetryTables, SpectralCube, Spectrum};

const PAIRWISE_BLOCK: usize = 32;

/// Pairwise (cascade) summation.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= PAIRWISE_BLOCK {
        return values.iter().sum();
    }
    let (a, b) = values.split_at(values.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Arithmetic mean; NaN for an empty slice.
pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    pairwise_sum(values) / values.len() as f64
}

/// `sqrt(mean((a - b)^2))` over equal-length slices.
#[inline]
pub fn rmse_values(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let sq: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (sq / a.len() as f64).sqrt()
}

/// Normalised inner product `|<a, b>| / (|a| |b|)`; `None` when either norm is zero.
#[inline]
pub fn gfc_values(a: &[f64], b: &[f64]) -> Option<f64> {
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return None;
    }
    Some((dot.abs() / (na.sqrt() * nb.sqrt())).min(1.0))
}

pub fn rmse(r: &Spectrum, r_hat: &Spectrum) -> Result<f64> {
    r.grid().ensure_same(r_hat.grid())?;
    Ok(rmse_values(r.values(), r_hat.values()))
}

pub fn gfc(r: &Spectrum, r_hat: &Spectrum) -> Result<f64> {
    r.grid().ensure_same(r_hat.grid())?;
    gfc_values(r.values(), r_hat.values()).ok_or(Error::DegenerateSpectrum)
}

pub fn delta_e_ab(r: &Spectrum, r_hat: &Spectrum, tables: &ColorimetryTables) -> Result<f64> {
    r.grid().ensure_same(r_hat.grid())?;
    tables.grid().ensure_same(r.grid())?;
    let c = Colorimeter::new(tables);
    Ok(delta_e_with(&c, r.values(), r_hat.values()))
}

#[inline]
fn delta_e_with(c: &Colorimeter, a: &[f64], b: &[f64]) -> f64 {
    let la = c.lab(a);
    let lb = c.lab(b);
    ((la[0] - lb[0]).powi(2) + (la[1] - lb[1]).powi(2) + (la[2] - lb[2]).powi(2)).sqrt()
}

/// Means over one side of a pixel partition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionMeans {
    pub pixels: usize,
    pub rmse: f64,
    pub gfc: f64,
    pub delta_e: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub height: usize,
    pub width: usize,
    pub mean_rmse: f64,
    pub mean_gfc: f64,
    pub mean_delta_e: f64,
    /// Row-major per-pixel maps.
    pub per_pixel_rmse: Vec<f64>,
    pub per_pixel_gfc: Vec<f64>,
    pub per_pixel_delta_e: Vec<f64>,
    /// Fraction of pixels flagged by [`highlight_mask`].
    pub highlight_fraction: f64,
}

impl MetricReport {
    pub fn pixel_count(&self) -> usize {
        self.per_pixel_rmse.len()
    }

    /// Means over `(mask == true, mask == false)`; an empty side has NaN means.
    pub fn partition(&self, mask: &[bool]) -> Result<(PartitionMeans, PartitionMeans)> {
        if mask.len() != self.pixel_count() {
            return Err(Error::ShapeMismatch(format!(
                "mask of {} pixels for a {}-pixel report",
                mask.len(),
                self.pixel_count()
            )));
        }
        let side = |want: bool| {
            let pick = |map: &[f64]| -> Vec<f64> {
                map.iter().zip(mask).filter(|(_, &m)| m == want).map(|(&v, _)| v).collect()
            };
            let rmse = pick(&self.per_pixel_rmse);
            PartitionMeans {
                pixels: rmse.len(),
                rmse: mean(&rmse),
                gfc: mean(&pick(&self.per_pixel_gfc)),
                delta_e: mean(&pick(&self.per_pixel_delta_e)),
            }
        };
        Ok((side(true), side(false)))
    }

    /// `(key, value)` lines for a report file.
    pub fn entries(&self) -> Vec<(String, String)> {
        vec![
            ("height".into(), self.height.to_string()),
            ("width".into(), self.width.to_string()),
            ("mean_rmse".into(), format!("{:.12e}", self.mean_rmse)),
            ("mean_gfc".into(), format!("{:.12e}", self.mean_gfc)),
            ("mean_delta_e".into(), format!("{:.12e}", self.mean_delta_e)),
            ("highlight_fraction".into(), format!("{:.12e}", self.highlight_fraction)),
        ]
    }
}

/// Per-pixel metrics of `estimate` against `truth`, averaged uniformly.
///
/// Pixel GFC with both spectra zero counts as a perfect match (1) and with
/// exactly one zero as no match (0), so black pixels never abort a run.
pub fn evaluate_cube(truth: &SpectralCube, estimate: &SpectralCube, tables: &ColorimetryTables) -> Result<MetricReport> {
    truth.ensure_same_shape(estimate)?;
    tables.grid().ensure_same(truth.grid())?;
    let c = Colorimeter::new(tables);
    let n = truth.bands();
    let per_pixel: Vec<[f64; 3]> = truth
        .samples()
        .par_chunks(n)
        .zip(estimate.samples().par_chunks(n))
        .map(|(a, b)| {
            let g = match gfc_values(a, b) {
                Some(g) => g,
                None if a.iter().all(|&v| v == 0.0) && b.iter().all(|&v| v == 0.0) => 1.0,
                None => 0.0,
            };
            [rmse_values(a, b), g, delta_e_with(&c, a, b)]
        })
        .collect();
    let column = |i: usize| per_pixel.iter().map(|m| m[i]).collect::<Vec<f64>>();
    let per_pixel_rmse = column(0);
    let per_pixel_gfc = column(1);
    let per_pixel_delta_e = column(2);
    let flagged = highlight_mask(&per_pixel_rmse).iter().filter(|&&m| m).count();
    Ok(MetricReport {
        height: truth.height(),
        width: truth.width(),
        mean_rmse: mean(&per_pixel_rmse),
        mean_gfc: mean(&per_pixel_gfc),
        mean_delta_e: mean(&per_pixel_delta_e),
        highlight_fraction: flagged as f64 / per_pixel_rmse.len() as f64,
        per_pixel_rmse,
        per_pixel_gfc,
        per_pixel_delta_e,
    })
}

/// Pixels whose RMSE exceeds twice the map mean.
pub fn highlight_mask(per_pixel_rmse: &[f64]) -> Vec<bool> {
    let threshold = 2.0 * mean(per_pixel_rmse);
    per_pixel_rmse.iter().map(|&v| v > threshold).collect()
}

/// Mean of `values` over `(mask == true, mask == false)`; NaN for an empty side.
pub fn masked_means(values: &[f64], mask: &[bool]) -> Result<(f64, f64)> {
    if values.len() != mask.len() {
        return Err(Error::ShapeMismatch(format!("{} values vs {} mask entries", values.len(), mask.len())));
    }
    let side = |want: bool| {
        let v: Vec<f64> = values.iter().zip(mask).filter(|(_, &m)| m == want).map(|(&v, _)| v).collect();
        mean(&v)
    };
    Ok((side(true), side(false)))
}

/// RMSE means over `(masked, unmasked)` pixels of a report.
pub fn split_metrics(report: &MetricReport, mask: &[bool]) -> Result<(f64, f64)> {
    masked_means(&report.per_pixel_rmse, mask)
}
