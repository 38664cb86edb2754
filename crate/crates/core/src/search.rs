//! Random training-spectra sampling and representative training-set search.
//!
//! The search runs in three steps:
//!
//! 1. For every image, sample one set per fraction and keep the set that best
//!    estimates its own image.
//! 2. Score every step-1 winner against all images and sort ascending.
//! 3. Score every non-empty union of the best five (at most 31 candidates)
//!    and return the lowest score. Ties go to the smaller set, then the
//!    lexicographically smaller id.
//!
//! Scores are mean per-image mean RMSE. Candidate scoring runs in parallel;
//! every reduction has a fixed order, so results do not depend on the pool size.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::camera::CameraSpec;
use crate::error::{Error, Result};
use crate::estimators::{MethodSpec, Provenance, SampleOrigin, TrainingSet};
use crate::metrics::{mean, rmse_values};
use crate::rng::CounterRng;
use crate::spectral::{RgbImage, SpectralCube};

pub const DEFAULT_FRACTIONS: [f64; 5] = [0.01, 0.05, 0.10, 0.20, 0.50];
/// Step-2 winners combined in step 3.
pub const UNION_POOL: usize = 5;

const STREAM_SAMPLING: u64 = 0x5350_5453;

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    pub id: String,
    pub training: TrainingSet,
    /// Mean RMSE over the evaluation images, once scored.
    pub score: Option<f64>,
}

/// Number of pixels drawn for `fraction` of `pixels`.
pub fn sample_count(pixels: usize, fraction: f64) -> usize {
    // the epsilon keeps e.g. 0.29 * 100 from flooring to 28
    (fraction * pixels as f64 + 1e-9).floor() as usize
}

/// `floor(fraction * H * W)` distinct pixels, uniformly without replacement,
/// with noise-free camera responses. `source` names the image in the provenance.
pub fn sample_training(
    cube: &SpectralCube,
    camera: &CameraSpec,
    fraction: f64,
    seed: u64,
    source: &str,
) -> Result<TrainingSet> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidInput(format!("sampling fraction {fraction} not in (0, 1]")));
    }
    camera.grid().ensure_same(cube.grid())?;
    let pixels = cube.pixel_count();
    let count = sample_count(pixels, fraction);
    if count == 0 {
        return Err(Error::EmptySample);
    }
    let picks = CounterRng::new(seed, STREAM_SAMPLING).sample_without_replacement(pixels, count);
    let n = cube.bands();
    let m = camera.channels();
    let mut refl = Vec::with_capacity(count * n);
    let mut resp = vec![0.0; count * m];
    for (j, &p) in picks.iter().enumerate() {
        let px = cube.pixel_at(p);
        refl.extend_from_slice(px);
        camera.response_into(px, &mut resp[j * m..(j + 1) * m]);
    }
    TrainingSet::new(
        *cube.grid(),
        nalgebra::DMatrix::from_vec(n, count, refl),
        nalgebra::DMatrix::from_vec(m, count, resp),
        Provenance {
            sources: vec![source.to_string()],
            fraction,
            seed,
            origins: picks
                .iter()
                .map(|&p| SampleOrigin {
                    source: 0,
                    pixel: p as u32,
                })
                .collect(),
        },
    )
}

/// Mean per-pixel RMSE of `estimate` against `truth`.
pub fn image_mean_rmse(truth: &SpectralCube, estimate: &SpectralCube) -> f64 {
    let n = truth.bands();
    let per_pixel: Vec<f64> = truth
        .samples()
        .chunks_exact(n)
        .zip(estimate.samples().chunks_exact(n))
        .map(|(a, b)| rmse_values(a, b))
        .collect();
    mean(&per_pixel)
}

/// Evaluation images with their noise-free renders, computed once.
pub struct ScoringContext<'a> {
    camera: &'a CameraSpec,
    method: &'a MethodSpec,
    images: Vec<(&'a SpectralCube, RgbImage)>,
}

impl<'a> ScoringContext<'a> {
    pub fn new(images: &[&'a SpectralCube], camera: &'a CameraSpec, method: &'a MethodSpec) -> Result<Self> {
        if images.is_empty() {
            return Err(Error::InvalidInput("no evaluation images".into()));
        }
        let images = images
            .iter()
            .map(|&c| Ok((c, camera.render_rgb_cube(c)?.image)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { camera, method, images })
    }

    /// Per-image mean RMSEs of a model fitted on `training`.
    pub fn per_image(&self, training: &TrainingSet) -> Result<Vec<f64>> {
        let model = self.method.fit(training, Some(self.camera))?;
        self.images
            .iter()
            .map(|(truth, rgb)| Ok(image_mean_rmse(truth, &model.estimate_cube_par(rgb)?)))
            .collect()
    }

    /// Mean of per-image mean RMSEs.
    pub fn score(&self, training: &TrainingSet) -> Result<f64> {
        Ok(mean(&self.per_image(training)?))
    }

    fn subset(&self, idx: usize) -> ScoringContext<'a> {
        ScoringContext {
            camera: self.camera,
            method: self.method,
            images: vec![self.images[idx].clone()],
        }
    }
}

/// Fit on `training` and return the mean of per-image mean RMSEs over `images`.
pub fn score_set(
    training: &TrainingSet,
    images: &[&SpectralCube],
    camera: &CameraSpec,
    method: &MethodSpec,
) -> Result<f64> {
    ScoringContext::new(images, camera, method)?.score(training)
}

/// Ascending score, then smaller set, then id.
pub fn candidate_order(a: &CandidateSet, b: &CandidateSet) -> Ordering {
    let sa = a.score.unwrap_or(f64::INFINITY);
    let sb = b.score.unwrap_or(f64::INFINITY);
    sa.total_cmp(&sb)
        .then(a.training.len().cmp(&b.training.len()))
        .then_with(|| a.id.cmp(&b.id))
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    /// Per image, every fraction's set scored on that image alone.
    pub step1: Vec<Vec<CandidateSet>>,
    /// Step-1 winners scored on all images, sorted by score then id.
    pub step2: Vec<CandidateSet>,
    /// All unions of the step-2 pool, in subset-bitmask order.
    pub step3: Vec<CandidateSet>,
    pub winner: CandidateSet,
}

/// Seed for sampling image `image` at fraction index `fraction_idx`.
pub fn sampling_seed(seed: u64, image: usize, fraction_idx: usize) -> u64 {
    CounterRng::new(seed, image as u64).u64_at(fraction_idx as u64)
}

pub fn candidate_id(name: &str, fraction: f64) -> String {
    format!("{name}@{fraction}")
}

/// Run all three steps. `names` label the images in ids and provenance.
pub fn search_representative(
    images: &[&SpectralCube],
    names: &[String],
    camera: &CameraSpec,
    fractions: &[f64],
    seed: u64,
    method: &MethodSpec,
) -> Result<SearchOutcome> {
    if images.is_empty() || fractions.is_empty() {
        return Err(Error::InvalidInput("search needs at least one image and one fraction".into()));
    }
    if names.len() != images.len() {
        return Err(Error::ShapeMismatch(format!("{} names for {} images", names.len(), images.len())));
    }
    let ctx = ScoringContext::new(images, camera, method)?;

    // step 1
    let jobs: Vec<(usize, usize)> = (0..images.len())
        .flat_map(|i| (0..fractions.len()).map(move |j| (i, j)))
        .collect();
    let sampled: Vec<CandidateSet> = jobs
        .par_iter()
        .map(|&(i, j)| {
            let ts = sample_training(images[i], camera, fractions[j], sampling_seed(seed, i, j), &names[i])?;
            let score = ctx.subset(i).score(&ts)?;
            Ok(CandidateSet {
                id: candidate_id(&names[i], fractions[j]),
                training: ts,
                score: Some(score),
            })
        })
        .collect::<Result<_>>()?;
    let step1: Vec<Vec<CandidateSet>> = sampled.chunks(fractions.len()).map(|c| c.to_vec()).collect();
    let winners: Vec<(usize, CandidateSet)> = step1
        .iter()
        .enumerate()
        .map(|(i, sets)| (i, sets.iter().min_by(|a, b| candidate_order(a, b)).expect("non-empty").clone()))
        .collect();

    // step 2
    let mut step2: Vec<(usize, CandidateSet)> = winners
        .into_par_iter()
        .map(|(i, mut c)| {
            c.score = Some(ctx.score(&c.training)?);
            Ok((i, c))
        })
        .collect::<Result<_>>()?;
    step2.sort_by(|a, b| {
        let (sa, sb) = (a.1.score.unwrap(), b.1.score.unwrap());
        sa.total_cmp(&sb).then_with(|| a.1.id.cmp(&b.1.id))
    });

    // step 3
    let pool = &step2[..step2.len().min(UNION_POOL)];
    let masks: Vec<u32> = (1..(1u32 << pool.len())).collect();
    let step3: Vec<CandidateSet> = masks
        .par_iter()
        .map(|&mask| {
            let mut members: Vec<&(usize, CandidateSet)> =
                pool.iter().enumerate().filter(|(b, _)| mask & (1 << b) != 0).map(|(_, m)| m).collect();
            members.sort_by_key(|(image, _)| *image);
            let id = members.iter().map(|(_, c)| c.id.as_str()).collect::<Vec<_>>().join("+");
            let sets: Vec<&TrainingSet> = members.iter().map(|(_, c)| &c.training).collect();
            let training = TrainingSet::union(&sets)?;
            let score = ctx.score(&training)?;
            Ok(CandidateSet {
                id,
                training,
                score: Some(score),
            })
        })
        .collect::<Result<_>>()?;
    let winner = step3.iter().min_by(|a, b| candidate_order(a, b)).expect("non-empty").clone();
    Ok(SearchOutcome {
        step1,
        step2: step2.into_iter().map(|(_, c)| c).collect(),
        step3,
        winner,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::{MethodKind, PolyCombo};
    use crate::spectral::WavelengthGrid;
    use crate::test_support::random_matrix;

    fn cube(h: usize, w: usize, seed: u64) -> SpectralCube {
        let g = WavelengthGrid::default();
        SpectralCube::from_samples(h, w, g, random_matrix(h * w * 31, 1, seed).as_slice().to_vec()).unwrap()
    }

    #[test]
    fn sampling_counts_and_determinism() {
        let cam = CameraSpec::gaussian_rgb(&WavelengthGrid::default());
        let c = cube(10, 10, 1);
        let all = sample_training(&c, &cam, 1.0, 3, "a").unwrap();
        let mut pixels: Vec<u32> = all.provenance.origins.iter().map(|o| o.pixel).collect();
        pixels.sort();
        assert_eq!(pixels, (0..100).collect::<Vec<u32>>());

        let big = cube(100, 100, 2);
        assert_eq!(sample_training(&big, &cam, 0.05, 3, "b").unwrap().len(), 500);
        let a = sample_training(&c, &cam, 0.3, 9, "a").unwrap();
        let b = sample_training(&c, &cam, 0.3, 9, "a").unwrap();
        assert_eq!(a, b);
        assert_eq!(sample_count(100, 0.29), 29);
        assert!(matches!(sample_training(&c, &cam, 0.001, 1, "a"), Err(Error::EmptySample)));
        assert!(matches!(sample_training(&c, &cam, 1.5, 1, "a"), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn sampled_responses_are_noise_free() {
        let cam = CameraSpec::gaussian_rgb(&WavelengthGrid::default());
        let c = cube(4, 4, 3);
        let ts = sample_training(&c, &cam, 0.5, 1, "x").unwrap();
        let expect = cam.system_matrix() * ts.reflectances();
        assert!((expect - ts.responses()).abs().max() < 1e-15);
    }

    #[test]
    fn score_is_mean_of_means_and_order_free() {
        let g = WavelengthGrid::default();
        let cam = CameraSpec::gaussian_rgb(&g);
        let method = MethodSpec::new(MethodKind::Pseudoinverse).with_combo(PolyCombo::preset("sq6").unwrap());
        let (a, b) = (cube(6, 6, 4), cube(5, 7, 5));
        let ts = sample_training(&a, &cam, 0.5, 1, "a").unwrap();
        let s_ab = score_set(&ts, &[&a, &b], &cam, &method).unwrap();
        let s_ba = score_set(&ts, &[&b, &a], &cam, &method).unwrap();
        let sa = score_set(&ts, &[&a], &cam, &method).unwrap();
        let sb = score_set(&ts, &[&b], &cam, &method).unwrap();
        assert!((s_ab - s_ba).abs() < 1e-15);
        assert!((s_ab - (sa + sb) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn single_image_single_fraction() {
        let cam = CameraSpec::gaussian_rgb(&WavelengthGrid::default());
        let method = MethodSpec::new(MethodKind::Pseudoinverse);
        let c = cube(8, 8, 6);
        let out = search_representative(&[&c], &["only".into()], &cam, &[0.25], 5, &method).unwrap();
        assert_eq!(out.step3.len(), 1);
        assert_eq!(out.winner.id, "only@0.25");
        assert_eq!(out.winner.training.len(), 16);
    }
}
