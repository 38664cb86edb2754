use std::collections::HashSet;

use nalgebra::DMatrix;

use super::poly::PolyCombo;
use crate::error::{Error, Result};
use crate::spectral::WavelengthGrid;

/// Where one training sample came from: a pixel of a named source image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SampleOrigin {
    /// Index into `Provenance::sources`.
    pub source: u32,
    /// Row-major pixel index within that source.
    pub pixel: u32,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Provenance {
    pub sources: Vec<String>,
    /// Sampling fraction; 0 when unknown or mixed across a union.
    pub fraction: f64,
    pub seed: u64,
    /// Per-sample origin; empty when unknown.
    pub origins: Vec<SampleOrigin>,
}

/// Paired reflectances (`N x k`) and device responses (`M x k`), one sample per column.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    grid: WavelengthGrid,
    reflectances: DMatrix<f64>,
    responses: DMatrix<f64>,
    pub provenance: Provenance,
}

impl TrainingSet {
    pub fn new(
        grid: WavelengthGrid,
        reflectances: DMatrix<f64>,
        responses: DMatrix<f64>,
        provenance: Provenance,
    ) -> Result<Self> {
        if reflectances.nrows() != grid.count() {
            return Err(Error::GridMismatch(format!(
                "{} reflectance rows for a {}-band grid",
                reflectances.nrows(),
                grid.count()
            )));
        }
        if reflectances.ncols() == 0 {
            return Err(Error::EmptyTrainingSet);
        }
        if responses.ncols() != reflectances.ncols() {
            return Err(Error::ShapeMismatch(format!(
                "{} responses for {} reflectances",
                responses.ncols(),
                reflectances.ncols()
            )));
        }
        if !provenance.origins.is_empty() && provenance.origins.len() != reflectances.ncols() {
            return Err(Error::ShapeMismatch("provenance origins vs sample count".into()));
        }
        Ok(Self {
            grid,
            reflectances,
            responses,
            provenance,
        })
    }

    pub fn grid(&self) -> &WavelengthGrid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.reflectances.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn channels(&self) -> usize {
        self.responses.nrows()
    }

    pub fn reflectances(&self) -> &DMatrix<f64> {
        &self.reflectances
    }

    pub fn responses(&self) -> &DMatrix<f64> {
        &self.responses
    }

    /// `T x k` matrix of polynomial-expanded responses.
    pub fn expanded_responses(&self, combo: &PolyCombo) -> Result<DMatrix<f64>> {
        expand_responses(&self.responses, combo)
    }

    /// Concatenate sets, dropping samples whose `(source name, pixel)` was
    /// already taken. Samples without origins are always kept.
    pub fn union(sets: &[&TrainingSet]) -> Result<TrainingSet> {
        let first = sets.first().ok_or(Error::EmptyTrainingSet)?;
        let n = first.grid.count();
        let m = first.channels();
        let mut sources: Vec<String> = Vec::new();
        let mut seen: HashSet<(String, u32)> = HashSet::new();
        let mut refl: Vec<f64> = Vec::new();
        let mut resp: Vec<f64> = Vec::new();
        let mut origins = Vec::new();
        let mut all_tracked = true;
        for set in sets {
            set.grid.ensure_same(&first.grid)?;
            if set.channels() != m {
                return Err(Error::ShapeMismatch("channel count differs between sets".into()));
            }
            let tracked = !set.provenance.origins.is_empty();
            all_tracked &= tracked;
            for j in 0..set.len() {
                if tracked {
                    let o = set.provenance.origins[j];
                    let name = &set.provenance.sources[o.source as usize];
                    if !seen.insert((name.clone(), o.pixel)) {
                        continue;
                    }
                    let src = match sources.iter().position(|s| s == name) {
                        Some(i) => i,
                        None => {
                            sources.push(name.clone());
                            sources.len() - 1
                        }
                    };
                    origins.push(SampleOrigin {
                        source: src as u32,
                        pixel: o.pixel,
                    });
                }
                refl.extend(set.reflectances.column(j).iter());
                resp.extend(set.responses.column(j).iter());
            }
            if !tracked {
                for s in &set.provenance.sources {
                    if !sources.contains(s) {
                        sources.push(s.clone());
                    }
                }
            }
        }
        let k = refl.len() / n;
        let fractions: Vec<f64> = sets.iter().map(|s| s.provenance.fraction).collect();
        let fraction = if fractions.iter().all(|&f| f == fractions[0]) { fractions[0] } else { 0.0 };
        TrainingSet::new(
            first.grid,
            DMatrix::from_column_slice(n, k, &refl),
            DMatrix::from_column_slice(m, k, &resp),
            Provenance {
                sources,
                fraction,
                seed: first.provenance.seed,
                origins: if all_tracked { origins } else { Vec::new() },
            },
        )
    }
}

pub fn expand_responses(responses: &DMatrix<f64>, combo: &PolyCombo) -> Result<DMatrix<f64>> {
    if responses.nrows() != 3 {
        return Err(Error::ShapeMismatch(format!(
            "polynomial expansion needs 3 channels, got {}",
            responses.nrows()
        )));
    }
    let k = responses.ncols();
    let t = combo.len();
    let mut out = DMatrix::zeros(t, k);
    for j in 0..k {
        let rgb = [responses[(0, j)], responses[(1, j)], responses[(2, j)]];
        for (i, term) in combo.terms().iter().enumerate() {
            out[(i, j)] = term.eval(&rgb);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(source: &str, pixels: &[u32], value: f64) -> TrainingSet {
        let g = WavelengthGrid::new(400.0, 100.0, 3).unwrap();
        let k = pixels.len();
        TrainingSet::new(
            g,
            DMatrix::from_element(3, k, value),
            DMatrix::from_element(3, k, value),
            Provenance {
                sources: vec![source.into()],
                fraction: 0.05,
                seed: 1,
                origins: pixels.iter().map(|&p| SampleOrigin { source: 0, pixel: p }).collect(),
            },
        )
        .unwrap()
    }

    #[test]
    fn union_deduplicates_by_origin() {
        let a = set("img0", &[1, 2, 3], 0.1);
        let b = set("img0", &[3, 4], 0.2);
        let c = set("img1", &[3], 0.3);
        let u = TrainingSet::union(&[&a, &b, &c]).unwrap();
        assert_eq!(u.len(), 5);
        assert_eq!(u.provenance.sources, vec!["img0".to_string(), "img1".to_string()]);
        assert_eq!(u.provenance.fraction, 0.05);
        assert_eq!(u.reflectances()[(0, 3)], 0.2);
        assert_eq!(u.reflectances()[(0, 4)], 0.3);
    }

    #[test]
    fn rejects_mismatched_columns() {
        let g = WavelengthGrid::new(400.0, 100.0, 3).unwrap();
        let r = TrainingSet::new(g, DMatrix::zeros(3, 2), DMatrix::zeros(3, 3), Provenance::default());
        assert!(matches!(r, Err(Error::ShapeMismatch(_))));
        let r = TrainingSet::new(g, DMatrix::zeros(3, 0), DMatrix::zeros(3, 0), Provenance::default());
        assert!(matches!(r, Err(Error::EmptyTrainingSet)));
    }
}
