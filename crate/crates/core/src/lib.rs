//! Spectral reflectance estimation from RGB camera responses.
//!
//! A [`camera::CameraSpec`] turns reflectance spectra into device responses;
//! the [`estimators`] invert that mapping from training data or from prior
//! knowledge of the camera. [`video`] streams whole RGB videos through a
//! fitted model, [`search`] picks a representative training set, and
//! [`datagen`] builds synthetic scenes with known ground truth.

pub mod camera;
pub mod cie_data;
pub mod datagen;
pub mod error;
pub mod estimators;
pub mod io;
pub mod linalg;
pub mod metrics;
pub mod rng;
pub mod search;
pub mod spectral;
pub mod video;

#[cfg(test)]
mod test_support;

pub use camera::{CameraSpec, Colorimeter, NoiseModel};
pub use error::{Error, Result};
pub use estimators::{EstimationModel, MethodKind, MethodSpec, PolyCombo, TrainingSet};
pub use spectral::{ColorimetryTables, RgbImage, SpectralCube, Spectrum, WavelengthGrid};
