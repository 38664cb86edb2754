use std::io;

use thiserror::Error;

/// Errors produced by the spectral estimation engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("tabulated function is empty")]
    EmptyTable,
    #[error("wavelength grid mismatch: {0}")]
    GridMismatch(String),
    #[error("invalid wavelength grid: {0}")]
    InvalidGrid(String),
    #[error("basis count {requested} out of range 1..={max}")]
    BadBasisCount { requested: usize, max: usize },
    #[error("singular system in {0}; supply a nonzero noise autocorrelation or more varied training data")]
    SingularSystem(&'static str),
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("model has not been fitted")]
    ModelNotFitted,
    #[error("spectrum has zero norm")]
    DegenerateSpectrum,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("sample selection is empty")]
    EmptySample,
    #[error("pixel value {value} exceeds {max} for the declared bit depth")]
    BadPixelValue { value: u32, max: u32 },
    #[error("not a spectral cube file")]
    NotACube,
    #[error("corrupt file: {0}")]
    CorruptFile(String),
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
    #[error("{method} requires prior knowledge of {missing}")]
    MissingPriorKnowledge { method: &'static str, missing: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("frame {index}: {source}")]
    Frame {
        index: usize,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
