use std::io;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid dimension {dim}: the sphere S^(N-1) needs N >= 2")]
    InvalidDimension { dim: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("code length mismatch: {left} vs {right} bits")]
    LengthMismatch { left: usize, right: usize },

    #[error("cannot place {n} orthonormal vectors in dimension {dim}")]
    TooManyPoints { n: usize, dim: usize },

    #[error("row {row}: {message}")]
    Row { row: usize, message: String },

    #[error("invalid {name}: {message}")]
    InvalidParameter { name: &'static str, message: String },

    /// The inputs lie outside the range a closed form was derived for.
    #[error("{name} outside the proven range: {message}")]
    Validity { name: &'static str, message: String },

    #[error("{codes} codes do not align with {points} points")]
    Misaligned { codes: usize, points: usize },

    #[error("no crossing of target {target} for m in [{lo}, {hi}]")]
    NoCrossing { target: f64, lo: f64, hi: f64 },

    #[error("simulation needs about {required:.3e} word operations, budget is {budget:.3e}")]
    Budget { required: f64, budget: f64 },

    #[error("malformed code set: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            message: message.into(),
        }
    }

    pub(crate) fn validity(name: &'static str, message: impl Into<String>) -> Self {
        Error::Validity {
            name,
            message: message.into(),
        }
    }
}
