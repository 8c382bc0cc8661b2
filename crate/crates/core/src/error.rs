use thiserror::Error;

/// Every failure the library can report.
///
/// Variant names are stable: the CLI prints them on stderr.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("spectral filter is singular at the origin")]
    SingularityAtOrigin,
    #[error("quadrature exceeded {0} subdivisions")]
    MaxSubdivisionsExceeded(usize),
    #[error("integrand is not finite at x = {0}")]
    NonFiniteIntegrand(f64),
    #[error("tail order {0} < 2 and no cutoff given")]
    TailBoundUnavailable(f64),
    #[error("unsupported wavelet order {0}")]
    UnsupportedOrder(usize),
    #[error("filter ratio undefined at x = {0}")]
    RatioUndefined(f64),
    #[error("covariance matrix not positive definite at leading minor {index}")]
    NotPositiveDefinite { index: usize },
    #[error("circulant embedding has negative eigenvalue {min} (tolerance {tol})")]
    NegativeEigenvalue { min: f64, tol: f64 },
    #[error("AR(1) coefficient {0} is not stationary")]
    NonStationary(f64),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("sample variance is zero")]
    DegenerateVariance,
    #[error("model density vanishes at frequency {0}")]
    ModelDensityZero(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Short variant name, used for CLI diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::ParameterOutOfRange(_) => "ParameterOutOfRange",
            Error::SingularityAtOrigin => "SingularityAtOrigin",
            Error::MaxSubdivisionsExceeded(_) => "MaxSubdivisionsExceeded",
            Error::NonFiniteIntegrand(_) => "NonFiniteIntegrand",
            Error::TailBoundUnavailable(_) => "TailBoundUnavailable",
            Error::UnsupportedOrder(_) => "UnsupportedOrder",
            Error::RatioUndefined(_) => "RatioUndefined",
            Error::NotPositiveDefinite { .. } => "NotPositiveDefinite",
            Error::NegativeEigenvalue { .. } => "NegativeEigenvalue",
            Error::NonStationary(_) => "NonStationary",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::DegenerateVariance => "DegenerateVariance",
            Error::ModelDensityZero(_) => "ModelDensityZero",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
