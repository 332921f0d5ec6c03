use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error(
        "grid refinement {refinement} too coarse for support radius {sigma}: \
         sigma * spacing * sqrt(2)/2 = {ratio} must be < 1"
    )]
    RefinementTooCoarse {
        refinement: usize,
        sigma: f64,
        ratio: f64,
    },

    #[error("omega_star undefined: tail integral of the modulus diverges ({0})")]
    OmegaStarUndefined(String),

    #[error("matrix is not normal: normality defect {defect:e} exceeds tolerance {tol:e}")]
    NotNormal { defect: f64, tol: f64 },

    #[error(
        "ill-separated spectrum: {clusters} clusters, smallest resolved gap {min_gap:e}, \
         reconstruction residual {residual:e} (allowed {allowed:e})"
    )]
    IllSeparatedSpectrum {
        clusters: usize,
        min_gap: f64,
        residual: f64,
        allowed: f64,
    },

    #[error("decomposition failed verification: {0}")]
    InvalidDecomposition(String),

    #[error("kernel does not match the spectral decompositions: {0}")]
    KernelMismatch(String),

    #[error("invalid factorization: residual {residual:e} exceeds tolerance {tolerance:e}")]
    InvalidFactorization { residual: f64, tolerance: f64 },

    #[error("band limit exceeded: support radius {support} > declared sigma {sigma}")]
    BandLimitExceeded { support: f64, sigma: f64 },

    #[error("quadrature did not converge: achieved error {achieved:e}, requested {requested:e}")]
    QuadratureNonConvergence { achieved: f64, requested: f64 },

    #[error("non-finite function value at {0}")]
    NonFiniteValue(String),

    #[error("exponent mismatch: 1/{p} + 1/{q} != 1/{r}")]
    ExponentMismatch { p: f64, q: f64, r: f64 },

    #[error("unknown experiment id `{0}`")]
    UnknownExperiment(String),

    #[error("config value out of range: {0}")]
    OutOfRange(String),

    #[error("report cannot be plotted: {0}")]
    MissingPlotColumns(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
