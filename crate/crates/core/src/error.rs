use thiserror::Error;

/// Errors raised by the state, correlation and simulation layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("state is not normalized: norm² = {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: String, got: String },

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("trace {0} is not 1")]
    TraceNotUnit(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("conditioning on zero-probability branch (weight {0:e})")]
    ZeroProbabilityBranch(f64),

    #[error("vector is not unit norm: |v| = {0}")]
    NonUnitVector(f64),

    #[error("analyzer is out of the transverse plane (component {0:e} along propagation)")]
    OutOfPlaneAnalyzer(f64),

    #[error("no coincidences recorded")]
    NoCoincidences,

    #[error("degenerate design: every angle has cos θ = 0, visibility is unidentifiable")]
    DegenerateDesign,

    #[error("visibility fit needs at least two distinct angles, got {0}")]
    TooFewAngles(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("closed form and Born rule disagree by {0:e}")]
    PathMismatch(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
