use thiserror::Error;

/// Failures raised by the geometry, spectral and capillary routines.
///
/// Every variant has a stable machine-readable [`Error::code`] used by the
/// CLI in its `error: <Code>: <detail>` lines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter `{name}` must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },

    #[error("point ({x}, {y}) lies outside the model disk of radius {radius}")]
    PointOutsideDomain { x: f64, y: f64, radius: f64 },

    #[error("kappa = {kappa}, tau = {tau} is not a Berger sphere (needs kappa > 0, tau != 0)")]
    NotBergerSpace { kappa: f64, tau: f64 },

    #[error("invalid radius: {0}")]
    InvalidRadius(String),

    #[error("intrinsic radius {0} exceeds the overflow guard 1e6")]
    Overflow(f64),

    #[error("kappa_g^2 + kappa = {0} <= 0: the base curve is not a circle")]
    NotACircle(f64),

    #[error("length must be positive and finite, got {0}")]
    InvalidLength(f64),

    #[error("length {length} reaches the Berger fiber period {period}")]
    BergerPeriodExceeded { length: f64, period: f64 },

    #[error("mode n = {n} is not admissible for {bc} boundary conditions")]
    InvalidMode { n: i64, bc: &'static str },

    #[error("invalid exhaustion parameters: {0}")]
    InvalidExhaustionParams(String),

    #[error("grid {ns}x{nt} is too coarse (need at least 8x8)")]
    GridTooCoarse { ns: usize, nt: usize },

    #[error("expected a vector of length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("eigensolver did not converge: {detail} (worst residual {residual:e})")]
    ConvergenceFailure { detail: String, residual: f64 },

    #[error("contact angle {0} is degenerate (must lie strictly between 0 and pi)")]
    DegenerateAngle(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonFinite { .. } => "NonFinite",
            Error::PointOutsideDomain { .. } => "PointOutsideDomain",
            Error::NotBergerSpace { .. } => "NotBergerSpace",
            Error::InvalidRadius(_) => "InvalidRadius",
            Error::Overflow(_) => "Overflow",
            Error::NotACircle(_) => "NotACircle",
            Error::InvalidLength(_) => "InvalidLength",
            Error::BergerPeriodExceeded { .. } => "BergerPeriodExceeded",
            Error::InvalidMode { .. } => "InvalidMode",
            Error::InvalidExhaustionParams(_) => "InvalidExhaustionParams",
            Error::GridTooCoarse { .. } => "GridTooCoarse",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::ConvergenceFailure { .. } => "ConvergenceFailure",
            Error::DegenerateAngle(_) => "DegenerateAngle",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { name, value })
    }
}
