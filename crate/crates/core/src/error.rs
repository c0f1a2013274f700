use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Neighborhood order other than 1 or 2.
    #[error("unsupported neighborhood order {0}; supported orders are 1 and 2")]
    UnsupportedOrder(u8),
    /// Lattice smaller than the minimum 3x3 window.
    #[error("field must be at least 3x3, got {height}x{width}")]
    FieldTooSmall { height: usize, width: usize },
    /// Value buffer length does not match `height * width`.
    #[error("value buffer has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    /// NaN or infinity in a field.
    #[error("non-finite value at site index {0}")]
    NonFinite(usize),
    /// sigma2 (or another variance) must be strictly positive.
    #[error("variance must be positive, got {0}")]
    NonPositiveVariance(f64),
    /// A field with no usable variation (constant sites, zero denominator).
    #[error("degenerate field: {0}")]
    DegenerateField(&'static str),
    /// A pattern covariance whose relevant entry sums vanish.
    #[error("degenerate covariance: {0}")]
    DegenerateCovariance(&'static str),
    /// The Eq.-style mean estimator is singular at beta = 1/k.
    #[error("mean estimator is singular: 1 - k*beta = {0}")]
    SingularMean(f64),
    /// No pattern rows under the requested boundary policy.
    #[error("no contextual patterns fit the field under the interior-only policy")]
    EmptyPatternSet,
    /// Fewer rows than a covariance needs.
    #[error("need at least 2 pattern rows, got {0}")]
    InsufficientData(usize),
    /// Two maps or lattices with different shapes.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(&'static str),
    /// A bad run/schedule configuration value.
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    /// Negative noise level.
    #[error("noise level must be >= 0, got {0}")]
    NegativeNoise(f64),
    /// Image values outside [0, 255].
    #[error("value {value} at site {index} outside the [0,255] image range")]
    OutOfImageRange { index: usize, value: f64 },
    /// Histogram with fewer than 2 bins.
    #[error("histogram needs at least 2 bins, got {0}")]
    BadBinCount(usize),
}

pub type Result<T> = core::result::Result<T, Error>;
