use thiserror::Error;

/// Error type shared by every module in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid resolution {0} is too small, need at least 4")]
    ResolutionTooSmall(usize),

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("spectrum too large: omega {omega} holds {count} eigenpairs, cap is {max}")]
    SpectrumTooLarge { omega: f64, count: u64, max: u64 },

    #[error("fit range holds {got} points, need at least {needed}")]
    FitRangeTooSmall { needed: usize, got: usize },

    #[error("degenerate fit: {0}")]
    DegenerateFit(&'static str),

    #[error("filter argument {0} is negative; multipliers act on the spectrum [0, inf)")]
    NegativeFilterArgument(f64),

    #[error("filter index out of range: {0}")]
    FilterIndex(&'static str),

    #[error("filter has no declared decay and no finite support; kernel truncation cannot be justified")]
    FilterNotDecaying,

    #[error("kernel truncation did not resolve below the tail tolerance at scale t = {t}")]
    TruncationUnresolved { t: f64 },

    #[error("scale t = {t} is outside (0, 1]; filters with F(0) != 0 require t <= 1")]
    ScaleOutOfRange { t: f64 },

    #[error("scale list is empty")]
    EmptyScaleList,

    #[error("invalid exponent {name} = {value}")]
    InvalidExponent { name: &'static str, value: f64 },

    #[error("exponent order violated: p = {p} must not exceed q = {q}")]
    ExponentOrder { p: f64, q: f64 },

    #[error("incompatible convolution exponents: 1/p + 1/alpha < 1 for p = {p}, alpha = {alpha}")]
    IncompatibleYoungExponents { p: f64, alpha: f64 },

    #[error("rate exponent {0} is not negative; no decay to verify")]
    NonNegativeRateExponent(f64),

    #[error("spectral band needs product degree {needed_degree} but grid exactness is {exactness}")]
    BandExceedsGrid { needed_degree: u64, exactness: u32 },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("objects belong to different manifold models")]
    ModelMismatch,
}

pub type Result<T> = std::result::Result<T, Error>;
