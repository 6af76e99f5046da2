use crate::fourier::FourierCoefficient;
use crate::measure::QuadratureResult;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("input {value} lies outside [0, 1]")]
    OutsideUnitInterval { value: String },

    #[error("continued fraction digits must be >= 1")]
    InvalidCfDigit,

    #[error("the empty word addresses no Gauss cylinder")]
    EmptyWord,

    #[error("endpoints {left} and {right} are not Stern-Brocot neighbours")]
    NotUnimodular { left: String, right: String },

    #[error("interval endpoints out of order: {a} > {b}")]
    ReversedInterval { a: String, b: String },

    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),

    #[error("input must be finite, got {0}")]
    NonFiniteInput(f64),

    #[error("mass tolerance must lie in (0, 1), got {0}")]
    InvalidMassTolerance(f64),

    #[error("Lipschitz bound must be finite and nonnegative, got {0}")]
    InvalidLipschitz(f64),

    #[error("oscillation cap must be positive and finite, got {0}")]
    InvalidOscCap(f64),

    #[error("partial quotient or dyadic exponent exceeds the supported range")]
    ExponentOverflow,

    #[error("cell budget {budget} exhausted; achieved bound {} > tolerance", partial.err_bound)]
    BudgetExhausted {
        budget: u64,
        partial: QuadratureResult,
    },

    #[error("cell budget {budget} exhausted for coefficient n = {}", partial.n)]
    CoeffBudgetExhausted {
        budget: u64,
        partial: FourierCoefficient,
    },

    #[error("coefficient table is missing n = {n}")]
    IncompleteTable { n: i64 },

    #[error("invalid range: {lo} > {hi}")]
    InvalidRange { lo: i64, hi: i64 },

    #[error("ill-conditioned: {0}")]
    IllConditioned(String),
}

pub type Result<T> = std::result::Result<T, Error>;
