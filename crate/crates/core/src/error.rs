use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("ill-conditioned spectrum: smallest gap {min_gap:e} is below 1e-12 of the span {span:e}")]
    IllConditionedSpectrum { min_gap: f64, span: f64 },

    #[error("parity error: {0}")]
    Parity(String),

    #[error("malformed input at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("numerical failure at step {step}: {reason}")]
    NumericalFailure { step: usize, reason: String },

    #[error("quadrature did not converge on [{a}, {b}]")]
    Quadrature { a: f64, b: f64 },

    #[error("approximation undefined for odd central block (length {block})")]
    OddCentralBlock { block: usize },

    #[error("regions overlap: region size {m} is not below half of chain length {n}")]
    RegionsOverlap { m: usize, n: usize },

    #[error("degenerate region: projected constraints have rank below {expected}")]
    DegenerateRegion { expected: usize },

    #[error("degenerate after shift: {0}")]
    DegenerateAfterShift(String),

    #[error("no arrival plateau: F_e(t0) = {fe} is below the threshold {threshold}")]
    NoArrivalPlateau { fe: f64, threshold: f64 },

    #[error("too few usable samples for a fit: {found} (need at least {needed})")]
    InsufficientSamples { found: usize, needed: usize },

    #[error("sample {sample} produced a non-positive coupling after {retries} retries")]
    ResampleExhausted { sample: usize, retries: usize },
}

impl Error {
    /// True for failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NumericalFailure { .. }
                | Error::Quadrature { .. }
                | Error::ResampleExhausted { .. }
        )
    }
}
