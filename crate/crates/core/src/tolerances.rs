//! Numerical tolerances shared across the crate.

/// Relative tolerance when testing that a gap is an odd multiple of the base gap.
pub const ODD_GAP_REL: f64 = 1e-9;

/// Largest divisor tried when searching for a base gap below the minimum gap.
pub const MAX_GAP_DIVISOR: u32 = 21;

/// Mirror symmetry of couplings, relative to the largest coupling.
pub const MIRROR_COUPLING_REL: f64 = 1e-8;

/// Mirror symmetry of the diagonal, relative to `max(1, |diag|_max)`.
pub const MIRROR_DIAGONAL_REL: f64 = 1e-8;

/// Symmetry `lambda_k = -lambda_{N+1-k}` of a spectrum.
pub const SPECTRUM_SYMMETRY: f64 = 1e-9;

/// Sum of end weights.
pub const WEIGHT_SUM: f64 = 1e-10;

/// Gaps smaller than this fraction of the span make a spectrum ill-conditioned.
pub const ILL_CONDITIONED_GAP: f64 = 1e-12;

/// Largest tolerated inner product between Lanczos vectors after reorthogonalization.
pub const LANCZOS_ORTHOGONALITY: f64 = 1e-8;

/// Absolute tolerance of the adaptive Simpson rule.
pub const QUADRATURE_ABS: f64 = 1e-8;

/// Half-width of the truncated gaussian window, in standard deviations.
pub const GAUSSIAN_CUTOFF: f64 = 5.0;

/// Time resolution of the arrival-width bisection.
pub const WIDTH_BISECTION: f64 = 1e-9;

/// Distance kept between a fractional-revival angle and the endpoints 0 and pi/2.
pub const THETA_CLAMP: f64 = 1e-6;
