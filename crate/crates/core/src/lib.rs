//! Synthesis and analysis of engineered spin chains with perfect state
//! transfer that tolerate errors in the arrival time.
//!
//! Everything operates in the single-excitation subspace, where a chain of
//! `n` spins is an `n x n` real symmetric tridiagonal matrix. Couplings are
//! dimensionless energies and times are measured in inverse energy units.

pub mod bounds;
pub mod chain;
pub mod dynamics;
pub mod eigen;
pub mod encoding;
pub mod error;
pub mod io;
pub mod pst;
pub mod quadrature;
pub mod revival;
pub mod robustness;
pub mod spectrum;
pub mod synthesis;
pub mod tolerances;

pub use chain::ChainSpec;
pub use dynamics::{EvolutionTrace, Propagator, ReceiverWindow};
pub use eigen::{eigendecompose, Eigensystem};
pub use error::{Error, Result};
pub use pst::{antisymmetric_trace, end_moment, pst_check, PstVerdict};
pub use spectrum::{EndWeights, Spectrum};
pub use synthesis::{chain_from_spectrum, krawtchouk, Design, TRexParams};
