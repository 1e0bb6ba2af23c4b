//! Transfer-time lower bounds and the coupling/time trade-off of T-Rex chains.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::chain::ChainSpec;
use crate::dynamics::EvolutionTrace;
use crate::error::{Error, Result};
use crate::synthesis::{trex_chain, TRexParams};

/// `pi / (2 J_1)`: with a single excitation on site 1 the energy spread of a
/// field-free chain is `J_1`.
pub fn mandelstam_tamm_time(chain: &ChainSpec) -> f64 {
    PI / (2.0 * chain.j1())
}

/// Largest `F_e(t) - sin^2(J_1 t)` over trace samples with `t <= pi / (2 J_1)`.
/// Negative when the envelope holds strictly.
pub fn anandan_envelope_check(chain: &ChainSpec, trace: &EvolutionTrace) -> f64 {
    let j1 = chain.j1();
    let limit = PI / (2.0 * j1);
    trace
        .times
        .iter()
        .zip(&trace.fe)
        .filter(|(&t, _)| t <= limit)
        .map(|(&t, &fe)| fe - (j1 * t).sin().powi(2))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Shorter chains transfer faster than the parity bound allows.
pub const THEOREM_MIN_SITES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(n: usize) -> Self {
        if n % 2 == 0 {
            Self::Even
        } else {
            Self::Odd
        }
    }

    /// Smallest first coupling compatible with perfect transfer at `t0`:
    /// `sqrt(3) pi / (2 t0)` for even chains, `pi / t0` for odd ones.
    pub fn theorem_bound(self, t0: f64) -> f64 {
        match self {
            Self::Even => 3f64.sqrt() * PI / (2.0 * t0),
            Self::Odd => PI / t0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeoffPoint {
    pub gamma: f64,
    /// Transfer time with the largest coupling scaled to 1.
    pub t0: f64,
    pub j1: f64,
    pub j1_t0: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffSweep {
    /// Sorted by `gamma`.
    pub points: Vec<TradeoffPoint>,
    /// Values of `gamma` whose synthesis failed, with the error.
    pub skipped: Vec<(f64, Error)>,
}

pub fn tradeoff_point(n: usize, r: usize, gamma: f64) -> Result<TradeoffPoint> {
    let design = trex_chain(&TRexParams::new(n, r, gamma), true)?;
    let j1 = design.chain.j1();
    Ok(TradeoffPoint {
        gamma,
        t0: design.t0,
        j1,
        j1_t0: j1 * design.t0,
    })
}

/// One rescaled T-Rex chain per `gamma`, evaluated in parallel.
pub fn tradeoff_sweep(n: usize, r: usize, gammas: &[f64]) -> TradeoffSweep {
    let mut sorted = gammas.to_vec();
    sorted.sort_by(f64::total_cmp);
    let results: Vec<(f64, Result<TradeoffPoint>)> = sorted
        .par_iter()
        .map(|&g| (g, tradeoff_point(n, r, g)))
        .collect();
    let mut points = Vec::new();
    let mut skipped = Vec::new();
    for (g, res) in results {
        match res {
            Ok(p) => points.push(p),
            Err(e) => skipped.push((g, e)),
        }
    }
    TradeoffSweep { points, skipped }
}
