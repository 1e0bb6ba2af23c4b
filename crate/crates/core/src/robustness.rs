//! Monte-Carlo study of static coupling disorder.
//!
//! Sample `i` draws from a ChaCha stream selected by `(seed, i)`, so results
//! do not depend on how samples are spread over threads.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::chain::ChainSpec;
use crate::eigen::end_rows;
use crate::error::{Error, Result};

const MAX_RETRIES: usize = 100;

/// Which couplings (zero-based, half-open) receive disorder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionRule {
    All,
    /// The `count` central couplings.
    Central(usize),
    Range { start: usize, end: usize },
}

impl RegionRule {
    pub fn resolve(&self, couplings: usize) -> Result<(usize, usize)> {
        let (start, end) = match *self {
            Self::All => (0, couplings),
            Self::Central(count) => {
                if count > couplings || (couplings - count) % 2 != 0 {
                    return Err(Error::InvalidParameter(format!(
                        "cannot centre {count} of {couplings} couplings"
                    )));
                }
                let skip = (couplings - count) / 2;
                (skip, skip + count)
            }
            Self::Range { start, end } => (start, end),
        };
        if start >= end || end > couplings {
            return Err(Error::InvalidParameter(format!(
                "coupling range {start}..{end} invalid for {couplings} couplings"
            )));
        }
        Ok((start, end))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationReport {
    pub label: String,
    pub delta: f64,
    pub samples: usize,
    pub seed: u64,
    /// Quartiles of `1 - sqrt(F_e(t0))` at levels 0.25, 0.5, 0.75.
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
    pub mean: f64,
    pub std_error: f64,
    /// Draws rejected because a coupling went non-positive.
    pub resampled: usize,
    /// Perturbed coupling indices, half-open.
    pub region: (usize, usize),
}

/// `1 - |<N|exp(-iHt)|1>|`.
pub fn infidelity_at(chain: &ChainSpec, t: f64) -> Result<f64> {
    let ends = end_rows(chain)?;
    let amp: num_complex::Complex64 = (0..chain.n())
        .map(|k| ends.first[k] * ends.last[k] * num_complex::Complex64::from_polar(1.0, -ends.values[k] * t))
        .sum();
    Ok((1.0 - amp.norm()).clamp(0.0, 1.0))
}

/// Perturbed couplings of sample `index` and the number of rejected draws.
pub fn perturbed_couplings(
    couplings: &[f64],
    region: (usize, usize),
    delta: f64,
    seed: u64,
    index: usize,
) -> Result<(Vec<f64>, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    for attempt in 0..=MAX_RETRIES {
        let mut out = couplings.to_vec();
        if delta > 0.0 {
            for j in &mut out[region.0..region.1] {
                *j += rng.random_range(-delta..=delta);
            }
        }
        if out.iter().all(|&j| j > 0.0) {
            return Ok((out, attempt));
        }
    }
    Err(Error::ResampleExhausted {
        sample: index,
        retries: MAX_RETRIES,
    })
}

/// Type-7 quantile of sorted data.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn perturb_ensemble(
    chain: &ChainSpec,
    t0: f64,
    delta: f64,
    region: RegionRule,
    samples: usize,
    seed: u64,
) -> Result<PerturbationReport> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!("delta must be non-negative, got {delta}")));
    }
    if samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    if !(t0.is_finite() && t0 > 0.0) {
        return Err(Error::InvalidParameter(format!("t0 must be positive, got {t0}")));
    }
    let range = region.resolve(chain.n() - 1)?;
    let results: Vec<Result<(f64, usize)>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let (couplings, rejected) = perturbed_couplings(chain.couplings(), range, delta, seed, i)?;
            let perturbed = chain.with_couplings(couplings)?;
            Ok((infidelity_at(&perturbed, t0)?, rejected))
        })
        .collect();
    let mut values = Vec::with_capacity(samples);
    let mut resampled = 0;
    for r in results {
        let (v, k) = r?;
        values.push(v);
        resampled += k;
    }
    let n = samples as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std_error = if samples > 1 {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    values.sort_by(f64::total_cmp);
    Ok(PerturbationReport {
        label: chain.label().to_string(),
        delta,
        samples,
        seed,
        q25: quantile(&values, 0.25),
        q50: quantile(&values, 0.5),
        q75: quantile(&values, 0.75),
        mean,
        std_error,
        resampled,
        region: range,
    })
}

/// Ensembles for two chains over a list of `delta`, paired by `delta`.
#[allow(clippy::too_many_arguments)]
pub fn delta_sweep(
    a: &ChainSpec,
    b: &ChainSpec,
    t0_a: f64,
    t0_b: f64,
    deltas: &[f64],
    region: RegionRule,
    samples: usize,
    seed: u64,
) -> Result<Vec<(PerturbationReport, PerturbationReport)>> {
    deltas
        .iter()
        .map(|&d| {
            Ok((
                perturb_ensemble(a, t0_a, d, region, samples, seed)?,
                perturb_ensemble(b, t0_b, d, region, samples, seed)?,
            ))
        })
        .collect()
}
