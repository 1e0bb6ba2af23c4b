//! Jacobi matrix reconstruction from a prescribed spectrum.
//!
//! A mirror-symmetric chain is fixed by its spectrum alone: the first-site
//! weights are `a_n ∝ 1/|q'(lambda_n)|` where `q` is the characteristic
//! polynomial. Running Lanczos on `diag(lambda)` from the start vector
//! `sqrt(a)` then yields the diagonal and couplings of the chain.

use crate::chain::ChainSpec;
use crate::error::{Error, Result};
use crate::spectrum::{EndWeights, Spectrum};
use crate::tolerances::{ILL_CONDITIONED_GAP, LANCZOS_ORTHOGONALITY, SPECTRUM_SYMMETRY};

/// `a_n = (1/|q'(lambda_n)|) / sum_m (1/|q'(lambda_m)|)`, evaluated in log space.
pub fn end_weights_from_spectrum(spectrum: &Spectrum) -> Result<EndWeights> {
    let values = spectrum.values();
    let n = values.len();
    if n == 1 {
        return EndWeights::new(vec![1.0]);
    }
    let span = spectrum.span();
    let min_gap = spectrum.min_gap();
    if min_gap < ILL_CONDITIONED_GAP * span {
        return Err(Error::IllConditionedSpectrum { min_gap, span });
    }
    let log_derivative: Vec<f64> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&m| m != i)
                .map(|m| (values[i] - values[m]).abs().ln())
                .sum()
        })
        .collect();
    let smallest = log_derivative.iter().copied().fold(f64::INFINITY, f64::min);
    let raw: Vec<f64> = log_derivative.iter().map(|l| (smallest - l).exp()).collect();
    let total: f64 = raw.iter().sum();
    EndWeights::new(raw.into_iter().map(|x| x / total).collect())
}

/// Lanczos on `diag(values)` from `sqrt(weights)` with full reorthogonalization
/// (two classical Gram-Schmidt passes per step). Returns `(diagonal, couplings)`.
pub fn lanczos_tridiagonalize(values: &[f64], weights: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = values.len();
    let scale = values.iter().fold(0.0_f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n);
    basis.push(weights.iter().map(|a| a.sqrt()).collect());
    let mut diagonal = Vec::with_capacity(n);
    let mut couplings = Vec::with_capacity(n.saturating_sub(1));

    for k in 0..n {
        let q = &basis[k];
        let mut w: Vec<f64> = values.iter().zip(q).map(|(l, x)| l * x).collect();
        diagonal.push(dot(q, &w));
        for _ in 0..2 {
            for prev in &basis {
                let c = dot(prev, &w);
                axpy(-c, prev, &mut w);
            }
        }
        if k + 1 == n {
            break;
        }
        let beta = dot(&w, &w).sqrt();
        if beta <= (n as f64) * f64::EPSILON * scale {
            return Err(Error::NumericalFailure {
                step: k + 1,
                reason: format!("Krylov space exhausted (coupling {beta:e})"),
            });
        }
        w.iter_mut().for_each(|x| *x /= beta);
        let overlap = basis.iter().map(|p| dot(p, &w).abs()).fold(0.0, f64::max);
        if overlap > LANCZOS_ORTHOGONALITY {
            return Err(Error::NumericalFailure {
                step: k + 1,
                reason: format!("loss of orthogonality {overlap:e} after reorthogonalization"),
            });
        }
        couplings.push(beta);
        basis.push(w);
    }
    Ok((diagonal, couplings))
}

/// Mirror-symmetric field-free chain with the given symmetric spectrum.
pub fn chain_from_spectrum(spectrum: &Spectrum) -> Result<ChainSpec> {
    if spectrum.len() < 2 {
        return Err(Error::InvalidSpectrum("need at least two eigenvalues".into()));
    }
    if !spectrum.is_symmetric() {
        return Err(Error::InvalidSpectrum(
            "spectrum is not symmetric about zero; use the persymmetric solver".into(),
        ));
    }
    let weights = end_weights_from_spectrum(spectrum)?;
    let (diagonal, couplings) = lanczos_tridiagonalize(spectrum.values(), weights.as_slice())?;
    let limit = SPECTRUM_SYMMETRY * spectrum.span();
    if let Some(k) = diagonal.iter().position(|h| h.abs() > limit) {
        return Err(Error::NumericalFailure {
            step: k,
            reason: format!("diagonal entry {:e} of a symmetric spectrum is not zero", diagonal[k]),
        });
    }
    ChainSpec::new(couplings)
}

/// Mirror-symmetric chain (generally with a field) for an arbitrary simple spectrum.
pub fn persymmetric_chain(spectrum: &Spectrum) -> Result<ChainSpec> {
    if spectrum.len() < 2 {
        return Err(Error::InvalidSpectrum("need at least two eigenvalues".into()));
    }
    let weights = end_weights_from_spectrum(spectrum)?;
    let (diagonal, couplings) = lanczos_tridiagonalize(spectrum.values(), weights.as_slice())?;
    ChainSpec::with_diagonal(couplings, diagonal)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(y, x)| *y += alpha * x);
}
