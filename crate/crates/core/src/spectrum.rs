//! Spectra with odd-gap structure, and first-site eigenvector weights.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::tolerances::{MAX_GAP_DIVISOR, ODD_GAP_REL, SPECTRUM_SYMMETRY, WEIGHT_SUM};

/// Strictly increasing eigenvalues. When `base_gap` is present every
/// consecutive gap is an odd multiple of it and the spectrum supports
/// perfect transfer at `pi / base_gap` (given a mirror-symmetric chain).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
    base_gap: Option<f64>,
}

impl Spectrum {
    /// Sorts the values, rejects repeats, and searches for a base gap.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        check_values(&mut values)?;
        let base_gap = detect_base_gap(&values);
        Ok(Self { values, base_gap })
    }

    /// As [`Spectrum::new`] but certifies the given base gap instead of searching.
    pub fn with_base_gap(mut values: Vec<f64>, base_gap: f64) -> Result<Self> {
        check_values(&mut values)?;
        if !(base_gap.is_finite() && base_gap > 0.0) {
            return Err(Error::InvalidSpectrum(format!("base gap must be positive, got {base_gap}")));
        }
        if let Some(k) = values
            .windows(2)
            .position(|w| odd_multiple(w[1] - w[0], base_gap).is_none())
        {
            return Err(Error::InvalidSpectrum(format!(
                "gap {} between values {} and {} is not an odd multiple of {base_gap}",
                values[k + 1] - values[k],
                k + 1,
                k + 2
            )));
        }
        Ok(Self {
            values,
            base_gap: Some(base_gap),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn base_gap(&self) -> Option<f64> {
        self.base_gap
    }

    /// `t0 = pi / g`.
    pub fn transfer_time(&self) -> Option<f64> {
        self.base_gap.map(|g| PI / g)
    }

    pub fn span(&self) -> f64 {
        self.values[self.values.len() - 1] - self.values[0]
    }

    pub fn min_gap(&self) -> f64 {
        self.values
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// `lambda_k = -lambda_{N+1-k}` within tolerance.
    pub fn is_symmetric(&self) -> bool {
        let n = self.values.len();
        let scale = self.values.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
        (0..n).all(|k| (self.values[k] + self.values[n - 1 - k]).abs() <= SPECTRUM_SYMMETRY * scale)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let mut values: Vec<f64> = self.values.iter().map(|x| x * factor).collect();
        if factor < 0.0 {
            values.reverse();
        }
        match self.base_gap {
            Some(g) => Self::with_base_gap(values, g * factor.abs()),
            None => Self::new(values),
        }
    }
}

fn check_values(values: &mut [f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InvalidSpectrum("no eigenvalues".into()));
    }
    if values.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidSpectrum("eigenvalues must be finite".into()));
    }
    values.sort_by(f64::total_cmp);
    if let Some(k) = values.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::InvalidSpectrum(format!(
            "repeated eigenvalue {} (degenerate spectra are not supported)",
            values[k]
        )));
    }
    Ok(())
}

/// `Some(k)` with `k` odd if `gap / g` is within tolerance of the odd integer `k`.
pub fn odd_multiple(gap: f64, g: f64) -> Option<u64> {
    let ratio = gap / g;
    let k = ratio.round();
    if k < 1.0 || (ratio - k).abs() > ODD_GAP_REL * k {
        return None;
    }
    let k = k as u64;
    (k % 2 == 1).then_some(k)
}

/// Base gap of an ascending list, if one exists: tries the smallest gap, then
/// the smallest gap divided by 3, 5, ... up to 21. The accepted candidate is
/// refined to the least-squares value `sum(gaps) / sum(multiples)`.
pub fn detect_base_gap(values: &[f64]) -> Option<f64> {
    if values.len() < 2 {
        return None;
    }
    let gaps: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let min_gap = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    if !(min_gap > 0.0) {
        return None;
    }
    (1..=MAX_GAP_DIVISOR).step_by(2).find_map(|m| {
        let g = min_gap / m as f64;
        let multiples: Option<Vec<u64>> = gaps.iter().map(|&gap| odd_multiple(gap, g)).collect();
        multiples.map(|ks| {
            let total: u64 = ks.iter().sum();
            gaps.iter().sum::<f64>() / total as f64
        })
    })
}

/// Squared first-site components of the eigenvectors, `a_n = <1|lambda_n>^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct EndWeights {
    weights: Vec<f64>,
}

impl EndWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|&a| !(a >= 0.0 && a.is_finite())) {
            return Err(Error::InvalidParameter("end weights must be non-negative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM {
            return Err(Error::InvalidParameter(format!("end weights sum to {total}, not 1")));
        }
        Ok(Self { weights })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detects_unit_gap() {
        let s = Spectrum::new(vec![0.5, -0.5, 1.5, -1.5, 74.5, -74.5, 223.5, -223.5]).unwrap();
        assert!((s.base_gap().unwrap() - 1.0).abs() < 1e-12);
        assert!((s.transfer_time().unwrap() - PI).abs() < 1e-12);
        assert!(s.is_symmetric());
    }

    #[test]
    fn detects_gap_two() {
        let s = Spectrum::new(vec![-307.0, -205.0, -103.0, -1.0, 1.0, 103.0, 205.0, 307.0]).unwrap();
        assert!((s.base_gap().unwrap() - 2.0).abs() < 1e-12);
        assert!((s.transfer_time().unwrap() - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn detects_gap_below_min() {
        // gaps 3 and 5: base gap 1 found with divisor 3
        let s = Spectrum::new(vec![0.0, 3.0, 8.0]).unwrap();
        assert!((s.base_gap().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_even_gap_structure() {
        let s = Spectrum::new(vec![0.0, 1.0, 3.0]).unwrap();
        assert_eq!(s.base_gap(), None);
        assert!(Spectrum::with_base_gap(vec![0.0, 1.0, 3.0], 1.0).is_err());
    }

    #[test]
    fn rejects_degenerate() {
        assert!(Spectrum::new(vec![1.0, 1.0]).is_err());
        assert!(Spectrum::new(vec![]).is_err());
    }

    #[test]
    fn explicit_base_gap() {
        let s = Spectrum::with_base_gap(vec![-4.5, -1.5, 1.5, 4.5], 1.0).unwrap();
        assert_eq!(s.base_gap(), Some(1.0));
        let auto = Spectrum::new(vec![-4.5, -1.5, 1.5, 4.5]).unwrap();
        assert!((auto.base_gap().unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn weights_validate() {
        assert!(EndWeights::new(vec![0.5, 0.5]).is_ok());
        assert!(EndWeights::new(vec![0.6, 0.5]).is_err());
        assert!(EndWeights::new(vec![1.5, -0.5]).is_err());
    }
}
