//! Nearest-neighbour chains restricted to the single-excitation subspace.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::tolerances::{MIRROR_COUPLING_REL, MIRROR_DIAGONAL_REL};

/// A tridiagonal Hamiltonian: `couplings[k]` joins sites `k` and `k + 1`
/// (zero-based), `diagonal[k]` is the on-site field of site `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec {
    couplings: Vec<f64>,
    diagonal: Vec<f64>,
    label: String,
}

impl ChainSpec {
    /// Field-free chain from its couplings.
    pub fn new(couplings: Vec<f64>) -> Result<Self> {
        let n = couplings.len() + 1;
        Self::with_diagonal(couplings, vec![0.0; n])
    }

    pub fn with_diagonal(couplings: Vec<f64>, diagonal: Vec<f64>) -> Result<Self> {
        if diagonal.len() < 2 {
            return Err(Error::InvalidChain(format!(
                "chain length must be at least 2, got {}",
                diagonal.len()
            )));
        }
        if couplings.len() + 1 != diagonal.len() {
            return Err(Error::InvalidChain(format!(
                "{} couplings do not fit a chain of length {}",
                couplings.len(),
                diagonal.len()
            )));
        }
        if let Some((k, j)) = couplings
            .iter()
            .enumerate()
            .find(|(_, j)| !(j.is_finite() && **j > 0.0))
        {
            return Err(Error::InvalidChain(format!(
                "coupling {} is {j}; couplings must be positive and finite",
                k + 1
            )));
        }
        if diagonal.iter().any(|h| !h.is_finite()) {
            return Err(Error::InvalidChain("diagonal entries must be finite".into()));
        }
        Ok(Self {
            couplings,
            diagonal,
            label: String::new(),
        })
    }

    pub fn labelled(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn n(&self) -> usize {
        self.diagonal.len()
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// First coupling `J_1`.
    pub fn j1(&self) -> f64 {
        self.couplings[0]
    }

    pub fn max_coupling(&self) -> f64 {
        self.couplings.iter().copied().fold(0.0, f64::max)
    }

    pub fn is_field_free(&self) -> bool {
        self.diagonal.iter().all(|&h| h == 0.0)
    }

    /// Every coupling multiplied by `factor` (and the diagonal with it).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let c = self.couplings.iter().map(|j| j * factor).collect();
        let d = self.diagonal.iter().map(|h| h * factor).collect();
        Ok(Self::with_diagonal(c, d)?.labelled(self.label.clone()))
    }

    /// Couplings replaced, diagonal and label kept.
    pub fn with_couplings(&self, couplings: Vec<f64>) -> Result<Self> {
        Ok(Self::with_diagonal(couplings, self.diagonal.clone())?.labelled(self.label.clone()))
    }

    /// `SHS = H` within the configured tolerances.
    pub fn is_mirror_symmetric(&self) -> bool {
        let n = self.n();
        let jtol = MIRROR_COUPLING_REL * self.max_coupling();
        let dmax = self.diagonal.iter().fold(1.0_f64, |m, h| m.max(h.abs()));
        let htol = MIRROR_DIAGONAL_REL * dmax;
        let couplings_ok = (0..n - 1)
            .all(|k| (self.couplings[k] - self.couplings[n - 2 - k]).abs() <= jtol);
        let diag_ok = (0..n).all(|k| (self.diagonal[k] - self.diagonal[n - 1 - k]).abs() <= htol);
        couplings_ok && diag_ok
    }

    /// `H v` for the tridiagonal matrix.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n();
        (0..n)
            .map(|i| {
                let mut s = self.diagonal[i] * v[i];
                if i > 0 {
                    s += self.couplings[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s += self.couplings[i] * v[i + 1];
                }
                s
            })
            .collect()
    }

    /// Dense copy of the Hamiltonian.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut h = DMatrix::zeros(n, n);
        for i in 0..n {
            h[(i, i)] = self.diagonal[i];
        }
        for (k, &j) in self.couplings.iter().enumerate() {
            h[(k, k + 1)] = j;
            h[(k + 1, k)] = j;
        }
        h
    }

    /// Frobenius norm, used to scale residual tolerances.
    pub fn frobenius_norm(&self) -> f64 {
        let c: f64 = self.couplings.iter().map(|j| 2.0 * j * j).sum();
        let d: f64 = self.diagonal.iter().map(|h| h * h).sum();
        (c + d).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_coupling() {
        assert!(matches!(
            ChainSpec::new(vec![1.0, 0.0, 1.0]),
            Err(Error::InvalidChain(_))
        ));
        assert!(ChainSpec::new(vec![1.0, -2.0]).is_err());
        assert!(ChainSpec::new(vec![]).is_err());
    }

    #[test]
    fn rejects_length_mismatch() {
        assert!(ChainSpec::with_diagonal(vec![1.0, 1.0], vec![0.0; 2]).is_err());
    }

    #[test]
    fn mirror_symmetry() {
        assert!(ChainSpec::new(vec![1.0, 2.0, 1.0]).unwrap().is_mirror_symmetric());
        assert!(!ChainSpec::new(vec![1.0, 1.5]).unwrap().is_mirror_symmetric());
        let skew = ChainSpec::with_diagonal(vec![1.0, 1.0], vec![0.1, 0.0, 0.0]).unwrap();
        assert!(!skew.is_mirror_symmetric());
    }

    #[test]
    fn apply_matches_dense() {
        let c = ChainSpec::with_diagonal(vec![1.0, 2.0, 3.0], vec![0.5, -1.0, 0.0, 2.0]).unwrap();
        let v = [1.0, -2.0, 0.5, 3.0];
        let dense = c.to_dense() * nalgebra::DVector::from_row_slice(&v);
        for (a, b) in c.apply(&v).iter().zip(dense.iter()) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}
