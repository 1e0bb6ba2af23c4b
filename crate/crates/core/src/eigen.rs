//! Symmetric tridiagonal eigensolver (implicit QL with Wilkinson-style shifts).
//!
//! The rotations act on the columns of the eigenvector matrix, so each row
//! evolves independently. [`end_rows`] exploits this to track only the first
//! and last site, which is all the end-to-end amplitude needs.

use nalgebra::DMatrix;

use crate::chain::ChainSpec;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 60;

/// Eigenvalues in ascending order with orthonormal eigenvectors as columns.
/// Each eigenvector is signed so that its first-site component is non-negative.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl Eigensystem {
    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Component of eigenvector `k` on `site`.
    pub fn component(&self, site: usize, k: usize) -> f64 {
        self.vectors[(site, k)]
    }

    /// End weights `a_k = <1|lambda_k>^2`.
    pub fn end_weights(&self) -> Vec<f64> {
        (0..self.n()).map(|k| self.vectors[(0, k)].powi(2)).collect()
    }

    /// `<lambda_k|S|lambda_k>`, which is +1 or -1 for a mirror-symmetric chain.
    pub fn mirror_parity(&self, k: usize) -> f64 {
        let n = self.n();
        (0..n)
            .map(|i| self.vectors[(i, k)] * self.vectors[(n - 1 - i, k)])
            .sum()
    }
}

/// Eigenvalues together with the eigenvector components on the two end sites.
#[derive(Debug, Clone)]
pub struct EndRows {
    pub values: Vec<f64>,
    pub first: Vec<f64>,
    pub last: Vec<f64>,
}

/// Full eigendecomposition of a chain.
pub fn eigendecompose(chain: &ChainSpec) -> Result<Eigensystem> {
    let n = chain.n();
    let rows: Vec<usize> = (0..n).collect();
    let (values, z) = tridiagonal_ql(chain.diagonal(), chain.couplings(), &rows)?;
    let mut vectors = DMatrix::zeros(n, n);
    for (r, row) in z.iter().enumerate() {
        for (k, &x) in row.iter().enumerate() {
            vectors[(r, k)] = x;
        }
    }
    for k in 0..n {
        if vectors[(0, k)] < 0.0 {
            vectors.column_mut(k).neg_mut();
        }
    }
    Ok(Eigensystem { values, vectors })
}

/// Eigenvalues and end-site rows only: `O(n^2)` instead of `O(n^3)`.
pub fn end_rows(chain: &ChainSpec) -> Result<EndRows> {
    let n = chain.n();
    let (values, z) = tridiagonal_ql(chain.diagonal(), chain.couplings(), &[0, n - 1])?;
    let mut first = z[0].clone();
    let mut last = z[1].clone();
    for k in 0..n {
        if first[k] < 0.0 {
            first[k] = -first[k];
            last[k] = -last[k];
        }
    }
    Ok(EndRows {
        values,
        first,
        last,
    })
}

/// Eigenvalues only.
pub fn eigenvalues(chain: &ChainSpec) -> Result<Vec<f64>> {
    Ok(tridiagonal_ql(chain.diagonal(), chain.couplings(), &[])?.0)
}

/// Implicit QL on the tridiagonal `(diag, off)`. Returns ascending eigenvalues and,
/// for every requested row index, that row of the eigenvector matrix (columns
/// permuted to match the sorted eigenvalues).
fn tridiagonal_ql(diag: &[f64], off: &[f64], rows: &[usize]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    let mut z: Vec<Vec<f64>> = rows
        .iter()
        .map(|&r| {
            let mut row = vec![0.0; n];
            row[r] = 1.0;
            row
        })
        .collect();

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(Error::NumericalFailure {
                    step: l,
                    reason: "implicit QL did not converge".into(),
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for row in z.iter_mut() {
                    let f = row[i + 1];
                    row[i + 1] = s * row[i] + c * f;
                    row[i] = c * row[i] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    if d.iter().any(|x| !x.is_finite()) {
        return Err(Error::NumericalFailure {
            step: n,
            reason: "non-finite eigenvalue".into(),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&k| d[k]).collect();
    let z = z
        .into_iter()
        .map(|row| order.iter().map(|&k| row[k]).collect())
        .collect();
    Ok((values, z))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(chain: &ChainSpec, es: &Eigensystem) -> f64 {
        let h = chain.to_dense();
        (0..es.n())
            .map(|k| {
                let v = es.vectors.column(k);
                (&h * v - v * es.values[k]).norm()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn two_site_chain() {
        let c = ChainSpec::new(vec![1.0]).unwrap();
        let es = eigendecompose(&c).unwrap();
        assert!((es.values[0] + 1.0).abs() < 1e-15);
        assert!((es.values[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn four_site_closed_form() {
        let (j1, j2) = (0.7_f64, 1.9_f64);
        let c = ChainSpec::new(vec![j1, j2, j1]).unwrap();
        let es = eigendecompose(&c).unwrap();
        let r = (4.0 * j1 * j1 + j2 * j2).sqrt();
        let mut expected = vec![
            0.5 * (j2 + r),
            0.5 * (-j2 + r),
            0.5 * (j2 - r),
            0.5 * (-j2 - r),
        ];
        expected.sort_by(f64::total_cmp);
        for (a, b) in es.values.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-13, "{a} vs {b}");
        }
    }

    #[test]
    fn five_site_closed_form() {
        let (j1, j2) = (1.3_f64, 0.4_f64);
        let c = ChainSpec::new(vec![j1, j2, j2, j1]).unwrap();
        let es = eigendecompose(&c).unwrap();
        let r = (j1 * j1 + 2.0 * j2 * j2).sqrt();
        let expected = [-r, -j1, 0.0, j1, r];
        for (a, b) in es.values.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-13, "{a} vs {b}");
        }
    }

    #[test]
    fn residual_and_orthonormality() {
        let c = ChainSpec::with_diagonal(
            vec![0.3, 2.0, 150.0, 7.0, 0.01, 3.0],
            vec![0.0, 1.0, -2.0, 0.0, 5.0, 0.0, 0.2],
        )
        .unwrap();
        let es = eigendecompose(&c).unwrap();
        assert!(residual(&c, &es) <= 1e-10 * c.frobenius_norm());
        let gram = es.vectors.transpose() * &es.vectors;
        assert!((gram - DMatrix::identity(7, 7)).amax() < 1e-12);
    }

    #[test]
    fn end_rows_match_full() {
        let c = ChainSpec::new(vec![0.9, 3.0, 40.0, 3.0, 0.9]).unwrap();
        let es = eigendecompose(&c).unwrap();
        let ends = end_rows(&c).unwrap();
        for k in 0..6 {
            assert!((ends.values[k] - es.values[k]).abs() < 1e-12);
            assert!((ends.first[k] - es.component(0, k)).abs() < 1e-12);
            assert!((ends.last[k] - es.component(5, k)).abs() < 1e-12);
        }
    }

    #[test]
    fn matches_dense_oracle() {
        let c = ChainSpec::new((1..12).map(|k| ((k * (12 - k)) as f64).sqrt()).collect()).unwrap();
        let es = eigendecompose(&c).unwrap();
        let mut dense: Vec<f64> = c.to_dense().symmetric_eigen().eigenvalues.iter().copied().collect();
        dense.sort_by(f64::total_cmp);
        for (a, b) in es.values.iter().zip(&dense) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
