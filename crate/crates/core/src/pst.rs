//! Scalar diagnostics of a chain: end moments, mirror traces and the
//! perfect-transfer verdict.

use num_complex::Complex64;

use crate::chain::ChainSpec;
use crate::eigen::{eigendecompose, end_rows};
use crate::error::Result;
use crate::spectrum::detect_base_gap;

/// `<1|H^k|1>` by repeated application of the tridiagonal matrix.
pub fn end_moment(chain: &ChainSpec, k: u32) -> f64 {
    let mut v = vec![0.0; chain.n()];
    v[0] = 1.0;
    for _ in 0..k {
        v = chain.apply(&v);
    }
    v[0]
}

/// `Tr(H^k S)` with `S` the site-reversal operator, evaluated spectrally as
/// `sum_n lambda_n^k <lambda_n|S|lambda_n>`.
pub fn antisymmetric_trace(chain: &ChainSpec, k: u32) -> Result<f64> {
    let es = eigendecompose(chain)?;
    Ok((0..es.n())
        .map(|j| es.values[j].powi(k as i32) * es.mirror_parity(j))
        .sum())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PstVerdict {
    pub is_mirror_symmetric: bool,
    pub has_odd_gap_spectrum: bool,
    pub base_gap: Option<f64>,
    /// Present iff both checks pass.
    pub t0: Option<f64>,
    /// Unit-modulus `<N|exp(-iHt0)|1>` when `t0` is present.
    pub phase: Option<Complex64>,
}

impl PstVerdict {
    pub fn is_pst(&self) -> bool {
        self.t0.is_some()
    }
}

pub fn pst_check(chain: &ChainSpec) -> Result<PstVerdict> {
    let is_mirror_symmetric = chain.is_mirror_symmetric();
    let ends = end_rows(chain)?;
    let base_gap = detect_base_gap(&ends.values);
    let has_odd_gap_spectrum = base_gap.is_some();
    let (t0, phase) = match (is_mirror_symmetric, base_gap) {
        (true, Some(g)) => {
            let t0 = std::f64::consts::PI / g;
            let amp: Complex64 = (0..ends.values.len())
                .map(|k| ends.first[k] * ends.last[k] * Complex64::from_polar(1.0, -ends.values[k] * t0))
                .sum();
            (Some(t0), Some(amp / amp.norm()))
        }
        _ => (None, None),
    };
    Ok(PstVerdict {
        is_mirror_symmetric,
        has_odd_gap_spectrum,
        base_gap,
        t0,
        phase,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zeroth_and_second_moment() {
        let c = ChainSpec::new(vec![0.3, 2.0, 5.0, 2.0, 0.3]).unwrap();
        assert_eq!(end_moment(&c, 0), 1.0);
        assert!((end_moment(&c, 2) - 0.09).abs() < 1e-15);
        assert_eq!(end_moment(&c, 1), 0.0);
    }

    #[test]
    fn krawtchouk_fourth_moment() {
        // <1|H^4|1> = J1^2 (J1^2 + J2^2) = 3 * (3 + 4)
        let c = ChainSpec::new(vec![3f64.sqrt(), 2.0, 3f64.sqrt()]).unwrap();
        assert!((end_moment(&c, 4) - 21.0).abs() < 1e-12);
    }

    #[test]
    fn two_site_trace() {
        let c = ChainSpec::new(vec![1.0]).unwrap();
        assert!((antisymmetric_trace(&c, 1).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn trace_matches_central_coupling() {
        let c = ChainSpec::new(vec![0.4, 1.7, 3.2, 1.7, 0.4]).unwrap();
        // the central coupling joins a mirror pair and appears twice
        assert!((antisymmetric_trace(&c, 1).unwrap() - 6.4).abs() < 1e-12);
        let c = ChainSpec::new(vec![0.4, 1.7, 3.2, 1.7, 0.4, 2.0, 0.1]).unwrap();
        let dense = c.to_dense();
        let n = c.n();
        let mut s = nalgebra::DMatrix::zeros(n, n);
        for i in 0..n {
            s[(i, n - 1 - i)] = 1.0;
        }
        let mut hk = nalgebra::DMatrix::identity(n, n);
        for k in 1..=5 {
            hk = &hk * &dense;
            let direct = (&hk * &s).trace();
            let spectral = antisymmetric_trace(&c, k).unwrap();
            assert!((direct - spectral).abs() < 1e-9 * direct.abs().max(1.0), "k={k}");
        }
    }

    #[test]
    fn asymmetric_chain_not_pst() {
        let v = pst_check(&ChainSpec::new(vec![1.0, 1.5]).unwrap()).unwrap();
        assert!(!v.is_mirror_symmetric);
        assert!(v.t0.is_none() && v.phase.is_none());
    }

    #[test]
    fn two_site_pst() {
        let v = pst_check(&ChainSpec::new(vec![1.0]).unwrap()).unwrap();
        assert!(v.is_pst());
        assert!((v.t0.unwrap() - PI / 2.0).abs() < 1e-12);
        // exp(-i sigma_x pi/2) = -i sigma_x
        let phase = v.phase.unwrap();
        assert!((phase - Complex64::new(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn uniform_chain_of_four_is_not_pst() {
        let v = pst_check(&ChainSpec::new(vec![1.0, 1.0, 1.0]).unwrap()).unwrap();
        assert!(v.is_mirror_symmetric);
        assert!(!v.has_odd_gap_spectrum);
    }
}
