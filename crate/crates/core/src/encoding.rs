//! Encoded transfer: spreading the input over the first `m` sites to widen
//! the arrival peak.
//!
//! Region `A` is the prefix `0..m`, region `B` the mirrored suffix `n-m..n`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::chain::ChainSpec;
use crate::dynamics::{arrival_width_by, width_step, EvolutionTrace, Propagator, ReceiverWindow};
use crate::dynamics::uniform_grid;
use crate::eigen::eigendecompose;
use crate::error::{Error, Result};
use crate::pst::pst_check;

/// Encoder on region `A` and decoder on region `B`, both stored as full
/// length-`n` site vectors that vanish outside their region.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodingPair {
    pub encoder: Vec<Complex64>,
    pub decoder: Vec<Complex64>,
    pub objective: f64,
    pub region_size: usize,
}

fn check_regions(n: usize, m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidParameter("region size must be at least 1".into()));
    }
    if 2 * m >= n {
        return Err(Error::RegionsOverlap { m, n });
    }
    Ok(())
}

pub fn region_a(m: usize) -> Vec<usize> {
    (0..m).collect()
}

pub fn region_b(n: usize, m: usize) -> Vec<usize> {
    (n - m..n).collect()
}

/// `M = ∫ p(t - t0) Π_B exp(-iHt) Π_A dt` as a `|B| x |A|` matrix whose rows
/// and columns follow the order of `b` and `a`.
pub fn windowed_operator(
    chain: &ChainSpec,
    window: &ReceiverWindow,
    t0: f64,
    a: &[usize],
    b: &[usize],
) -> Result<DMatrix<Complex64>> {
    let n = chain.n();
    if a.is_empty() || a.len() != b.len() || a.iter().chain(b).any(|&s| s >= n) {
        return Err(Error::InvalidParameter(format!(
            "regions must be non-empty, of equal size and inside 0..{n}"
        )));
    }
    let prop = Propagator::new(chain)?;
    let (rows, cols) = (b.len(), a.len());
    let flat = window.expectation_vec(
        |t| {
            let mut out = Vec::with_capacity(2 * rows * cols);
            for &j in a {
                for &i in b {
                    let z = prop.amplitude(t, j, i);
                    out.push(z.re);
                    out.push(z.im);
                }
            }
            out
        },
        2 * rows * cols,
        t0,
        prop.spectral_span(),
    )?;
    Ok(DMatrix::from_fn(rows, cols, |i, j| {
        let k = 2 * (j * rows + i);
        Complex64::new(flat[k], flat[k + 1])
    }))
}

/// The literal `Π_B H^2 exp(-iHt0) Π_A` of a perfect-transfer chain. Its
/// singular values coincide with the eigenvalues of `H^2` restricted to `A`.
pub fn timing_operator(chain: &ChainSpec, m: usize) -> Result<DMatrix<Complex64>> {
    let n = chain.n();
    check_regions(n, m)?;
    let t0 = pst_time(chain)?;
    let prop = Propagator::new(chain)?;
    let h = chain.to_dense();
    let h2 = &h * &h;
    let b = region_b(n, m);
    // (H^2 U)[i][j] = sum_k H^2[i][k] U[k][j]
    Ok(DMatrix::from_fn(m, m, |i, j| {
        (0..n)
            .map(|k| h2[(b[i], k)] * prop.amplitude(t0, j, k))
            .sum()
    }))
}

fn pst_time(chain: &ChainSpec) -> Result<f64> {
    pst_check(chain)?
        .t0
        .ok_or_else(|| Error::InvalidChain("encoding needs a perfect-transfer chain".into()))
}

fn mirrored_decoder(chain: &ChainSpec, encoder: &[Complex64]) -> Result<Vec<Complex64>> {
    let phase = pst_check(chain)?
        .phase
        .ok_or_else(|| Error::InvalidChain("encoding needs a perfect-transfer chain".into()))?;
    Ok(encoder.iter().rev().map(|z| phase * z).collect())
}

fn h_squared_block(chain: &ChainSpec, m: usize) -> DMatrix<f64> {
    let h = chain.to_dense();
    let h2 = &h * &h;
    h2.view((0, 0), (m, m)).into_owned()
}

fn embed(n: usize, local: impl Iterator<Item = f64>) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    for (slot, x) in v.iter_mut().zip(local) {
        *slot = Complex64::new(x, 0.0);
    }
    fix_sign(&mut v);
    v
}

fn fix_sign(v: &mut [Complex64]) {
    if let Some(first) = v.iter().find(|z| z.norm() > 1e-14) {
        if first.re < 0.0 {
            v.iter_mut().for_each(|z| *z = -*z);
        }
    }
}

/// Encoder minimizing the curvature `<ψ|H^2|ψ>` of the arrival peak: the
/// lowest eigenvector of `H^2` restricted to the first `m` sites.
pub fn optimal_timing_encoding(chain: &ChainSpec, m: usize) -> Result<EncodingPair> {
    let n = chain.n();
    check_regions(n, m)?;
    let es = h_squared_block(chain, m).symmetric_eigen();
    let k = (0..m)
        .min_by(|&i, &j| es.eigenvalues[i].total_cmp(&es.eigenvalues[j]))
        .expect("m >= 1");
    let encoder = embed(n, es.eigenvectors.column(k).iter().copied());
    let decoder = mirrored_decoder(chain, &encoder)?;
    Ok(EncodingPair {
        objective: es.eigenvalues[k],
        encoder,
        decoder,
        region_size: m,
    })
}

/// `<ψ|H^2|ψ>` for a site vector.
pub fn curvature(chain: &ChainSpec, psi: &[Complex64]) -> f64 {
    let re: Vec<f64> = psi.iter().map(|z| z.re).collect();
    let im: Vec<f64> = psi.iter().map(|z| z.im).collect();
    let hr = chain.apply(&re);
    let hi = chain.apply(&im);
    hr.iter().chain(&hi).map(|x| x * x).sum()
}

/// Unit vector on the first `m` sites (odd `m`) orthogonal to the `m - 1`
/// eigenvectors of largest `|lambda|`.
pub fn eigenvector_orthogonal_encoding(chain: &ChainSpec, m: usize) -> Result<EncodingPair> {
    let n = chain.n();
    if m % 2 == 0 {
        return Err(Error::Parity(format!("region size must be odd, got {m}")));
    }
    check_regions(n, m)?;
    let es = eigendecompose(chain)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| es.values[j].abs().total_cmp(&es.values[i].abs()));
    let excluded = &order[..m - 1];

    // rows: excluded eigenvectors restricted to A, padded to a square matrix
    let c = DMatrix::from_fn(m, m, |i, j| {
        if i < m - 1 {
            es.vectors[(j, excluded[i])]
        } else {
            0.0
        }
    });
    let svd = c.svd(false, true);
    let v_t = svd.v_t.as_ref().expect("requested V^T");
    let mut idx: Vec<usize> = (0..m).collect();
    idx.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    if m > 1 {
        let smallest_kept = svd.singular_values[idx[m - 2]];
        if smallest_kept < 1e-10 * svd.singular_values[idx[0]].max(f64::MIN_POSITIVE) {
            return Err(Error::DegenerateRegion { expected: m - 1 });
        }
    }
    let null = v_t.row(idx[m - 1]);
    let encoder = embed(n, null.iter().copied());
    let decoder = mirrored_decoder(chain, &encoder)?;
    Ok(EncodingPair {
        objective: curvature(chain, &encoder),
        encoder,
        decoder,
        region_size: m,
    })
}

/// Encoder/decoder maximizing the windowed transfer: the top singular pair of
/// the windowed operator.
pub fn windowed_optimal_encoding(
    chain: &ChainSpec,
    window: &ReceiverWindow,
    t0: f64,
    m: usize,
) -> Result<EncodingPair> {
    let n = chain.n();
    check_regions(n, m)?;
    let op = windowed_operator(chain, window, t0, &region_a(m), &region_b(n, m))?;
    let svd = op.svd(true, true);
    let top = (0..m)
        .max_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]))
        .expect("m >= 1");
    let u = svd.u.as_ref().expect("requested U");
    let v_t = svd.v_t.as_ref().expect("requested V^T");
    let mut encoder = vec![Complex64::new(0.0, 0.0); n];
    let mut decoder = encoder.clone();
    for i in 0..m {
        encoder[i] = v_t[(top, i)].conj();
        decoder[n - m + i] = u[(i, top)];
    }
    Ok(EncodingPair {
        objective: svd.singular_values[top],
        encoder,
        decoder,
        region_size: m,
    })
}

/// `|<dec|exp(-iHt)|enc>|^2` on a uniform grid over `[0, t_max]`.
pub fn encoded_trace(chain: &ChainSpec, pair: &EncodingPair, t_max: f64, steps: usize) -> Result<EvolutionTrace> {
    let times = uniform_grid(t_max, steps)?;
    let prop = Propagator::new(chain)?;
    let coeffs = prop.overlap_coefficients(&pair.decoder, &pair.encoder);
    let amplitudes = times.iter().map(|&t| prop.evaluate(&coeffs, t)).collect();
    Ok(EvolutionTrace::from_amplitudes(times, amplitudes))
}

/// Arrival width of the encoded overlap.
pub fn encoded_arrival_width(chain: &ChainSpec, pair: &EncodingPair, t0: f64, eps: f64) -> Result<f64> {
    let prop = Propagator::new(chain)?;
    let coeffs = prop.overlap_coefficients(&pair.decoder, &pair.encoder);
    let step = width_step(&prop, t0);
    arrival_width_by(|t| prop.evaluate(&coeffs, t).norm_sqr(), t0, eps, step)
}
