//! Adaptive Simpson quadrature for scalar and vector-valued integrands.

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 48;

/// `∫_a^b f` to absolute tolerance `tol`, after splitting `[a, b]` into
/// `panels` equal pieces (useful when `f` oscillates faster than the interval).
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64, panels: usize) -> Result<f64> {
    let g = |t: f64| [f(t)];
    Ok(integrate_vec::<1, _>(g, a, b, tol, panels)?[0])
}

/// Vector-valued version of [`integrate`]: the error estimate is the largest
/// component deviation.
pub fn integrate_vec<const D: usize, F: Fn(f64) -> [f64; D]>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    panels: usize,
) -> Result<[f64; D]> {
    integrate_dyn(|t| f(t).to_vec(), D, a, b, tol, panels).map(|v| {
        let mut out = [0.0; D];
        out.copy_from_slice(&v);
        out
    })
}

/// Integrand returning a `Vec` of fixed length `dim`.
pub fn integrate_dyn<F: Fn(f64) -> Vec<f64>>(
    f: F,
    dim: usize,
    a: f64,
    b: f64,
    tol: f64,
    panels: usize,
) -> Result<Vec<f64>> {
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let mut total = vec![0.0; dim];
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let hi = if p + 1 == panels { b } else { lo + h };
        let flo = f(lo);
        let fhi = f(hi);
        let mid = 0.5 * (lo + hi);
        let fmid = f(mid);
        let whole = simpson(&flo, &fmid, &fhi, hi - lo);
        let part = refine(&f, lo, hi, &flo, &fmid, &fhi, &whole, tol / panels as f64, MAX_DEPTH)?;
        total.iter_mut().zip(part).for_each(|(t, x)| *t += x);
    }
    Ok(total)
}

fn simpson(fa: &[f64], fm: &[f64], fb: &[f64], width: f64) -> Vec<f64> {
    fa.iter()
        .zip(fm)
        .zip(fb)
        .map(|((a, m), b)| width / 6.0 * (a + 4.0 * m + b))
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> Vec<f64>>(
    f: &F,
    a: f64,
    b: f64,
    fa: &[f64],
    fm: &[f64],
    fb: &[f64],
    whole: &[f64],
    tol: f64,
    depth: u32,
) -> Result<Vec<f64>> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, &flm, fm, m - a);
    let right = simpson(fm, &frm, fb, b - m);
    let err = left
        .iter()
        .zip(&right)
        .zip(whole)
        .map(|((l, r), w)| (l + r - w).abs())
        .fold(0.0, |m: f64, e| if e.is_nan() || m.is_nan() { f64::NAN } else { m.max(e) });
    if !err.is_finite() {
        return Err(Error::Quadrature { a, b });
    }
    if err <= 15.0 * tol {
        return Ok(left
            .iter()
            .zip(&right)
            .zip(whole)
            .map(|((l, r), w)| l + r + (l + r - w) / 15.0)
            .collect());
    }
    if depth == 0 || m <= a || m >= b {
        return Err(Error::Quadrature { a, b });
    }
    let mut l = refine(f, a, m, fa, &flm, fm, &left, 0.5 * tol, depth - 1)?;
    let r = refine(f, m, b, fm, &frm, fb, &right, 0.5 * tol, depth - 1)?;
    l.iter_mut().zip(r).for_each(|(x, y)| *x += y);
    Ok(l)
}
