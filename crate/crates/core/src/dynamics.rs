//! Single-excitation time evolution, receiver windows and arrival metrics.
//!
//! Sites are zero-based: site `0` is the sender, site `n - 1` the receiver.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use statrs::function::erf::erf;

use crate::chain::ChainSpec;
use crate::eigen::eigendecompose;
use crate::error::{Error, Result};
use crate::quadrature::integrate_dyn;
use crate::tolerances::{GAUSSIAN_CUTOFF, QUADRATURE_ABS, WIDTH_BISECTION};

/// `exp(-iHt)` through the eigendecomposition of `H`.
#[derive(Debug, Clone)]
pub struct Propagator {
    values: Vec<f64>,
    vectors: DMatrix<f64>,
    /// `<N|lambda_k><lambda_k|1>`
    end_products: Vec<f64>,
}

impl Propagator {
    pub fn new(chain: &ChainSpec) -> Result<Self> {
        let es = eigendecompose(chain)?;
        let n = es.n();
        let end_products = (0..n)
            .map(|k| es.vectors[(0, k)] * es.vectors[(n - 1, k)])
            .collect();
        Ok(Self {
            values: es.values,
            vectors: es.vectors,
            end_products,
        })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.values
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    pub fn spectral_span(&self) -> f64 {
        self.values[self.n() - 1] - self.values[0]
    }

    /// `<target|exp(-iHt)|source>`.
    pub fn amplitude(&self, t: f64, source: usize, target: usize) -> Complex64 {
        (0..self.n())
            .map(|k| {
                self.vectors[(target, k)] * self.vectors[(source, k)]
                    * Complex64::from_polar(1.0, -self.values[k] * t)
            })
            .sum()
    }

    /// `<N|exp(-iHt)|1>`.
    pub fn end_to_end(&self, t: f64) -> Complex64 {
        self.values
            .iter()
            .zip(&self.end_products)
            .map(|(l, c)| c * Complex64::from_polar(1.0, -l * t))
            .sum()
    }

    /// `exp(-iHt)|source>` on every site.
    pub fn column(&self, t: f64, source: usize) -> Vec<Complex64> {
        (0..self.n()).map(|target| self.amplitude(t, source, target)).collect()
    }

    /// `<dec|exp(-iHt)|enc>` for arbitrary complex site vectors.
    pub fn overlap(&self, t: f64, decoder: &[Complex64], encoder: &[Complex64]) -> Complex64 {
        let n = self.n();
        (0..n)
            .map(|k| {
                let v = self.vectors.column(k);
                let left: Complex64 = (0..n).map(|i| decoder[i].conj() * v[i]).sum();
                let right: Complex64 = (0..n).map(|i| encoder[i] * v[i]).sum();
                left * right * Complex64::from_polar(1.0, -self.values[k] * t)
            })
            .sum()
    }

    /// Spectral coefficients of `<dec|exp(-iHt)|enc>`, so that repeated
    /// evaluation costs `O(n)`.
    pub fn overlap_coefficients(&self, decoder: &[Complex64], encoder: &[Complex64]) -> Vec<Complex64> {
        let n = self.n();
        (0..n)
            .map(|k| {
                let v = self.vectors.column(k);
                let left: Complex64 = (0..n).map(|i| decoder[i].conj() * v[i]).sum();
                let right: Complex64 = (0..n).map(|i| encoder[i] * v[i]).sum();
                left * right
            })
            .collect()
    }

    pub fn evaluate(&self, coefficients: &[Complex64], t: f64) -> Complex64 {
        self.values
            .iter()
            .zip(coefficients)
            .map(|(l, c)| c * Complex64::from_polar(1.0, -l * t))
            .sum()
    }
}

/// `<target|exp(-iHt)|source>` with zero-based sites.
pub fn transfer_amplitude(chain: &ChainSpec, t: f64, source: usize, target: usize) -> Result<Complex64> {
    let n = chain.n();
    if source >= n || target >= n {
        return Err(Error::InvalidParameter(format!(
            "sites {source}, {target} outside a chain of length {n}"
        )));
    }
    Ok(Propagator::new(chain)?.amplitude(t, source, target))
}

/// Qubit fidelity `1/3 + (1 + sqrt(F_e))^2 / 6`.
pub fn qubit_fidelity(fe: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&fe) {
        return Err(Error::InvalidParameter(format!("excitation fidelity {fe} outside [0, 1]")));
    }
    Ok(1.0 / 3.0 + (1.0 + fe.sqrt()).powi(2) / 6.0)
}

/// Sampled evolution of an amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionTrace {
    pub times: Vec<f64>,
    pub amplitudes: Vec<Complex64>,
    pub fe: Vec<f64>,
    pub f: Vec<f64>,
}

impl EvolutionTrace {
    pub fn from_amplitudes(times: Vec<f64>, amplitudes: Vec<Complex64>) -> Self {
        let fe: Vec<f64> = amplitudes.iter().map(|a| a.norm_sqr().min(1.0)).collect();
        let f = fe
            .iter()
            .map(|&x| 1.0 / 3.0 + (1.0 + x.sqrt()).powi(2) / 6.0)
            .collect();
        Self {
            times,
            amplitudes,
            fe,
            f,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

pub fn uniform_grid(t_max: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 time steps, got {steps}")));
    }
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::InvalidParameter(format!("t_max must be positive, got {t_max}")));
    }
    let dt = t_max / (steps - 1) as f64;
    Ok((0..steps).map(|i| i as f64 * dt).collect())
}

/// End-to-end trace on a uniform grid over `[0, t_max]`.
pub fn trace(chain: &ChainSpec, t_max: f64, steps: usize) -> Result<EvolutionTrace> {
    let times = uniform_grid(t_max, steps)?;
    let prop = Propagator::new(chain)?;
    let amplitudes = times.par_iter().map(|&t| prop.end_to_end(t)).collect();
    Ok(EvolutionTrace::from_amplitudes(times, amplitudes))
}

/// Probability density `p(s)` of receiving at offset `s` from the target time.
#[derive(Debug, Clone, PartialEq)]
pub enum ReceiverWindow {
    Delta,
    /// Uniform on `[-width/2, width/2]`.
    Box { width: f64 },
    /// Gaussian of deviation `sigma`, truncated to `±5 sigma` and renormalized.
    Gaussian { sigma: f64 },
    /// Piecewise-linear density through `(offsets[i], density[i])`, zero outside.
    Tabulated { offsets: Vec<f64>, density: Vec<f64> },
}

impl ReceiverWindow {
    pub fn boxcar(width: f64) -> Result<Self> {
        positive("box width", width)?;
        Ok(Self::Box { width })
    }

    pub fn gaussian(sigma: f64) -> Result<Self> {
        positive("gaussian sigma", sigma)?;
        Ok(Self::Gaussian { sigma })
    }

    /// Normalizes the tabulated density by its trapezoidal integral.
    pub fn tabulated(offsets: Vec<f64>, density: Vec<f64>) -> Result<Self> {
        if offsets.len() < 2 || offsets.len() != density.len() {
            return Err(Error::InvalidParameter("tabulated window needs matching offsets and densities".into()));
        }
        if offsets.windows(2).any(|w| w[1] <= w[0]) || density.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::InvalidParameter(
                "tabulated window needs increasing offsets and non-negative densities".into(),
            ));
        }
        let mass: f64 = offsets
            .windows(2)
            .zip(density.windows(2))
            .map(|(t, p)| 0.5 * (t[1] - t[0]) * (p[0] + p[1]))
            .sum();
        if !(mass > 0.0) {
            return Err(Error::InvalidParameter("tabulated window has zero mass".into()));
        }
        let density = density.into_iter().map(|p| p / mass).collect();
        Ok(Self::Tabulated { offsets, density })
    }

    /// Density at offset `s`; the delta window has no density and returns 0.
    pub fn density(&self, s: f64) -> f64 {
        match self {
            Self::Delta => 0.0,
            Self::Box { width } => {
                if s.abs() <= 0.5 * width {
                    1.0 / width
                } else {
                    0.0
                }
            }
            Self::Gaussian { sigma } => {
                if s.abs() > GAUSSIAN_CUTOFF * sigma {
                    return 0.0;
                }
                let z = sigma * (2.0 * PI).sqrt() * erf(GAUSSIAN_CUTOFF / 2f64.sqrt());
                (-0.5 * (s / sigma).powi(2)).exp() / z
            }
            Self::Tabulated { offsets, density } => {
                if s < offsets[0] || s > offsets[offsets.len() - 1] {
                    return 0.0;
                }
                let i = offsets.partition_point(|&x| x <= s).clamp(1, offsets.len() - 1);
                let (t0, t1) = (offsets[i - 1], offsets[i]);
                let w = (s - t0) / (t1 - t0);
                density[i - 1] * (1.0 - w) + density[i] * w
            }
        }
    }

    /// Points splitting the support into smooth pieces; `None` for the delta window.
    pub fn breakpoints(&self) -> Option<Vec<f64>> {
        match self {
            Self::Delta => None,
            Self::Box { width } => Some(vec![-0.5 * width, 0.5 * width]),
            Self::Gaussian { sigma } => Some(vec![-GAUSSIAN_CUTOFF * sigma, GAUSSIAN_CUTOFF * sigma]),
            Self::Tabulated { offsets, .. } => Some(offsets.clone()),
        }
    }

    /// `∫ p(t - t0) f(t) dt` for a vector-valued `f`. `max_frequency` bounds how
    /// fast `f` oscillates and sets the initial panel count.
    pub fn expectation_vec<F: Fn(f64) -> Vec<f64>>(
        &self,
        f: F,
        dim: usize,
        t0: f64,
        max_frequency: f64,
    ) -> Result<Vec<f64>> {
        self.expectation_with(f, dim, t0, max_frequency, QUADRATURE_ABS)
    }

    fn expectation_with<F: Fn(f64) -> Vec<f64>>(
        &self,
        f: F,
        dim: usize,
        t0: f64,
        max_frequency: f64,
        tol: f64,
    ) -> Result<Vec<f64>> {
        let Some(points) = self.breakpoints() else {
            return Ok(f(t0));
        };
        let mut total = vec![0.0; dim];
        let segments = points.len() - 1;
        let (lo, hi) = (points[0], points[segments]);
        for w in points.windows(2) {
            let (a, b) = (t0 + w[0], t0 + w[1]);
            let panels = ((b - a) * max_frequency / PI).ceil().clamp(4.0, 4096.0) as usize;
            let part = integrate_dyn(
                |t| {
                    // rounding in t - t0 must not push the support edges outside
                    let p = self.density((t - t0).clamp(lo, hi));
                    f(t).into_iter().map(|x| p * x).collect()
                },
                dim,
                a,
                b,
                tol / segments as f64,
                panels,
            )?;
            total.iter_mut().zip(part).for_each(|(x, y)| *x += y);
        }
        Ok(total)
    }

    pub fn expectation<F: Fn(f64) -> f64>(&self, f: F, t0: f64, max_frequency: f64) -> Result<f64> {
        Ok(self.expectation_vec(|t| vec![f(t)], 1, t0, max_frequency)?[0])
    }

    /// `∫ p`, equal to 1 up to quadrature error.
    pub fn total_mass(&self) -> Result<f64> {
        match self {
            Self::Delta => Ok(1.0),
            _ => Ok(self.expectation_with(|_| vec![1.0], 1, 0.0, 0.0, 1e-13)?[0]),
        }
    }
}

fn positive(what: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{what} must be positive, got {x}")))
    }
}

fn check_t0(t0: f64) -> Result<()> {
    positive("t0", t0)
}

/// `F~_e = ∫ p(t - t0) |<N|exp(-iHt)|1>| dt`.
pub fn windowed_transfer(chain: &ChainSpec, window: &ReceiverWindow, t0: f64) -> Result<f64> {
    check_t0(t0)?;
    let prop = Propagator::new(chain)?;
    let v = window.expectation(|t| prop.end_to_end(t).norm(), t0, prop.spectral_span())?;
    Ok(v.clamp(0.0, 1.0))
}

/// `F̄ = 1/2 + (1/6) ∫ p(t - t0) (2 sqrt(F_e) + F_e) dt`.
pub fn expected_fidelity(chain: &ChainSpec, window: &ReceiverWindow, t0: f64) -> Result<f64> {
    check_t0(t0)?;
    let prop = Propagator::new(chain)?;
    let v = window.expectation(
        |t| {
            let a = prop.end_to_end(t).norm();
            2.0 * a + a * a
        },
        t0,
        prop.spectral_span(),
    )?;
    Ok((0.5 + v / 6.0).clamp(0.0, 1.0))
}

/// Length of the connected interval around `t0` on which `fidelity >= 1 - eps`.
/// The interval edges are bracketed by stepping outward in increments of
/// `step` and then bisected.
pub fn arrival_width_by<F: Fn(f64) -> f64>(fidelity: F, t0: f64, eps: f64, step: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon must lie in (0, 1), got {eps}")));
    }
    check_t0(t0)?;
    let threshold = 1.0 - eps;
    let at_t0 = fidelity(t0);
    if at_t0 < threshold {
        return Err(Error::NoArrivalPlateau { fe: at_t0, threshold });
    }
    let max_steps = ((4.0 * t0) / step).ceil() as usize + 1;
    let edge = |direction: f64| -> Result<f64> {
        let mut inside = t0;
        for i in 1..=max_steps {
            let t = t0 + direction * i as f64 * step;
            if fidelity(t) < threshold {
                let (mut a, mut b) = (inside, t);
                while (b - a).abs() > WIDTH_BISECTION {
                    let m = 0.5 * (a + b);
                    if fidelity(m) >= threshold {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                return Ok(0.5 * (a + b));
            }
            inside = t;
        }
        Err(Error::NumericalFailure {
            step: max_steps,
            reason: "arrival plateau does not end".into(),
        })
    };
    let right = edge(1.0)?;
    let left = edge(-1.0)?;
    Ok(right - left)
}

/// Outward stepping increment that resolves the fastest oscillation of a propagator.
pub fn width_step(prop: &Propagator, t0: f64) -> f64 {
    (t0 / 512.0).min(PI / (8.0 * prop.spectral_span().max(f64::MIN_POSITIVE)))
}

/// Arrival width of the end-to-end excitation fidelity.
pub fn arrival_width(chain: &ChainSpec, t0: f64, eps: f64) -> Result<f64> {
    let prop = Propagator::new(chain)?;
    let step = width_step(&prop, t0);
    arrival_width_by(|t| prop.end_to_end(t).norm_sqr(), t0, eps, step)
}

/// Least-squares slope of `ln F_e` against `2 ln sin(pi t / (2 t0))` over
/// samples with `t` in `[0.5 t0, 0.95 t0]`: the `m` in `F_e ≈ sin^{2m}`.
pub fn profile_exponent(trace: &EvolutionTrace, t0: f64) -> Result<f64> {
    check_t0(t0)?;
    let points: Vec<(f64, f64)> = trace
        .times
        .iter()
        .zip(&trace.fe)
        .filter(|(&t, &fe)| t >= 0.5 * t0 && t <= 0.95 * t0 && fe > 0.0)
        .map(|(&t, &fe)| (2.0 * (PI * t / (2.0 * t0)).sin().ln(), fe.ln()))
        .collect();
    const NEEDED: usize = 8;
    if points.len() < NEEDED {
        return Err(Error::InsufficientSamples {
            found: points.len(),
            needed: NEEDED,
        });
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}
