//! Fractional revival: splitting the arrival between the two end sites.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::chain::ChainSpec;
use crate::dynamics::Propagator;
use crate::eigen::eigendecompose;
use crate::error::{Error, Result};
use crate::spectrum::Spectrum;
use crate::synthesis::persymmetric_chain;
use crate::tolerances::{MIRROR_COUPLING_REL, THETA_CLAMP};

/// End-site amplitudes expected at the transfer time, up to a global phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RevivalTarget {
    pub stay_amplitude: Complex64,
    pub go_amplitude: Complex64,
    pub theta: Option<f64>,
}

impl RevivalTarget {
    /// Central-coupling conversion: amplitudes `cos 2θ` and `sin 2θ`.
    pub fn central(theta: f64) -> Self {
        Self {
            stay_amplitude: Complex64::new((2.0 * theta).cos(), 0.0),
            go_amplitude: Complex64::new((2.0 * theta).sin(), 0.0),
            theta: Some(theta),
        }
    }

    /// Spectral shift with relative phase `e^{iφ}` between the mirror-symmetric
    /// and antisymmetric parts of the first site.
    pub fn shift(phi: f64) -> Self {
        let rel = Complex64::from_polar(1.0, phi);
        Self {
            stay_amplitude: 0.5 * (1.0 + rel),
            go_amplitude: 0.5 * (1.0 - rel),
            theta: None,
        }
    }

    pub fn probabilities(&self) -> (f64, f64) {
        (self.stay_amplitude.norm_sqr(), self.go_amplitude.norm_sqr())
    }
}

#[derive(Debug, Clone)]
pub struct CentralRevival {
    pub chain: ChainSpec,
    /// Angle actually used after clamping.
    pub theta: f64,
    pub warnings: Vec<String>,
}

/// Replace the two central couplings `J` of an odd chain by `sqrt2 J cos θ`
/// and `sqrt2 J sin θ`.
pub fn central_coupling_revival(chain: &ChainSpec, theta: f64) -> Result<CentralRevival> {
    let n = chain.n();
    if n % 2 == 0 {
        return Err(Error::Parity(format!("central-coupling revival needs odd n, got {n}")));
    }
    if n < 3 {
        return Err(Error::InvalidParameter("chain too short".into()));
    }
    if !(0.0..=FRAC_PI_2).contains(&theta) {
        return Err(Error::InvalidParameter(format!("theta must lie in [0, pi/2], got {theta}")));
    }
    let (left, right) = ((n - 3) / 2, (n - 1) / 2);
    let j = chain.couplings()[left];
    let other = chain.couplings()[right];
    if (j - other).abs() > MIRROR_COUPLING_REL * j.max(other) {
        return Err(Error::InvalidChain(format!(
            "central couplings differ ({j} vs {other}); chain is not mirror symmetric"
        )));
    }
    let mut warnings = Vec::new();
    let used = theta.clamp(THETA_CLAMP, FRAC_PI_2 - THETA_CLAMP);
    if used != theta {
        warnings.push(format!(
            "theta {theta} clamped to {used}: the endpoint disconnects the chain"
        ));
    }
    let mut couplings = chain.couplings().to_vec();
    couplings[left] = 2f64.sqrt() * j * used.cos();
    couplings[right] = 2f64.sqrt() * j * used.sin();
    let converted = ChainSpec::with_diagonal(couplings, chain.diagonal().to_vec())?
        .labelled(format!("revival theta={used} of {}", chain.label()));
    Ok(CentralRevival {
        chain: converted,
        theta: used,
        warnings,
    })
}

/// Shift the antisymmetric-subspace eigenvalues of a perfect-transfer spectrum
/// so that the two subspaces return with relative phase `e^{iφ}` at the
/// original transfer time, then resynthesize a mirror-symmetric chain.
pub fn spectral_shift_revival(spectrum: &Spectrum, phi: f64) -> Result<ChainSpec> {
    let g = spectrum
        .base_gap()
        .ok_or_else(|| Error::InvalidSpectrum("spectrum has no odd-gap structure".into()))?;
    if !phi.is_finite() {
        return Err(Error::InvalidParameter(format!("phase must be finite, got {phi}")));
    }
    let n = spectrum.len();
    let base = persymmetric_chain(spectrum)?;
    let es = eigendecompose(&base)?;
    let symmetric: Vec<bool> = (0..n).map(|k| es.mirror_parity(k) > 0.0).collect();
    if !symmetric[n - 1] || symmetric.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::NumericalFailure {
            step: 0,
            reason: "eigenvector parities do not alternate".into(),
        });
    }
    let t0 = PI / g;
    // antisymmetric phases pick up e^{-i delta t0}; at PST they already carry -1
    let mut delta = (PI - phi).rem_euclid(2.0 * PI) / t0;
    if delta > g {
        delta -= 2.0 * g;
    }
    let tol = 1e-9 * spectrum.span().max(g);
    for candidate in [delta, delta - 2.0 * g, delta + 2.0 * g] {
        let shifted: Vec<(f64, bool)> = spectrum
            .values()
            .iter()
            .zip(&symmetric)
            .map(|(&l, &s)| (if s { l } else { l + candidate }, s))
            .collect();
        let mut sorted = shifted.clone();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let collides = sorted.windows(2).any(|w| w[1].0 - w[0].0 <= tol);
        let alternates = sorted.windows(2).all(|w| w[0].1 != w[1].1) && sorted[n - 1].1;
        if collides || !alternates {
            continue;
        }
        let values = sorted.into_iter().map(|(l, _)| l).collect();
        return Ok(persymmetric_chain(&Spectrum::new(values)?)?
            .labelled(format!("spectral shift phi={phi}")));
    }
    Err(Error::DegenerateAfterShift(format!(
        "shifting antisymmetric eigenvalues by {delta} (mod {}) merges or reorders the spectrum",
        2.0 * g
    )))
}

/// `(|<1|e^{-iHt}|1>|^2, |<N|e^{-iHt}|1>|^2)`.
pub fn revival_probabilities(chain: &ChainSpec, t: f64) -> Result<(f64, f64)> {
    let prop = Propagator::new(chain)?;
    Ok(probabilities_with(&prop, t))
}

pub fn probabilities_with(prop: &Propagator, t: f64) -> (f64, f64) {
    let n = prop.n();
    (
        prop.amplitude(t, 0, 0).norm_sqr(),
        prop.amplitude(t, 0, n - 1).norm_sqr(),
    )
}
