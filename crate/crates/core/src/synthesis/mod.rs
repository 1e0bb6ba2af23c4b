//! Chain constructors: Krawtchouk chains, spectrum inversion, the T-Rex
//! family with its three-element approximation, and extremal-pair pruning.

mod inverse;

pub use inverse::{chain_from_spectrum, end_weights_from_spectrum, lanczos_tridiagonalize, persymmetric_chain};

use std::f64::consts::PI;

use crate::chain::ChainSpec;
use crate::eigen::eigenvalues;
use crate::error::{Error, Result};
use crate::spectrum::Spectrum;

/// A synthesized chain with its transfer time and how it was obtained.
#[derive(Debug, Clone)]
pub struct Design {
    pub chain: ChainSpec,
    /// Spectrum of `chain` as returned (after any rescaling).
    pub spectrum: Spectrum,
    pub t0: f64,
    /// Factor the couplings were divided by; 1 when not rescaled.
    pub scale: f64,
    pub generator: String,
    pub parameters: Vec<(String, f64)>,
    /// Adjustments made to the requested parameters.
    pub notes: Vec<String>,
}

impl Design {
    fn from_spectrum(spectrum: Spectrum, rescale: bool, generator: &str, parameters: Vec<(String, f64)>) -> Result<Self> {
        let chain = chain_from_spectrum(&spectrum)?;
        let t0 = spectrum.transfer_time().ok_or_else(|| {
            Error::InvalidSpectrum("spectrum has no odd-gap structure".into())
        })?;
        let label = describe(generator, &parameters);
        let mut design = Design {
            chain: chain.labelled(label),
            spectrum,
            t0,
            scale: 1.0,
            generator: generator.into(),
            parameters,
            notes: Vec::new(),
        };
        if rescale {
            design = design.rescaled()?;
        }
        Ok(design)
    }

    /// Divide couplings by the largest one; `t0` grows by the same factor so
    /// `J_1 t0` is unchanged.
    pub fn rescaled(self) -> Result<Self> {
        let jmax = self.chain.max_coupling();
        Ok(Design {
            chain: self.chain.scaled(1.0 / jmax)?,
            spectrum: self.spectrum.scaled(1.0 / jmax)?,
            t0: self.t0 * jmax,
            scale: self.scale * jmax,
            ..self
        })
    }

    pub fn is_rescaled(&self) -> bool {
        self.scale != 1.0
    }
}

fn describe(generator: &str, parameters: &[(String, f64)]) -> String {
    let mut s = generator.to_string();
    for (k, v) in parameters {
        s.push_str(&format!(" {k}={v}"));
    }
    s
}

/// `J_k = j sqrt(k (n - k))`, spectrum `j {-(n-1), -(n-3), ..., n-1}`.
pub fn krawtchouk(n: usize, j: f64) -> Result<ChainSpec> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("chain length must be at least 2, got {n}")));
    }
    if !(j > 0.0 && j.is_finite()) {
        return Err(Error::InvalidParameter(format!("coupling scale must be positive, got {j}")));
    }
    let couplings = (1..n).map(|k| j * ((k * (n - k)) as f64).sqrt()).collect();
    Ok(ChainSpec::new(couplings)?.labelled(format!("krawtchouk n={n} j={j}")))
}

/// Krawtchouk chain as a [`Design`], `t0 = pi / (2j)`.
pub fn krawtchouk_design(n: usize, j: f64, rescale: bool) -> Result<Design> {
    let chain = krawtchouk(n, j)?;
    let values = (0..n).map(|k| j * (2.0 * k as f64 - (n as f64 - 1.0))).collect();
    let mut design = Design {
        chain,
        spectrum: Spectrum::with_base_gap(values, 2.0 * j)?,
        t0: PI / (2.0 * j),
        scale: 1.0,
        generator: "krawtchouk".into(),
        parameters: vec![("n".into(), n as f64), ("j".into(), j)],
        notes: Vec::new(),
    };
    if rescale {
        design = design.rescaled()?;
    }
    Ok(design)
}

/// Parameters of a T-Rex chain: `r` evenly spaced central eigenvalues with
/// gap `base_gap`, the remaining `n - r` pushed out to the scale `gamma * base_gap`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TRexParams {
    pub n: usize,
    pub r: usize,
    pub gamma: f64,
    pub base_gap: f64,
}

impl TRexParams {
    pub fn new(n: usize, r: usize, gamma: f64) -> Self {
        Self {
            n,
            r,
            gamma,
            base_gap: 1.0,
        }
    }

    pub fn with_base_gap(self, base_gap: f64) -> Self {
        Self { base_gap, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let Self { n, r, gamma, base_gap } = *self;
        if n < 2 || r < 2 || r > n {
            return Err(Error::InvalidParameter(format!("need 2 <= r <= n, got n={n}, r={r}")));
        }
        if (n - r) % 2 != 0 {
            return Err(Error::Parity(format!("n={n} and r={r} must have the same parity")));
        }
        if !(base_gap > 0.0 && base_gap.is_finite()) {
            return Err(Error::InvalidParameter(format!("base gap must be positive, got {base_gap}")));
        }
        if r < n && !(gamma.is_finite() && gamma > r as f64) {
            return Err(Error::InvalidParameter(format!("gamma must exceed r={r}, got {gamma}")));
        }
        Ok(())
    }

    /// Odd integer spacing (in units of the base gap) between cleared eigenvalues.
    pub fn outer_spacing(&self) -> u64 {
        smallest_odd_at_least(self.gamma)
    }

    /// Position of the first cleared eigenvalue: the smallest value at or above
    /// `gamma g / 2` that sits an odd multiple of `g` above the top central one.
    pub fn first_outer(&self) -> f64 {
        let top = 0.5 * (self.r as f64 - 1.0);
        let above = smallest_odd_at_least(0.5 * self.gamma - top);
        (top + above as f64) * self.base_gap
    }

    /// Adjustments the placement rule makes to the requested `gamma`.
    pub fn snap_notes(&self) -> Vec<String> {
        if self.r == self.n {
            return Vec::new();
        }
        let mut notes = Vec::new();
        let spacing = self.outer_spacing();
        if spacing as f64 != self.gamma {
            notes.push(format!(
                "gamma {} snapped to the odd spacing {spacing} between cleared eigenvalues",
                self.gamma
            ));
        }
        let nominal = 0.5 * self.gamma * self.base_gap;
        let first = self.first_outer();
        if (first - nominal).abs() > 1e-12 * nominal {
            notes.push(format!(
                "first cleared eigenvalue placed at {first} instead of gamma*g/2 = {nominal} to keep odd gaps"
            ));
        }
        notes
    }
}

fn smallest_odd_at_least(x: f64) -> u64 {
    let k = (x - 1e-9).ceil().max(1.0) as u64;
    if k % 2 == 0 {
        k + 1
    } else {
        k
    }
}

/// Central `r` eigenvalues at spacing `g` about zero, cleared pairs at `±c_j`.
pub fn trex_spectrum(params: &TRexParams) -> Result<Spectrum> {
    params.validate()?;
    let TRexParams { n, r, base_gap: g, .. } = *params;
    let mut values: Vec<f64> = (0..r)
        .map(|i| 0.5 * (2.0 * i as f64 - (r as f64 - 1.0)) * g)
        .collect();
    let step = params.outer_spacing() as f64 * g;
    let mut c = params.first_outer();
    for _ in 0..(n - r) / 2 {
        values.push(c);
        values.push(-c);
        c += step;
    }
    Spectrum::with_base_gap(values, g)
}

pub fn trex_chain(params: &TRexParams, rescale: bool) -> Result<Design> {
    let spectrum = trex_spectrum(params)?;
    let mut design = Design::from_spectrum(
        spectrum,
        rescale,
        "trex",
        vec![
            ("n".into(), params.n as f64),
            ("r".into(), params.r as f64),
            ("gamma".into(), params.gamma),
            ("g".into(), params.base_gap),
        ],
    )?;
    design.notes = params.snap_notes();
    Ok(design)
}

/// `{±1, ±(1+2γ), ±(1+4γ), …, ±(1+(n-2)γ)}` with base gap 2.
pub fn special_r2_spectrum(n: usize, gamma: f64) -> Result<Spectrum> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::Parity(format!("chain length must be even, got {n}")));
    }
    if !(gamma.is_finite() && gamma > 0.0 && gamma.fract() == 0.0 && gamma % 2.0 == 1.0) {
        return Err(Error::Parity(format!("gamma must be an odd positive integer, got {gamma}")));
    }
    let mut values = Vec::with_capacity(n);
    for k in 0..n / 2 {
        let v = 1.0 + 2.0 * k as f64 * gamma;
        values.push(v);
        values.push(-v);
    }
    Spectrum::with_base_gap(values, 2.0)
}

pub fn special_r2_chain(n: usize, gamma: f64, rescale: bool) -> Result<Design> {
    let spectrum = special_r2_spectrum(n, gamma)?;
    Design::from_spectrum(
        spectrum,
        rescale,
        "r2",
        vec![("n".into(), n as f64), ("gamma".into(), gamma)],
    )
}

/// Three-element estimate of a T-Rex chain: Krawtchouk arms of the length-`r`
/// chain at `J = g/2`, a central Krawtchouk block at `J = gamma g / 2`, and
/// connectors `K` from `K^2 |<1|H_c^{-1}|L>| = r g^2 / 4`.
pub fn trex_approximation(params: &TRexParams) -> Result<ChainSpec> {
    params.validate()?;
    let TRexParams { n, r, gamma, base_gap: g } = *params;
    if r < 4 {
        return Err(Error::InvalidParameter(format!("approximation needs r >= 4, got {r}")));
    }
    let arm_couplings = (r - 2) / 2;
    let block = n - 2 * (arm_couplings + 1);
    if block % 2 == 1 {
        return Err(Error::OddCentralBlock { block });
    }
    if block < 2 {
        return Err(Error::InvalidParameter("no cleared eigenvalues to approximate".into()));
    }
    let arms = krawtchouk(r, 0.5 * g)?;
    let centre = krawtchouk(block, 0.5 * gamma * g)?;
    let k = (r as f64 * g * g / 4.0 / end_to_end_inverse(&centre)?.abs()).sqrt();

    let mut couplings: Vec<f64> = arms.couplings()[..arm_couplings].to_vec();
    couplings.push(k);
    couplings.extend_from_slice(centre.couplings());
    couplings.push(k);
    couplings.extend(arms.couplings()[..arm_couplings].iter().rev());
    Ok(ChainSpec::new(couplings)?.labelled(format!("trex-approx n={n} r={r} gamma={gamma}")))
}

/// `<1|H^{-1}|L>` for a field-free chain of even length `L`, by back
/// substitution: `(-1)^(L/2-1) J_2 J_4 … J_{L-2} / (J_1 J_3 … J_{L-1})`.
pub fn end_to_end_inverse(chain: &ChainSpec) -> Result<f64> {
    let n = chain.n();
    if n % 2 == 1 {
        return Err(Error::OddCentralBlock { block: n });
    }
    if !chain.is_field_free() {
        return Err(Error::InvalidChain("end-to-end inverse requires a field-free chain".into()));
    }
    let j = chain.couplings();
    // x_{L-1} = 1/J_{L-1}; x_{i-2} = -J_{i-1} x_i / J_{i-2}
    let mut x = 1.0 / j[n - 2];
    let mut i = n - 1;
    while i > 1 {
        x = -j[i - 2] * x / j[i - 3];
        i -= 2;
    }
    Ok(x)
}

/// Result of removing the extremal eigenvalue pair.
#[derive(Debug, Clone)]
pub struct Pruned {
    pub chain: ChainSpec,
    /// `J_1^2 - J_1^2 J_2^2 / Gamma` with `Gamma = lambda_max^2 - J_1^2`.
    pub predicted_j1_sq: f64,
}

pub fn prune_extremal_pair(chain: &ChainSpec) -> Result<Pruned> {
    let n = chain.n();
    if n < 4 {
        return Err(Error::InvalidParameter(format!("pruning needs n >= 4, got {n}")));
    }
    if !chain.is_mirror_symmetric() {
        return Err(Error::InvalidChain("pruning needs a mirror-symmetric chain".into()));
    }
    let full = Spectrum::new(eigenvalues(chain)?)?;
    if !full.is_symmetric() {
        return Err(Error::InvalidSpectrum("pruning needs a spectrum symmetric about zero".into()));
    }
    let values = full.values();
    let lambda_max = values[n - 1];
    let remaining = values[1..n - 1].to_vec();
    let reduced = match full.base_gap() {
        Some(g) => Spectrum::with_base_gap(remaining, g)?,
        None => Spectrum::new(remaining)?,
    };
    let (j1, j2) = (chain.couplings()[0], chain.couplings()[1]);
    let gamma = lambda_max * lambda_max - j1 * j1;
    let predicted_j1_sq = j1 * j1 - j1 * j1 * j2 * j2 / gamma;
    let pruned = chain_from_spectrum(&reduced)?.labelled(format!("pruned {}", chain.label()));
    Ok(Pruned {
        chain: pruned,
        predicted_j1_sq,
    })
}
