//! JSON chain and spectrum files, CSV tables.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::bounds::TradeoffPoint;
use crate::chain::ChainSpec;
use crate::dynamics::EvolutionTrace;
use crate::error::{Error, Result};
use crate::robustness::PerturbationReport;
use crate::spectrum::Spectrum;
use crate::synthesis::Design;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub generator: String,
    #[serde(default)]
    pub parameters: BTreeMap<String, f64>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

/// On-disk form of a chain. Floats are written in shortest round-trip form,
/// so parsing returns bit-identical values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainFile {
    pub format_version: u32,
    pub n: usize,
    pub couplings: Vec<f64>,
    pub diagonal: Vec<f64>,
    #[serde(default)]
    pub label: String,
    #[serde(default)]
    pub provenance: Provenance,
}

impl ChainFile {
    pub fn from_chain(chain: &ChainSpec, provenance: Provenance) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            n: chain.n(),
            couplings: chain.couplings().to_vec(),
            diagonal: chain.diagonal().to_vec(),
            label: chain.label().to_string(),
            provenance,
        }
    }

    pub fn from_design(design: &Design) -> Self {
        let mut parameters: BTreeMap<String, f64> = design.parameters.iter().cloned().collect();
        if design.is_rescaled() {
            parameters.insert("scale".into(), design.scale);
        }
        parameters.insert("t0".into(), design.t0);
        Self::from_chain(
            &design.chain,
            Provenance {
                generator: design.generator.clone(),
                parameters,
                warnings: design.notes.clone(),
            },
        )
    }

    pub fn to_chain(&self) -> Result<ChainSpec> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::InvalidChain(format!(
                "unsupported format version {}",
                self.format_version
            )));
        }
        if self.couplings.len() + 1 != self.n {
            return Err(Error::InvalidChain(format!(
                "n = {} but {} couplings given",
                self.n,
                self.couplings.len()
            )));
        }
        Ok(ChainSpec::with_diagonal(self.couplings.clone(), self.diagonal.clone())?.labelled(self.label.clone()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("chain files always serialize") + "\n"
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(parse_error)
    }
}

fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

/// Parse and validate a chain file.
pub fn parse_chain(text: &str) -> Result<(ChainSpec, ChainFile)> {
    let file = ChainFile::parse(text)?;
    Ok((file.to_chain()?, file))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumFile {
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_gap: Option<f64>,
}

impl SpectrumFile {
    pub fn from_spectrum(s: &Spectrum) -> Self {
        Self {
            values: s.values().to_vec(),
            base_gap: s.base_gap(),
        }
    }

    pub fn to_spectrum(&self) -> Result<Spectrum> {
        match self.base_gap {
            Some(g) => Spectrum::with_base_gap(self.values.clone(), g),
            None => Spectrum::new(self.values.clone()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spectrum files always serialize") + "\n"
    }
}

pub fn parse_spectrum(text: &str) -> Result<Spectrum> {
    serde_json::from_str::<SpectrumFile>(text)
        .map_err(parse_error)?
        .to_spectrum()
}

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub const TRACE_HEADER: &str = "t,re_amp,im_amp,fe,f";
pub const SWEEP_HEADER: &str = "gamma,t0,j1,j1_t0";
pub const PERTURB_HEADER: &str = "delta,chain_label,q25,q50,q75,mean,samples,resampled";

pub fn write_trace_csv<W: Write>(mut w: W, trace: &EvolutionTrace) -> std::io::Result<()> {
    writeln!(w, "{TRACE_HEADER}")?;
    for i in 0..trace.len() {
        writeln!(
            w,
            "{},{},{},{},{}",
            fmt_f64(trace.times[i]),
            fmt_f64(trace.amplitudes[i].re),
            fmt_f64(trace.amplitudes[i].im),
            fmt_f64(trace.fe[i]),
            fmt_f64(trace.f[i])
        )?;
    }
    Ok(())
}

pub fn write_sweep_csv<W: Write>(mut w: W, points: &[TradeoffPoint]) -> std::io::Result<()> {
    writeln!(w, "{SWEEP_HEADER}")?;
    for p in points {
        writeln!(
            w,
            "{},{},{},{}",
            fmt_f64(p.gamma),
            fmt_f64(p.t0),
            fmt_f64(p.j1),
            fmt_f64(p.j1_t0)
        )?;
    }
    Ok(())
}

pub fn write_perturb_csv<W: Write>(mut w: W, reports: &[PerturbationReport]) -> std::io::Result<()> {
    writeln!(w, "{PERTURB_HEADER}")?;
    for r in reports {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            fmt_f64(r.delta),
            csv_field(&r.label),
            fmt_f64(r.q25),
            fmt_f64(r.q50),
            fmt_f64(r.q75),
            fmt_f64(r.mean),
            r.samples,
            r.resampled
        )?;
    }
    Ok(())
}
