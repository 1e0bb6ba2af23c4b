use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use pst_core::bounds::{anandan_envelope_check, mandelstam_tamm_time, tradeoff_sweep, Parity, THEOREM_MIN_SITES};
use pst_core::dynamics::{arrival_width, expected_fidelity, trace, windowed_transfer};
use pst_core::encoding::{
    encoded_arrival_width, encoded_trace, eigenvector_orthogonal_encoding, optimal_timing_encoding, EncodingPair,
};
use pst_core::io::{parse_chain, parse_spectrum, write_perturb_csv, write_sweep_csv, write_trace_csv, ChainFile, Provenance};
use pst_core::revival::{central_coupling_revival, spectral_shift_revival};
use pst_core::robustness::{perturb_ensemble, RegionRule};
use pst_core::synthesis::{
    krawtchouk_design, prune_extremal_pair, special_r2_chain, trex_approximation, trex_chain, Design,
};
use pst_core::{chain_from_spectrum, pst_check, ChainSpec, Error, ReceiverWindow, Spectrum, TRexParams};
use serde_json::json;

use crate::{Bounds, Command, Method, Output, Revival, Synth, TrexArgs, WindowKind};

/// 3 for numerical failures, 2 for everything else.
pub fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(err) if err.is_numerical() => 3,
        _ => 2,
    }
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Synth(s) => synth(s),
        Command::Check(a) => match (a.chain, a.spectrum) {
            (Some(path), _) => check_chain(&path),
            (None, Some(path)) => check_spectrum(&path),
            (None, None) => Err(anyhow!("one of --chain or --spectrum is required")),
        },
        Command::Evolve(a) => {
            let chain = read_chain(&a.chain)?;
            let tr = match a.encode {
                None => trace(&chain, a.t_max, a.steps)?,
                Some(m) => encoded_trace(&chain, &encoding(&chain, m, a.method)?, a.t_max, a.steps)?,
            };
            let mut buf = Vec::new();
            write_trace_csv(&mut buf, &tr)?;
            emit(&a.out.out, &buf)
        }
        Command::Window(a) => {
            let chain = read_chain(&a.chain)?;
            let t0 = match a.t0 {
                Some(t) => t,
                None => transfer_time(&chain)?,
            };
            let window = make_window(a.kind, a.width, a.table.as_deref())?;
            let value = json!({
                "t0": t0,
                "windowed_transfer": windowed_transfer(&chain, &window, t0)?,
                "expected_fidelity": expected_fidelity(&chain, &window, t0)?,
            });
            emit_json(&a.out.out, &value)
        }
        Command::Bounds(Bounds::Sweep { n, r, gammas, out }) => {
            let sweep = tradeoff_sweep(n, r, &gammas);
            for (g, e) in &sweep.skipped {
                eprintln!("warning: gamma {g} skipped: {e}");
            }
            let mut buf = Vec::new();
            write_sweep_csv(&mut buf, &sweep.points)?;
            emit(&out.out, &buf)
        }
        Command::Bounds(Bounds::Check { chain, steps }) => {
            let chain = read_chain(&chain)?;
            let t0 = transfer_time(&chain)?;
            let mt = mandelstam_tamm_time(&chain);
            let tr = trace(&chain, mt, steps)?;
            let bound = Parity::of(chain.n()).theorem_bound(t0);
            let value = json!({
                "t0": t0,
                "j1": chain.j1(),
                "j1_t0": chain.j1() * t0,
                "mandelstam_tamm_time": mt,
                "anandan_violation": anandan_envelope_check(&chain, &tr),
                "theorem_min_j1": bound,
                "theorem_holds": (chain.n() >= THEOREM_MIN_SITES).then(|| chain.j1() >= bound * (1.0 - 1e-9)),
            });
            emit_json(&None, &value)
        }
        Command::Prune(a) => {
            let chain = read_chain(&a.chain)?;
            let pruned = prune_extremal_pair(&chain)?;
            eprintln!(
                "predicted J1^2 = {:.16e}, resynthesized J1^2 = {:.16e}",
                pruned.predicted_j1_sq,
                pruned.chain.j1().powi(2)
            );
            let prov = Provenance {
                generator: "prune".into(),
                parameters: [("predicted_j1_sq".to_string(), pruned.predicted_j1_sq)].into(),
                warnings: Vec::new(),
            };
            write_chain(&a.out, &pruned.chain, prov)
        }
        Command::Revival(Revival::Central { chain, theta, out }) => {
            let chain = read_chain(&chain)?;
            let r = central_coupling_revival(&chain, theta)?;
            for w in &r.warnings {
                eprintln!("warning: {w}");
            }
            let prov = Provenance {
                generator: "revival-central".into(),
                parameters: [("theta".to_string(), r.theta)].into(),
                warnings: r.warnings.clone(),
            };
            write_chain(&out, &r.chain, prov)
        }
        Command::Revival(Revival::Shift { spectrum, phi, out }) => {
            let spectrum = read_spectrum(&spectrum)?;
            let chain = spectral_shift_revival(&spectrum, phi)?;
            let mut parameters = std::collections::BTreeMap::new();
            parameters.insert("phi".to_string(), phi);
            if let Some(t0) = spectrum.transfer_time() {
                parameters.insert("t0".to_string(), t0);
            }
            let prov = Provenance {
                generator: "revival-shift".into(),
                parameters,
                warnings: Vec::new(),
            };
            write_chain(&out, &chain, prov)
        }
        Command::Encode(a) => {
            let chain = read_chain(&a.chain)?;
            let t0 = transfer_time(&chain)?;
            let pair = encoding(&chain, a.m, a.method)?;
            let width = encoded_arrival_width(&chain, &pair, t0, a.epsilon)?;
            let plain = arrival_width(&chain, t0, a.epsilon)?;
            let value = json!({
                "m": pair.region_size,
                "objective": pair.objective,
                "arrival_width": width,
                "unencoded_arrival_width": plain,
                "encoder": pair.encoder[..pair.region_size].iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
            });
            emit_json(&a.out.out, &value)
        }
        Command::Perturb(a) => {
            let region = match (a.central, a.range.as_deref()) {
                (Some(c), _) => RegionRule::Central(c),
                (None, Some(r)) => parse_range(r)?,
                (None, None) => RegionRule::All,
            };
            let mut reports = Vec::new();
            for path in &a.chain {
                let chain = read_chain(path)?;
                let t0 = match a.t0 {
                    Some(t) => t,
                    None => transfer_time(&chain)?,
                };
                for &d in &a.deltas {
                    reports.push(perturb_ensemble(&chain, t0, d, region, a.samples, a.seed)?);
                }
            }
            reports.sort_by(|x, y| x.delta.total_cmp(&y.delta));
            let mut buf = Vec::new();
            write_perturb_csv(&mut buf, &reports)?;
            emit(&a.out.out, &buf)
        }
    }
}

fn synth(s: Synth) -> Result<()> {
    match s {
        Synth::Krawtchouk { n, j, rescale, out } => write_design(&out, &krawtchouk_design(n, j, rescale)?),
        Synth::Trex { params, rescale, out } => write_design(&out, &trex_chain(&trex_params(&params), rescale)?),
        Synth::TrexApprox { params, out } => {
            let p = trex_params(&params);
            let chain = trex_approximation(&p)?;
            let prov = Provenance {
                generator: "trex-approx".into(),
                parameters: [
                    ("n".to_string(), p.n as f64),
                    ("r".to_string(), p.r as f64),
                    ("gamma".to_string(), p.gamma),
                    ("g".to_string(), p.base_gap),
                ]
                .into(),
                warnings: Vec::new(),
            };
            write_chain(&out, &chain, prov)
        }
        Synth::R2 { n, gamma, rescale, out } => write_design(&out, &special_r2_chain(n, gamma, rescale)?),
        Synth::FromSpectrum { spectrum, rescale, out } => {
            let spectrum = read_spectrum(&spectrum)?;
            let mut chain = chain_from_spectrum(&spectrum)?.labelled("from-spectrum");
            let mut parameters = std::collections::BTreeMap::new();
            let mut t0 = spectrum.transfer_time();
            if rescale {
                let jmax = chain.max_coupling();
                chain = chain.scaled(1.0 / jmax)?;
                t0 = t0.map(|t| t * jmax);
                parameters.insert("scale".to_string(), jmax);
            }
            if let Some(t) = t0 {
                parameters.insert("t0".to_string(), t);
            }
            let prov = Provenance {
                generator: "from-spectrum".into(),
                parameters,
                warnings: Vec::new(),
            };
            write_chain(&out, &chain, prov)
        }
    }
}

fn trex_params(a: &TrexArgs) -> TRexParams {
    TRexParams::new(a.n, a.r, a.gamma).with_base_gap(a.g)
}

fn encoding(chain: &ChainSpec, m: usize, method: Method) -> Result<EncodingPair> {
    Ok(match method {
        Method::Optimal => optimal_timing_encoding(chain, m)?,
        Method::Orthogonal => eigenvector_orthogonal_encoding(chain, m)?,
    })
}

fn check_chain(path: &Path) -> Result<()> {
    let chain = read_chain(path)?;
    let v = pst_check(&chain)?;
    let value = json!({
        "n": chain.n(),
        "is_mirror_symmetric": v.is_mirror_symmetric,
        "has_odd_gap_spectrum": v.has_odd_gap_spectrum,
        "base_gap": v.base_gap,
        "t0": v.t0,
        "phase": v.phase.map(|z| [z.re, z.im]),
        "pst": v.is_pst(),
    });
    emit_json(&None, &value)
}

fn check_spectrum(path: &Path) -> Result<()> {
    let s = read_spectrum(path)?;
    let value = json!({
        "n": s.len(),
        "symmetric": s.is_symmetric(),
        "base_gap": s.base_gap(),
        "t0": s.transfer_time(),
        "valid": s.base_gap().is_some(),
    });
    emit_json(&None, &value)
}

fn transfer_time(chain: &ChainSpec) -> Result<f64> {
    pst_check(chain)?
        .t0
        .ok_or_else(|| anyhow!(Error::InvalidChain("chain has no perfect transfer time".into())))
}

fn make_window(kind: WindowKind, width: Option<f64>, table: Option<&Path>) -> Result<ReceiverWindow> {
    let need = || width.ok_or_else(|| anyhow!(Error::InvalidParameter("--width is required".into())));
    Ok(match kind {
        WindowKind::Delta => ReceiverWindow::Delta,
        WindowKind::Box => ReceiverWindow::boxcar(need()?)?,
        WindowKind::Gaussian => ReceiverWindow::gaussian(need()?)?,
        WindowKind::Tabulated => {
            let path = table.ok_or_else(|| anyhow!(Error::InvalidParameter("--table is required".into())))?;
            let text = read_text(path)?;
            let mut offsets = Vec::new();
            let mut density = Vec::new();
            for (i, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') || line.starts_with("offset") {
                    continue;
                }
                let mut cols = line.split(',').map(|c| c.trim().parse::<f64>());
                match (cols.next(), cols.next()) {
                    (Some(Ok(t)), Some(Ok(p))) => {
                        offsets.push(t);
                        density.push(p);
                    }
                    _ => {
                        return Err(anyhow!(Error::Parse {
                            line: i + 1,
                            column: 1,
                            message: format!("expected `offset,density`, got `{line}`"),
                        }))
                    }
                }
            }
            ReceiverWindow::tabulated(offsets, density)?
        }
    })
}

fn parse_range(s: &str) -> Result<RegionRule> {
    let bad = || anyhow!(Error::InvalidParameter(format!("range must look like start..end, got `{s}`")));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    Ok(RegionRule::Range {
        start: a.trim().parse().map_err(|_| bad())?,
        end: b.trim().parse().map_err(|_| bad())?,
    })
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_chain(path: &Path) -> Result<ChainSpec> {
    let text = read_text(path)?;
    let (chain, _) = parse_chain(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(chain)
}

fn read_spectrum(path: &Path) -> Result<Spectrum> {
    let text = read_text(path)?;
    parse_spectrum(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_design(out: &Output, design: &Design) -> Result<()> {
    for note in &design.notes {
        eprintln!("warning: {note}");
    }
    emit(&out.out, ChainFile::from_design(design).to_json().as_bytes())
}

fn write_chain(out: &Output, chain: &ChainSpec, prov: Provenance) -> Result<()> {
    emit(&out.out, ChainFile::from_chain(chain, prov).to_json().as_bytes())
}

fn emit_json(out: &Option<PathBuf>, value: &serde_json::Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    emit(out, text.as_bytes())
}

fn emit(out: &Option<PathBuf>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => fs::write(path, bytes).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}
