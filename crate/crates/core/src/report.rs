//! Machine-readable outputs: NDJSON diagnostics records and CSV tables.
//!
//! Float formatting rule: CSV cells use 17 significant digits in scientific
//! notation (`{:.16e}`), enough to round-trip any f64; NDJSON uses
//! serde_json's shortest round-trip representation. Both are deterministic,
//! so identical runs produce byte-identical files.

use std::io::Write;

use serde::Serialize;

use crate::diagnostics::{CancellationReport, EnergyBudget, ShellSpectrumRow};
use crate::error::Result;
use crate::littlewood_paley::CommutatorProbeResult;
use crate::solver::State;

/// 17-significant-digit scientific formatting for CSV cells.
pub fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// One NDJSON diagnostics record: time, energies, shell spectra, and the
/// full budget evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct DiagRecord {
    pub t: f64,
    pub energy_u: f64,
    pub energy_b: f64,
    /// Shell-weighted energies `λ_q^{2s}‖u_q‖²` for q = -1.., then the same
    /// for b.
    pub shell_u: Vec<f64>,
    pub shell_b: Vec<f64>,
    pub budget: EnergyBudget,
}

impl DiagRecord {
    pub fn new(state: &State, spectrum: &[ShellSpectrumRow], budget: EnergyBudget) -> Self {
        DiagRecord {
            t: state.t,
            energy_u: 0.5 * state.u.l2_norm().powi(2),
            energy_b: 0.5 * state.b.l2_norm().powi(2),
            shell_u: spectrum.iter().map(|r| r.u_energy).collect(),
            shell_b: spectrum.iter().map(|r| r.b_energy).collect(),
            budget,
        }
    }
}

/// Writes one value as an NDJSON line.
pub fn write_ndjson_line(sink: &mut impl Write, value: &impl Serialize) -> Result<()> {
    serde_json::to_writer(&mut *sink, value)
        .map_err(|e| crate::error::Error::Io(std::io::Error::other(e)))?;
    sink.write_all(b"\n")?;
    Ok(())
}

/// CSV of per-shell weighted energies: `q,u_energy,b_energy`.
pub fn write_spectrum_csv(sink: &mut impl Write, rows: &[ShellSpectrumRow]) -> Result<()> {
    writeln!(sink, "q,u_energy,b_energy")?;
    for row in rows {
        writeln!(
            sink,
            "{},{},{}",
            row.q,
            fmt_float(row.u_energy),
            fmt_float(row.b_energy)
        )?;
    }
    Ok(())
}

/// CSV of cancellation residual series:
/// `t,s,transport_residual,cross_residual,exchange_residual`.
pub fn write_cancellation_csv(sink: &mut impl Write, rows: &[CancellationReport]) -> Result<()> {
    writeln!(
        sink,
        "t,s,transport_residual,cross_residual,exchange_residual"
    )?;
    for r in rows {
        writeln!(
            sink,
            "{},{},{},{},{}",
            fmt_float(r.t),
            fmt_float(r.s),
            fmt_float(r.transport_residual),
            fmt_float(r.cross_residual),
            fmt_float(r.exchange_residual)
        )?;
    }
    Ok(())
}

/// One row of the lemma-probe export.
#[derive(Debug, Clone)]
pub struct ProbeRow {
    /// Which bound was probed (e.g. "transport_commutator", "bernstein").
    pub lemma: &'static str,
    pub q: i32,
    pub p: i32,
    pub seed: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

impl ProbeRow {
    pub fn from_probe(lemma: &'static str, seed: u64, probe: &CommutatorProbeResult) -> Self {
        ProbeRow {
            lemma,
            q: probe.q,
            p: probe.p,
            seed,
            lhs: probe.norm_lhs,
            rhs: probe.bound_rhs,
            ratio: probe.ratio,
        }
    }
}

/// CSV of probe rows: `lemma,q,p,seed,lhs,rhs,ratio`.
pub fn write_probe_csv(sink: &mut impl Write, rows: &[ProbeRow]) -> Result<()> {
    writeln!(sink, "lemma,q,p,seed,lhs,rhs,ratio")?;
    for r in rows {
        writeln!(
            sink,
            "{},{},{},{},{},{},{}",
            r.lemma,
            r.q,
            r.p,
            r.seed,
            fmt_float(r.lhs),
            fmt_float(r.rhs),
            fmt_float(r.ratio)
        )?;
    }
    Ok(())
}

/// CSV of a sampled growth curve: `t,x`.
pub fn write_curve_csv(sink: &mut impl Write, curve: &[(f64, f64)]) -> Result<()> {
    writeln!(sink, "t,x")?;
    for &(t, x) in curve {
        writeln!(sink, "{},{}", fmt_float(t), fmt_float(x))?;
    }
    Ok(())
}

/// CSV of sweep rows: `eta,sup_diff_sq`.
pub fn write_sweep_csv(sink: &mut impl Write, rows: &[crate::sweep::EtaDifference]) -> Result<()> {
    writeln!(sink, "eta,sup_diff_sq")?;
    for r in rows {
        writeln!(sink, "{},{}", fmt_float(r.eta), fmt_float(r.sup_diff_sq))?;
    }
    Ok(())
}

/// JSON summary of a sweep: slope, r², and the per-η differences.
#[derive(Debug, Serialize)]
pub struct SweepSummary {
    pub slope: f64,
    pub unsquared_slope: f64,
    pub r2: f64,
    pub etas: Vec<f64>,
    pub diffs: Vec<f64>,
    pub aborted_eta: Option<f64>,
}

impl SweepSummary {
    pub fn from_result(result: &crate::sweep::SweepResult) -> Self {
        SweepSummary {
            slope: result.fitted_slope,
            unsquared_slope: result.unsquared_slope(),
            r2: result.fit_r2,
            etas: result.rows.iter().map(|r| r.eta).collect(),
            diffs: result.rows.iter().map(|r| r.sup_diff_sq).collect(),
            aborted_eta: result.aborted_eta.as_ref().map(|(eta, _)| *eta),
        }
    }
}
