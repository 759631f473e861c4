//! Vanishing-Hall convergence study: integrate the Hall system for a ladder
//! of Hall coefficients against the η = 0 baseline under identical
//! discretization and initial data, record the sup-in-time squared L²
//! difference per η, and fit its log-log slope in η.
//!
//! The squared difference `sup_t(‖u^η - u‖₂² + ‖b^η - b‖₂²)` scales as η²
//! for smooth data, so the fitted slope is expected near 2 (the un-squared
//! norm difference is first order in η; both slopes are reported to preempt
//! misreading).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::solver::{make_initial, run, SolverConfig, State};

/// Configuration of a convergence sweep.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    /// Run parameters shared by every member; its `eta` is ignored.
    pub base: SolverConfig,
    /// Hall coefficients, strictly positive, listed in descending order,
    /// spanning at least one decade; at least three values.
    pub etas: Vec<f64>,
    /// Sampling stride (in steps) for the trajectory differences.
    pub diff_stride: usize,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<Vec<String>> {
        let warnings = self.base.validate()?;
        if self.etas.len() < 3 {
            return Err(Error::InvalidParameter(format!(
                "a sweep needs at least 3 Hall coefficients, got {}",
                self.etas.len()
            )));
        }
        if self.etas.iter().any(|&e| !(e > 0.0)) {
            return Err(Error::InvalidParameter(
                "sweep Hall coefficients must be strictly positive".into(),
            ));
        }
        if self.etas.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::InvalidParameter(
                "sweep Hall coefficients must be strictly descending".into(),
            ));
        }
        let span = self.etas.first().unwrap() / self.etas.last().unwrap();
        if span < 10.0 {
            return Err(Error::InvalidParameter(format!(
                "sweep Hall coefficients must span at least one decade, got ratio {span}"
            )));
        }
        if self.diff_stride == 0 {
            return Err(Error::InvalidParameter("diff_stride must be >= 1".into()));
        }
        Ok(warnings)
    }
}

/// One sweep member's outcome.
#[derive(Debug, Clone, Serialize)]
pub struct EtaDifference {
    pub eta: f64,
    /// `sup_t (‖u^η - u‖₂² + ‖b^η - b‖₂²)` over the sampled times.
    pub sup_diff_sq: f64,
}

/// Full sweep result. `aborted_eta` carries the member that failed, if any;
/// the rows collected before the failure are retained.
#[derive(Debug)]
pub struct SweepResult {
    pub rows: Vec<EtaDifference>,
    /// Slope of `log sup_diff_sq` against `log η`.
    pub fitted_slope: f64,
    /// Coefficient of determination of that fit.
    pub fit_r2: f64,
    pub aborted_eta: Option<(f64, Error)>,
}

impl SweepResult {
    /// The slope for the un-squared L² difference (half the squared slope).
    pub fn unsquared_slope(&self) -> f64 {
        self.fitted_slope / 2.0
    }
}

/// Runs the sweep: one η = 0 reference, then one run per η, all from the
/// same initial state with the same dt and grid; differences are sampled
/// every `diff_stride` steps (plus start and end).
pub fn convergence_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let grid = cfg.base.grid();
    let initial = make_initial(cfg.base.initial_kind, grid, cfg.base.seed, cfg.base.s)?;

    let reference_cfg = SolverConfig {
        eta: 0.0,
        diag_stride: cfg.diff_stride,
        ..cfg.base.clone()
    };
    let reference = run(initial.clone(), &reference_cfg, |_| Ok(()))?;
    if let Some(failure) = reference.failure {
        return Ok(SweepResult {
            rows: Vec::new(),
            fitted_slope: f64::NAN,
            fit_r2: f64::NAN,
            aborted_eta: Some((0.0, take_error(failure))),
        });
    }

    let mut rows = Vec::new();
    for &eta in &cfg.etas {
        let member_cfg = SolverConfig {
            eta,
            diag_stride: cfg.diff_stride,
            ..cfg.base.clone()
        };
        let mut sup_diff_sq = 0.0f64;
        let mut sample_idx = 0usize;
        let outcome = run(initial.clone(), &member_cfg, |state: &State| {
            let reference_state = reference.samples.get(sample_idx).ok_or_else(|| {
                Error::NumericalFault("reference trajectory has fewer samples".into())
            })?;
            debug_assert!((reference_state.t - state.t).abs() < 1e-12);
            let du = state.u.difference(&reference_state.u).l2_norm();
            let db = state.b.difference(&reference_state.b).l2_norm();
            sup_diff_sq = sup_diff_sq.max(du * du + db * db);
            sample_idx += 1;
            Ok(())
        })?;
        if let Some(failure) = outcome.failure {
            return Ok(SweepResult {
                fitted_slope: f64::NAN,
                fit_r2: f64::NAN,
                rows,
                aborted_eta: Some((eta, take_error(failure))),
            });
        }
        rows.push(EtaDifference { eta, sup_diff_sq });
    }

    rows.sort_by(|a, b| a.eta.total_cmp(&b.eta));
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.sup_diff_sq > 0.0)
        .map(|r| (r.eta.ln(), r.sup_diff_sq.ln()))
        .collect();
    let (fitted_slope, fit_r2) = fit_line(&pts);
    Ok(SweepResult {
        rows,
        fitted_slope,
        fit_r2,
        aborted_eta: None,
    })
}

fn take_error(failure: crate::solver::RunFailure) -> Error {
    match failure {
        crate::solver::RunFailure::Cfl(e)
        | crate::solver::RunFailure::Blowup(e)
        | crate::solver::RunFailure::Fault(e) => e,
    }
}

/// Least-squares slope and r² of `y` against `x`.
pub fn fit_line(points: &[(f64, f64)]) -> (f64, f64) {
    if points.len() < 2 {
        return (f64::NAN, f64::NAN);
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 {
        (sxy * sxy) / (sxx * syy)
    } else {
        1.0
    };
    (slope, r2)
}
