//! Riccati-type growth model `X' = C₁X^{γ₁} + C₂X^{γ₂}` and the
//! existence-horizon estimate derived from it.
//!
//! With superlinear exponents the solution blows up in finite time; the
//! guaranteed horizon is operationalized conservatively as the time at which
//! `X` doubles. For `C₂ = 0` the model has the closed form
//! `X(t) = (X₀^{1-γ} - C(γ-1)t)^{1/(1-γ)}`, used as the oracle for the
//! adaptive integrator.

use serde::Serialize;

use crate::diagnostics::{energy_budget, shell_energy_sum};
use crate::error::{Error, Result};
use crate::solver::{SolverConfig, State, Trajectory};

/// Coefficients of the two-term growth model.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RiccatiParams {
    /// First coefficient (> 0).
    pub c1: f64,
    /// Second coefficient (≥ 0).
    pub c2: f64,
    /// First exponent (> 1).
    pub gamma1: f64,
    /// Second exponent (> 1).
    pub gamma2: f64,
    /// Initial value `X₀ = Σ_q λ_q^{2s}(‖u_q‖² + ‖b_q‖²)`.
    pub x0: f64,
}

impl RiccatiParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.c1.is_finite()
            && self.c2.is_finite()
            && self.gamma1.is_finite()
            && self.gamma2.is_finite()
            && self.x0.is_finite()
            && self.c1 > 0.0
            && self.c2 >= 0.0
            && self.gamma1 > 1.0
            && self.gamma2 > 1.0
            && self.x0 >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "Riccati parameters need c1 > 0, c2 >= 0, gamma > 1, finite x0; got {self:?}"
            )))
        }
    }

    fn slope(&self, x: f64) -> f64 {
        self.c1 * x.powf(self.gamma1) + self.c2 * x.powf(self.gamma2)
    }
}

/// Closed-form solution for `C₂ = 0`.
pub fn closed_form_single_term(c1: f64, gamma1: f64, x0: f64, t: f64) -> f64 {
    let base = x0.powf(1.0 - gamma1) - c1 * (gamma1 - 1.0) * t;
    base.powf(1.0 / (1.0 - gamma1))
}

/// Closed-form doubling time for `C₂ = 0`.
pub fn closed_form_doubling_time(c1: f64, gamma1: f64, x0: f64) -> f64 {
    x0.powf(1.0 - gamma1) * (1.0 - (2.0f64).powf(1.0 - gamma1)) / (c1 * (gamma1 - 1.0))
}

/// Output of [`riccati_time`]: the doubling horizon and the sampled curve.
#[derive(Debug, Clone)]
pub struct RiccatiSolution {
    /// Time at which `X` reaches `2X₀` (infinite for `X₀ = 0`).
    pub t_guaranteed: f64,
    /// Sampled `(t, X)` pairs from `t = 0` to the doubling time.
    pub curve: Vec<(f64, f64)>,
}

/// Integrates the growth model with adaptive RK4 (step doubling) until `X`
/// reaches `2X₀`, locating the crossing by bisection.
///
/// A zero initial value never doubles: the horizon is reported as `+∞` with
/// a trivial curve.
pub fn riccati_time(params: &RiccatiParams) -> Result<RiccatiSolution> {
    params.validate()?;
    if params.x0 == 0.0 {
        return Ok(RiccatiSolution {
            t_guaranteed: f64::INFINITY,
            curve: Vec::new(),
        });
    }
    let target = 2.0 * params.x0;

    // Scale-free initial step from the local slope.
    let mut dt = 0.01 * params.x0 / params.slope(params.x0);
    let mut t = 0.0;
    let mut x = params.x0;
    let mut curve = vec![(0.0, params.x0)];
    let rel_tol = 1e-12;

    let rk4 = |x: f64, h: f64, p: &RiccatiParams| -> f64 {
        let k1 = p.slope(x);
        let k2 = p.slope(x + 0.5 * h * k1);
        let k3 = p.slope(x + 0.5 * h * k2);
        let k4 = p.slope(x + h * k3);
        x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    };

    let max_iters = 2_000_000;
    for _ in 0..max_iters {
        // Step doubling: one full step vs two half steps.
        let full = rk4(x, dt, params);
        let half = rk4(rk4(x, dt / 2.0, params), dt / 2.0, params);
        let err = (full - half).abs() / half.abs().max(f64::MIN_POSITIVE);
        if err > rel_tol {
            dt *= 0.5;
            continue;
        }
        if half >= target {
            // Bisect inside [t, t + dt] for the crossing.
            let mut lo = 0.0;
            let mut hi = dt;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let xm = rk4(rk4(x, mid / 2.0, params), mid / 2.0, params);
                if xm >= target {
                    hi = mid;
                } else {
                    lo = mid;
                }
                if (hi - lo) <= 1e-15 * (t + hi).max(1e-300) {
                    break;
                }
            }
            let t_cross = t + 0.5 * (lo + hi);
            curve.push((t_cross, target));
            return Ok(RiccatiSolution {
                t_guaranteed: t_cross,
                curve,
            });
        }
        t += dt;
        x = half;
        curve.push((t, x));
        if err < rel_tol / 32.0 {
            dt *= 1.5;
        }
        // Do not overshoot the doubling target by a large factor.
        let remaining = (target - x).max(0.0);
        let slope = params.slope(x);
        if slope > 0.0 {
            dt = dt.min(1.2 * remaining / slope + 1e-18 * t.max(1e-12));
        }
    }
    Err(Error::NumericalFault(
        "Riccati integration did not reach the doubling target".into(),
    ))
}

/// Summary of fitting the growth model to an observed trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct RiccatiFit {
    pub params: RiccatiParams,
    /// Number of samples with positive growth used in the regression.
    pub samples_used: usize,
    /// Observed doubling time of X along the run (infinite if it never
    /// doubled).
    pub observed_doubling_time: f64,
}

/// Fits growth-model parameters from a simulated trajectory.
///
/// For each sampled state the majorized growth rate
/// `Y = dX/dt + 2(diss_u_exact + diss_b_exact) = 2 Σ flux` is evaluated from
/// the budget, so the fitted model provably majorizes the observed rate at
/// the samples. The exponent comes from a log-log regression of `Y` on `X`
/// over samples with `Y > 0`, clamped to > 1 (the superlinear regime the
/// model assumes) and split evenly across the two terms; the coefficient is
/// the envelope `max Y/(2X^γ)`, making the fitted curve an upper bound at
/// every sample and the doubling horizon a conservative estimate.
pub fn fit_riccati_params(
    trajectory: &Trajectory,
    config: &SolverConfig,
    s: f64,
) -> Result<RiccatiFit> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut x_series = Vec::new();
    for state in &trajectory.samples {
        let x = shell_energy_sum(state, s);
        let budget = energy_budget(state, config, s)?;
        // dX/dt = 2·ddt_shell_energy; Y = dX/dt + 2·diss_exact = 2·Σ flux.
        let y = 2.0 * (budget.ddt_shell_energy + budget.diss_u_exact + budget.diss_b_exact);
        x_series.push((state.t, x));
        if x > 0.0 && y > 0.0 {
            xs.push(x.ln());
            ys.push(y.ln());
        }
    }

    let x0 = x_series.first().map(|&(_, x)| x).unwrap_or(0.0);
    let observed_doubling_time = x_series
        .iter()
        .find(|&&(_, x)| x >= 2.0 * x0 && x0 > 0.0)
        .map(|&(t, _)| t)
        .unwrap_or(f64::INFINITY);

    let gamma = if xs.len() >= 2 {
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        if sxx > 0.0 {
            (sxy / sxx).max(1.05)
        } else {
            2.0
        }
    } else {
        2.0
    };

    let mut c = f64::MIN_POSITIVE;
    for (x_ln, y_ln) in xs.iter().zip(&ys) {
        let x = x_ln.exp();
        let y = y_ln.exp();
        let denom = 2.0 * x.powf(gamma);
        if denom > 0.0 {
            c = c.max(y / denom);
        }
    }
    let c = c.max(1e-12);

    let params = RiccatiParams {
        c1: c,
        c2: c,
        gamma1: gamma,
        gamma2: gamma,
        x0,
    };
    Ok(RiccatiFit {
        params,
        samples_used: xs.len(),
        observed_doubling_time,
    })
}

/// Guaranteed existence horizon for `state0` under the fitted growth model:
/// reads `X₀` off the state and delegates to [`riccati_time`].
pub fn existence_time_estimate(
    state0: &State,
    _config: &SolverConfig,
    s: f64,
    fitted: &RiccatiParams,
) -> Result<f64> {
    let x0 = shell_energy_sum(state0, s);
    let params = RiccatiParams { x0, ..*fitted };
    Ok(riccati_time(&params)?.t_guaranteed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_example() {
        // C₂ = 0, γ = 2, C₁ = 1, X₀ = 1: X(t) = 1/(1-t), doubling at t = 1/2.
        let p = RiccatiParams {
            c1: 1.0,
            c2: 0.0,
            gamma1: 2.0,
            gamma2: 2.0,
            x0: 1.0,
        };
        let sol = riccati_time(&p).unwrap();
        assert!(
            (sol.t_guaranteed - 0.5).abs() < 1e-9,
            "{}",
            sol.t_guaranteed
        );
        assert!((closed_form_single_term(1.0, 2.0, 1.0, 0.25) - 4.0 / 3.0).abs() < 1e-12);
        assert!((closed_form_doubling_time(1.0, 2.0, 1.0) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn merged_terms_equal_doubled_coefficient() {
        // C₁ = C₂ = c with γ₁ = γ₂ behaves as a single term with 2c.
        let two_term = RiccatiParams {
            c1: 0.7,
            c2: 0.7,
            gamma1: 1.8,
            gamma2: 1.8,
            x0: 3.0,
        };
        let merged = RiccatiParams {
            c1: 1.4,
            c2: 0.0,
            gamma1: 1.8,
            gamma2: 1.8,
            x0: 3.0,
        };
        let a = riccati_time(&two_term).unwrap().t_guaranteed;
        let b = riccati_time(&merged).unwrap().t_guaranteed;
        assert!((a - b).abs() <= 1e-10 * a, "{a} vs {b}");
    }

    #[test]
    fn numeric_matches_closed_form_on_a_grid() {
        for &c1 in &[0.1, 1.0, 10.0] {
            for &gamma in &[1.2, 1.5, 2.0, 3.0] {
                for &x0 in &[0.01, 1.0, 100.0] {
                    let p = RiccatiParams {
                        c1,
                        c2: 0.0,
                        gamma1: gamma,
                        gamma2: gamma,
                        x0,
                    };
                    let sol = riccati_time(&p).unwrap();
                    let expect = closed_form_doubling_time(c1, gamma, x0);
                    let rel = (sol.t_guaranteed - expect).abs() / expect;
                    assert!(rel < 1e-8, "c1={c1} gamma={gamma} x0={x0}: rel err {rel}");
                }
            }
        }
    }

    #[test]
    fn doubling_time_is_monotone() {
        let base = RiccatiParams {
            c1: 1.0,
            c2: 0.5,
            gamma1: 2.0,
            gamma2: 1.5,
            x0: 1.0,
        };
        let t0 = riccati_time(&base).unwrap().t_guaranteed;
        for (field, factor) in [("x0", 4.0), ("c1", 2.0), ("c2", 2.0)] {
            let mut p = base;
            match field {
                "x0" => p.x0 *= factor,
                "c1" => p.c1 *= factor,
                _ => p.c2 *= factor,
            }
            let t1 = riccati_time(&p).unwrap().t_guaranteed;
            assert!(t1 < t0, "{field}: {t1} !< {t0}");
        }
    }

    #[test]
    fn zero_state_never_doubles() {
        let p = RiccatiParams {
            c1: 1.0,
            c2: 0.0,
            gamma1: 2.0,
            gamma2: 2.0,
            x0: 0.0,
        };
        let sol = riccati_time(&p).unwrap();
        assert!(sol.t_guaranteed.is_infinite());
    }

    #[test]
    fn fitted_horizon_is_conservative_for_a_dissipative_run() {
        // Back-test: the guaranteed horizon from fitted parameters never
        // exceeds the observed doubling time of the shell energy (infinite
        // here, since the run decays).
        use crate::solver::{make_initial, run, InitialKind, SolverConfig};
        let config = SolverConfig {
            n: 16,
            nu: 0.1,
            mu: 0.1,
            eta: 0.01,
            dt: 2e-3,
            t_end: 0.05,
            diag_stride: 5,
            ..SolverConfig::default()
        };
        let initial = make_initial(InitialKind::TaylorGreen, config.grid(), 0, 2.0).unwrap();
        let traj = run(initial.clone(), &config, |_| Ok(())).unwrap();
        assert!(traj.failure.is_none());
        let fit = fit_riccati_params(&traj, &config, 2.0).unwrap();
        assert!(fit.params.validate().is_ok());
        let horizon = existence_time_estimate(&initial, &config, 2.0, &fit.params).unwrap();
        assert!(horizon > 0.0);
        assert!(
            horizon <= fit.observed_doubling_time,
            "horizon {horizon} exceeds observed doubling {}",
            fit.observed_doubling_time
        );
        // zero state: infinite horizon sentinel
        let zero = crate::solver::State {
            t: 0.0,
            u: crate::field::SpectralField::zeros(config.grid()),
            b: crate::field::SpectralField::zeros(config.grid()),
        };
        let t = existence_time_estimate(&zero, &config, 2.0, &fit.params).unwrap();
        assert!(t.is_infinite());
    }

    #[test]
    fn invalid_parameters_rejected() {
        let bad = RiccatiParams {
            c1: 1.0,
            c2: 0.0,
            gamma1: 1.0, // must be > 1
            gamma2: 2.0,
            x0: 1.0,
        };
        assert!(riccati_time(&bad).is_err());
        let nan = RiccatiParams {
            c1: f64::NAN,
            c2: 0.0,
            gamma1: 2.0,
            gamma2: 2.0,
            x0: 1.0,
        };
        assert!(riccati_time(&nan).is_err());
    }
}
