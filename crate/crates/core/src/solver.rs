//! Time integration of the coupled velocity/magnetic system on the torus.
//!
//! The dissipative multipliers (`-ν|k|²` on u, `-μ|k|^{2α}` on b) are handled
//! by exact integrating factors, so a pure-diffusion step is exact to
//! roundoff; the nonlinear terms are advanced with classical RK4 on the
//! transformed system. The velocity nonlinearity is evaluated in conservative
//! form `P ∂·(b⊗b - u⊗u)` and the induction nonlinearity in rotational form
//! `∇×(u×b)`; on the retained (dealiased) modes these agree with the
//! advective forms `P[-u·∇u + b·∇b]` and `-u·∇b + b·∇u` to roundoff for
//! divergence-free fields, while costing fewer transforms. The Hall term
//! `-η∇×((∇×b)×b)` is a curl, so the magnetic right side is exactly
//! divergence-free and the induction step never needs projection.

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{PhysicalScalar, SpectralField, SpectralScalar};
use crate::grid::Grid;
use crate::littlewood_paley::{shell_sobolev_norm, DyadicProfile};
use crate::operators::{self, hall_term, leray_project};

/// Initial-condition families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialKind {
    /// Taylor-Green vortex velocity with the standard insulating-type
    /// magnetic seed.
    TaylorGreen,
    /// ABC Beltrami flow (A = B = C = 1) for both fields.
    Abc,
    /// Hermitian Gaussian coefficients on 1 ≤ |k| ≤ 4, projected and
    /// normalized to unit shell-Sobolev norm.
    RandomBand,
}

impl InitialKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "taylor_green" => Some(InitialKind::TaylorGreen),
            "abc" => Some(InitialKind::Abc),
            "random_band" => Some(InitialKind::RandomBand),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            InitialKind::TaylorGreen => "taylor_green",
            InitialKind::Abc => "abc",
            InitialKind::RandomBand => "random_band",
        }
    }
}

/// Physical and discretization parameters of one run.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Kinematic viscosity (> 0).
    pub nu: f64,
    /// Magnetic diffusivity (> 0).
    pub mu: f64,
    /// Hall coefficient (≥ 0).
    pub eta: f64,
    /// Fractional dissipation exponent (> 1/2).
    pub alpha: f64,
    /// Regularity index used by diagnostics and the blow-up monitor.
    pub s: f64,
    /// Points per axis.
    pub n: usize,
    /// Time step (> 0).
    pub dt: f64,
    /// Final time (≥ 0).
    pub t_end: f64,
    /// Abort when the shell-Sobolev norm exceeds this multiple of its
    /// initial value.
    pub blowup_factor: f64,
    /// Seed for random initial data.
    pub seed: u64,
    pub initial_kind: InitialKind,
    /// CFL safety factor applied to the advective/Hall step limits.
    pub cfl_safety: f64,
    /// Diagnostic sampling stride in steps.
    pub diag_stride: usize,
    /// Disables the nonlinear terms (pure-diffusion runs for verification).
    pub nonlinear: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            nu: 0.1,
            mu: 0.1,
            eta: 0.0,
            alpha: 1.0,
            s: 2.0,
            n: 32,
            dt: 1e-3,
            t_end: 0.5,
            blowup_factor: 1e6,
            seed: 0,
            initial_kind: InitialKind::TaylorGreen,
            cfl_safety: 0.5,
            diag_stride: 10,
            nonlinear: true,
        }
    }
}

impl SolverConfig {
    /// Validates parameter ranges. Returns the list of non-fatal warnings
    /// (currently the regularity-threshold advisory `s > 2 - 2α + 3/2`).
    pub fn validate(&self) -> Result<Vec<String>> {
        if !(self.nu > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "nu must be > 0, got {}",
                self.nu
            )));
        }
        if !(self.mu > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mu must be > 0, got {}",
                self.mu
            )));
        }
        if !(self.eta >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "eta must be >= 0, got {}",
                self.eta
            )));
        }
        if !(self.alpha > 0.5) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be > 1/2, got {}",
                self.alpha
            )));
        }
        if !(self.dt > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "dt must be > 0, got {}",
                self.dt
            )));
        }
        if self.t_end < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "t_end must be >= 0, got {}",
                self.t_end
            )));
        }
        Grid::new(self.n)?;
        let mut warnings = Vec::new();
        let threshold = self.regularity_threshold();
        if self.s <= threshold {
            warnings.push(format!(
                "s = {} is at or below the critical regularity threshold 2 - 2α + 3/2 = \
                 {threshold}; shell-norm diagnostics at this weight may not control the solution",
                self.s
            ));
        }
        Ok(warnings)
    }

    /// The critical regularity index `2 - 2α + n/2` with n = 3.
    pub fn regularity_threshold(&self) -> f64 {
        2.0 - 2.0 * self.alpha + 1.5
    }

    pub fn grid(&self) -> Grid {
        Grid::new(self.n).expect("validated grid size")
    }
}

/// The evolving pair of divergence-free fields.
#[derive(Debug, Clone)]
pub struct State {
    pub t: f64,
    pub u: SpectralField,
    pub b: SpectralField,
}

impl State {
    pub fn grid(&self) -> Grid {
        self.u.grid
    }

    /// Total energy `½(‖u‖₂² + ‖b‖₂²)`.
    pub fn energy(&self) -> f64 {
        0.5 * (self.u.l2_norm().powi(2) + self.b.l2_norm().powi(2))
    }
}

/// Builds the initial state for `kind` on `grid`.
///
/// All three families are divergence-free by construction; `RandomBand`
/// draws are deterministic in `seed` and normalized to unit shell-Sobolev
/// norm with weight `s`.
pub fn make_initial(kind: InitialKind, grid: Grid, seed: u64, s: f64) -> Result<State> {
    let (u, b) = match kind {
        InitialKind::TaylorGreen => {
            let u = SpectralField::from_fn(grid, |x| {
                [
                    x[0].sin() * x[1].cos() * x[2].cos(),
                    -(x[0].cos()) * x[1].sin() * x[2].cos(),
                    0.0,
                ]
            })?;
            // Insulating-type magnetic seed: divergence-free and not aligned
            // with u, so every coupling term is active from t = 0.
            let b = SpectralField::from_fn(grid, |x| {
                [
                    x[0].cos() * x[1].sin() * x[2].sin(),
                    x[0].sin() * x[1].cos() * x[2].sin(),
                    -2.0 * x[0].sin() * x[1].sin() * x[2].cos(),
                ]
            })?;
            (u, b)
        }
        InitialKind::Abc => {
            let abc = SpectralField::from_fn(grid, |x| {
                [
                    x[2].sin() + x[1].cos(),
                    x[0].sin() + x[2].cos(),
                    x[1].sin() + x[0].cos(),
                ]
            })?;
            (abc.clone(), abc)
        }
        InitialKind::RandomBand => {
            let profile = DyadicProfile::new(grid);
            let normalize = |f: SpectralField| {
                let norm = shell_sobolev_norm(&profile, &f, s);
                f.scaled(1.0 / norm)
            };
            let u = normalize(leray_project(&SpectralField::random_band(
                grid, 1.0, 4.0, seed,
            )));
            let b = normalize(leray_project(&SpectralField::random_band(
                grid,
                1.0,
                4.0,
                seed.wrapping_add(0x9e37_79b9_7f4a_7c15),
            )));
            (u, b)
        }
    };
    // Closed-form fields are solenoidal analytically; project anyway to strip
    // sampling roundoff so the divergence invariant starts at machine zero.
    let u = leray_project(&u);
    let b = leray_project(&b);
    Ok(State { t: 0.0, u, b })
}

/// Time derivative of the state.
///
/// With `include_linear` the dissipative terms `νΔu` and `-μ(-Δ)^α b` are
/// added spectrally; the integrator itself never sets it because the
/// integrating factor absorbs them exactly.
pub fn rhs(
    state: &State,
    config: &SolverConfig,
    include_linear: bool,
) -> Result<(SpectralField, SpectralField)> {
    let (mut du, mut db) = if config.nonlinear {
        nonlinear_rhs(&state.u, &state.b, config.eta)?
    } else {
        (
            SpectralField::zeros(state.grid()),
            SpectralField::zeros(state.grid()),
        )
    };
    if include_linear {
        du.axpy(-config.nu, &operators::fractional_laplacian(&state.u, 1.0)?);
        db.axpy(
            -config.mu,
            &operators::fractional_laplacian(&state.b, config.alpha)?,
        );
    }
    if !du.has_finite_values() || !db.has_finite_values() {
        return Err(Error::NumericalFault(format!(
            "non-finite right-hand side at t = {}",
            state.t
        )));
    }
    Ok((du, db))
}

/// Nonlinear terms only:
/// `du = P ∂·(b⊗b - u⊗u)`, `db = ∇×(u×b) - η∇×((∇×b)×b)`.
fn nonlinear_rhs(
    u: &SpectralField,
    b: &SpectralField,
    eta: f64,
) -> Result<(SpectralField, SpectralField)> {
    let grid = u.grid;
    let u_phys = u.to_physical();
    let b_phys = b.to_physical();

    // Momentum flux tensor T_im = b_i b_m - u_i u_m (six distinct entries).
    let mut du = SpectralField::zeros(grid);
    for i in 0..3 {
        for m in i..3 {
            let mut entry = PhysicalScalar {
                grid,
                data: vec![0.0; grid.len()],
            };
            for idx in 0..grid.len() {
                entry.data[idx] = b_phys.components[i][idx] * b_phys.components[m][idx]
                    - u_phys.components[i][idx] * u_phys.components[m][idx];
            }
            let mut spec = SpectralScalar::from_physical(&entry)?;
            dealias_scalar(&mut spec);
            // du_m += ∂_i T_im, and symmetric partner du_i += ∂_m T_im.
            for idx in 0..grid.len() {
                let k = grid.wavevector(idx);
                du.components[m][idx] += Complex64::new(0.0, k[i] as f64) * spec.data[idx];
                if m != i {
                    du.components[i][idx] += Complex64::new(0.0, k[m] as f64) * spec.data[idx];
                }
            }
        }
    }
    let du = leray_project(&du);

    // Induction: ∇×(u×b) minus the Hall curl.
    let uxb = {
        let mut spec = SpectralField::from_physical(&operators::cross_physical(&u_phys, &b_phys))?;
        operators::dealias(&mut spec);
        spec
    };
    let mut db = operators::curl(&uxb);
    if eta != 0.0 {
        db.sub_assign(&hall_term(b, eta)?);
    }
    Ok((du, db))
}

fn dealias_scalar(scalar: &mut SpectralScalar) {
    let grid = scalar.grid;
    let kc = grid.dealias_cutoff();
    for (idx, z) in scalar.data.iter_mut().enumerate() {
        let k = grid.wavevector(idx);
        if k[0].abs() > kc || k[1].abs() > kc || k[2].abs() > kc {
            *z = Complex64::default();
        }
    }
}

/// Exponential integrating factors for one half/full step at a fixed dt.
struct Propagator {
    half_u: Vec<f64>,
    full_u: Vec<f64>,
    half_b: Vec<f64>,
    full_b: Vec<f64>,
}

impl Propagator {
    fn new(grid: Grid, config: &SolverConfig) -> Self {
        let len = grid.len();
        let mut half_u = vec![0.0; len];
        let mut full_u = vec![0.0; len];
        let mut half_b = vec![0.0; len];
        let mut full_b = vec![0.0; len];
        for idx in 0..len {
            let ksq = grid.k_sq(idx);
            let lam_u = config.nu * ksq;
            let lam_b = config.mu * ksq.powf(config.alpha);
            half_u[idx] = (-lam_u * config.dt / 2.0).exp();
            full_u[idx] = (-lam_u * config.dt).exp();
            half_b[idx] = (-lam_b * config.dt / 2.0).exp();
            full_b[idx] = (-lam_b * config.dt).exp();
        }
        Propagator {
            half_u,
            full_u,
            half_b,
            full_b,
        }
    }

    fn apply(field: &SpectralField, factors: &[f64]) -> SpectralField {
        let mut out = field.clone();
        for comp in out.components.iter_mut() {
            for (z, &f) in comp.iter_mut().zip(factors) {
                *z *= f;
            }
        }
        out
    }
}

/// Largest dt admitted by the advective and Hall (whistler-type) constraints
/// for the current state: `C_cfl · min(Δx/‖u‖_∞, Δx²/(η‖b‖_∞))`. The Hall
/// wave frequency grows quadratically with wavenumber, hence the quadratic
/// constraint; the dissipative terms impose no limit (integrating factor).
pub fn cfl_limit(state: &State, config: &SolverConfig) -> f64 {
    let dx = state.grid().dx();
    let u_max = state.u.to_physical().linf_norm();
    let b_max = state.b.to_physical().linf_norm();
    let adv = if u_max > 0.0 {
        dx / u_max
    } else {
        f64::INFINITY
    };
    let hall = if config.eta > 0.0 && b_max > 0.0 {
        dx * dx / (config.eta * b_max)
    } else {
        f64::INFINITY
    };
    config.cfl_safety * adv.min(hall)
}

/// One integrating-factor RK4 step.
///
/// Writing `L` for the diagonal dissipative multipliers and `N` for the
/// nonlinear terms, the scheme is RK4 applied to `v' = e^{Lt} N(e^{-Lt} v)`;
/// unrolled with `E = e^{-L dt/2}`:
///
/// ```text
/// k₁ = N(w)                w₁ = E (w + dt/2 k₁)
/// k₂ = N(w₁)               w₂ = E w + dt/2 k₂
/// k₃ = N(w₂)               w₃ = E² w + dt E k₃
/// k₄ = N(w₃)
/// w⁺ = E² w + dt/6 (E² k₁ + 2E (k₂ + k₃) + k₄)
/// ```
pub fn step(state: &State, config: &SolverConfig) -> Result<State> {
    let prop = Propagator::new(state.grid(), config);
    step_with(state, config, &prop)
}

fn step_with(state: &State, config: &SolverConfig, prop: &Propagator) -> Result<State> {
    let dt = config.dt;
    let (k1u, k1b) = rhs(state, config, false)?;

    let mid1 = State {
        t: state.t + dt / 2.0,
        u: Propagator::apply(&add_scaled(&state.u, dt / 2.0, &k1u), &prop.half_u),
        b: Propagator::apply(&add_scaled(&state.b, dt / 2.0, &k1b), &prop.half_b),
    };
    let (k2u, k2b) = rhs(&mid1, config, false)?;

    let mid2 = State {
        t: state.t + dt / 2.0,
        u: add_scaled(&Propagator::apply(&state.u, &prop.half_u), dt / 2.0, &k2u),
        b: add_scaled(&Propagator::apply(&state.b, &prop.half_b), dt / 2.0, &k2b),
    };
    let (k3u, k3b) = rhs(&mid2, config, false)?;

    let end = State {
        t: state.t + dt,
        u: add_scaled(
            &Propagator::apply(&state.u, &prop.full_u),
            dt,
            &Propagator::apply(&k3u, &prop.half_u),
        ),
        b: add_scaled(
            &Propagator::apply(&state.b, &prop.full_b),
            dt,
            &Propagator::apply(&k3b, &prop.half_b),
        ),
    };
    let (k4u, k4b) = rhs(&end, config, false)?;

    let assemble = |w: &SpectralField,
                    k1: &SpectralField,
                    k2: &SpectralField,
                    k3: &SpectralField,
                    k4: &SpectralField,
                    half: &[f64],
                    full: &[f64]| {
        let mut out = Propagator::apply(w, full);
        out.axpy(dt / 6.0, &Propagator::apply(k1, full));
        let mut mid = k2.clone();
        mid.add_assign(k3);
        out.axpy(dt / 3.0, &Propagator::apply(&mid, half));
        out.axpy(dt / 6.0, k4);
        out
    };

    Ok(State {
        t: state.t + dt,
        u: assemble(&state.u, &k1u, &k2u, &k3u, &k4u, &prop.half_u, &prop.full_u),
        b: assemble(&state.b, &k1b, &k2b, &k3b, &k4b, &prop.half_b, &prop.full_b),
    })
}

fn add_scaled(base: &SpectralField, alpha: f64, delta: &SpectralField) -> SpectralField {
    let mut out = base.clone();
    out.axpy(alpha, delta);
    out
}

/// Why a run stopped early.
#[derive(Debug)]
pub enum RunFailure {
    Cfl(Error),
    Blowup(Error),
    Fault(Error),
}

impl RunFailure {
    pub fn error(&self) -> &Error {
        match self {
            RunFailure::Cfl(e) | RunFailure::Blowup(e) | RunFailure::Fault(e) => e,
        }
    }
}

/// The result of [`run`]: the reached state, sampled states, and any failure.
/// On failure the samples collected so far are retained.
pub struct Trajectory {
    pub final_state: State,
    /// States sampled every `diag_stride` steps, plus t = 0 and the end.
    pub samples: Vec<State>,
    pub failure: Option<RunFailure>,
    pub steps_taken: usize,
}

/// Advances `initial` to `config.t_end`, invoking `on_sample` at the
/// configured stride (always at t = 0 and at the final step). The callback
/// may record diagnostics; an error from it aborts the run.
pub fn run(
    initial: State,
    config: &SolverConfig,
    mut on_sample: impl FnMut(&State) -> Result<()>,
) -> Result<Trajectory> {
    config.validate()?;
    let grid = initial.grid();
    grid.check_same(&config.grid())?;
    let n_steps = (config.t_end / config.dt).round() as usize;
    let profile = DyadicProfile::new(grid);
    let initial_norm = shell_sobolev_norm(&profile, &initial.u, config.s)
        .hypot(shell_sobolev_norm(&profile, &initial.b, config.s));
    let blowup_threshold = config.blowup_factor * initial_norm.max(f64::MIN_POSITIVE);

    let prop = Propagator::new(grid, config);
    let mut samples = Vec::new();
    let mut state = initial;
    on_sample(&state)?;
    samples.push(state.clone());

    for step_idx in 0..n_steps {
        let limit = cfl_limit(&state, config);
        if config.nonlinear && config.dt > limit {
            return Ok(Trajectory {
                final_state: state.clone(),
                samples,
                failure: Some(RunFailure::Cfl(Error::CflError {
                    dt: config.dt,
                    suggested: limit,
                })),
                steps_taken: step_idx,
            });
        }
        state = match step_with(&state, config, &prop) {
            Ok(s) => s,
            Err(e) => {
                return Ok(Trajectory {
                    final_state: state.clone(),
                    samples,
                    failure: Some(RunFailure::Fault(e)),
                    steps_taken: step_idx,
                })
            }
        };
        let norm = shell_sobolev_norm(&profile, &state.u, config.s)
            .hypot(shell_sobolev_norm(&profile, &state.b, config.s));
        if !norm.is_finite() || norm > blowup_threshold {
            return Ok(Trajectory {
                final_state: state.clone(),
                samples,
                failure: Some(RunFailure::Blowup(Error::BlowupDetected { t: state.t })),
                steps_taken: step_idx + 1,
            });
        }
        let is_last = step_idx + 1 == n_steps;
        if (step_idx + 1) % config.diag_stride == 0 || is_last {
            on_sample(&state)?;
            samples.push(state.clone());
        }
    }

    Ok(Trajectory {
        final_state: state,
        samples,
        failure: None,
        steps_taken: n_steps,
    })
}
