//! C ABI over the hallmhd solver: opaque handles, integer status codes, and
//! a thread-local last-error message.
//!
//! The surface mirrors the batch workflow: build a solver from a
//! configuration file, advance it step by step (the CFL and blow-up guards
//! stay active), query energies and shell spectra, and write snapshot files
//! readable by the `hallmhd` CLI. All functions are safe to call from any
//! thread as long as a given handle is used by one thread at a time.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;

use hallmhd::diagnostics::shell_spectrum;
use hallmhd::littlewood_paley::{shell_sobolev_norm, DyadicProfile};
use hallmhd::snapshot::{write_snapshot, Snapshot};
use hallmhd::solver::{cfl_limit, make_initial, step, SolverConfig, State};
use hallmhd::Error;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum HmhdStatus {
    /// Success.
    Ok = 0,
    /// Configuration file missing, malformed, or violating a constraint.
    ConfigError = 1,
    /// CFL violation, blow-up, or NaN during integration.
    NumericalFault = 2,
    /// Null pointer or out-of-range argument.
    InvalidArgument = 3,
    /// Filesystem failure.
    IoError = 4,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_for(err: &Error) -> HmhdStatus {
    match err {
        Error::CflError { .. } | Error::BlowupDetected { .. } | Error::NumericalFault(_) => {
            HmhdStatus::NumericalFault
        }
        Error::Io(_) => HmhdStatus::IoError,
        _ => HmhdStatus::ConfigError,
    }
}

/// Opaque solver handle: configuration plus the evolving state.
pub struct HmhdSolver {
    config: SolverConfig,
    state: State,
    initial_norm: f64,
}

/// Returns the library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hmhd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Copies the most recent error message for this thread into `buf`
/// (truncated to `len - 1` bytes, always NUL-terminated when `len > 0`)
/// and returns the full message length in bytes.
///
/// # Safety
/// `buf` must point to at least `len` writable bytes, or be null (then only
/// the length is returned).
#[no_mangle]
pub unsafe extern "C" fn hmhd_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let msg = slot.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Builds a solver from a configuration file (`kind = solver`) and stores
/// the handle in `out`. On failure returns a status and leaves `out`
/// untouched; the message is available via `hmhd_last_error_message`.
///
/// # Safety
/// `config_path` must be a NUL-terminated path; `out` must be a valid
/// pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn hmhd_solver_new(
    config_path: *const c_char,
    out: *mut *mut HmhdSolver,
) -> HmhdStatus {
    if config_path.is_null() || out.is_null() {
        set_error("null pointer argument");
        return HmhdStatus::InvalidArgument;
    }
    let path = match CStr::from_ptr(config_path).to_str() {
        Ok(s) => s,
        Err(_) => {
            set_error("config path is not valid UTF-8");
            return HmhdStatus::InvalidArgument;
        }
    };
    match build_solver(Path::new(path)) {
        Ok(solver) => {
            *out = Box::into_raw(Box::new(solver));
            HmhdStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            status_for(&e)
        }
    }
}

fn build_solver(path: &Path) -> hallmhd::Result<HmhdSolver> {
    let (parsed, _warnings) = hallmhd::config::parse_config(path)?;
    let config = match parsed {
        hallmhd::config::ParsedConfig::Solver(c) => c,
        hallmhd::config::ParsedConfig::Sweep(_) => {
            return Err(Error::InvalidParameter(
                "the FFI solver needs `kind = solver`".into(),
            ))
        }
    };
    let state = make_initial(config.initial_kind, config.grid(), config.seed, config.s)?;
    let profile = DyadicProfile::new(config.grid());
    let initial_norm = shell_sobolev_norm(&profile, &state.u, config.s)
        .hypot(shell_sobolev_norm(&profile, &state.b, config.s));
    Ok(HmhdSolver {
        config,
        state,
        initial_norm,
    })
}

/// Releases a handle created by `hmhd_solver_new`. Null is a no-op.
///
/// # Safety
/// `solver` must be a handle from `hmhd_solver_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hmhd_solver_free(solver: *mut HmhdSolver) {
    if !solver.is_null() {
        drop(Box::from_raw(solver));
    }
}

/// Advances the solver by `n_steps` time steps with the CFL and blow-up
/// guards active.
///
/// # Safety
/// `solver` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hmhd_solver_step(solver: *mut HmhdSolver, n_steps: u64) -> HmhdStatus {
    let Some(solver) = solver.as_mut() else {
        set_error("null solver handle");
        return HmhdStatus::InvalidArgument;
    };
    for _ in 0..n_steps {
        let limit = cfl_limit(&solver.state, &solver.config);
        if solver.config.nonlinear && solver.config.dt > limit {
            let e = Error::CflError {
                dt: solver.config.dt,
                suggested: limit,
            };
            set_error(&e.to_string());
            return HmhdStatus::NumericalFault;
        }
        match step(&solver.state, &solver.config) {
            Ok(next) => solver.state = next,
            Err(e) => {
                set_error(&e.to_string());
                return status_for(&e);
            }
        }
        let profile = DyadicProfile::new(solver.state.grid());
        let norm = shell_sobolev_norm(&profile, &solver.state.u, solver.config.s).hypot(
            shell_sobolev_norm(&profile, &solver.state.b, solver.config.s),
        );
        if !norm.is_finite() || norm > solver.config.blowup_factor * solver.initial_norm {
            let e = Error::BlowupDetected { t: solver.state.t };
            set_error(&e.to_string());
            return HmhdStatus::NumericalFault;
        }
    }
    HmhdStatus::Ok
}

/// Current simulation time (NaN for a null handle).
///
/// # Safety
/// `solver` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn hmhd_solver_time(solver: *const HmhdSolver) -> f64 {
    match solver.as_ref() {
        Some(s) => s.state.t,
        None => f64::NAN,
    }
}

/// Writes the L² energies `½‖u‖₂²` and `½‖b‖₂²` to the output slots.
///
/// # Safety
/// `solver` must be a live handle; output pointers must be writable or null.
#[no_mangle]
pub unsafe extern "C" fn hmhd_solver_energy(
    solver: *const HmhdSolver,
    energy_u: *mut f64,
    energy_b: *mut f64,
) -> HmhdStatus {
    let Some(solver) = solver.as_ref() else {
        set_error("null solver handle");
        return HmhdStatus::InvalidArgument;
    };
    if !energy_u.is_null() {
        *energy_u = 0.5 * solver.state.u.l2_norm().powi(2);
    }
    if !energy_b.is_null() {
        *energy_b = 0.5 * solver.state.b.l2_norm().powi(2);
    }
    HmhdStatus::Ok
}

/// Shell-Sobolev norms of both fields at weight `s`.
///
/// # Safety
/// `solver` must be a live handle; output pointers must be writable or null.
#[no_mangle]
pub unsafe extern "C" fn hmhd_solver_sobolev_norm(
    solver: *const HmhdSolver,
    s: f64,
    norm_u: *mut f64,
    norm_b: *mut f64,
) -> HmhdStatus {
    let Some(solver) = solver.as_ref() else {
        set_error("null solver handle");
        return HmhdStatus::InvalidArgument;
    };
    let profile = DyadicProfile::new(solver.state.grid());
    if !norm_u.is_null() {
        *norm_u = shell_sobolev_norm(&profile, &solver.state.u, s);
    }
    if !norm_b.is_null() {
        *norm_b = shell_sobolev_norm(&profile, &solver.state.b, s);
    }
    HmhdStatus::Ok
}

/// Number of resolvable dyadic shells (indices `-1..=q_max`, so `q_max + 2`
/// entries) for the solver's grid; 0 for a null handle.
///
/// # Safety
/// `solver` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn hmhd_solver_shell_count(solver: *const HmhdSolver) -> usize {
    match solver.as_ref() {
        Some(s) => (DyadicProfile::new(s.state.grid()).q_max() + 2) as usize,
        None => 0,
    }
}

/// Fills `out_u`/`out_b` (each `len` slots) with the weighted per-shell
/// energies `λ_q^{2s}‖·_q‖₂²` for shells `q = -1, 0, …`; `len` must be at
/// least the value of `hmhd_solver_shell_count`.
///
/// # Safety
/// `solver` must be a live handle; the output arrays must hold `len`
/// writable doubles each.
#[no_mangle]
pub unsafe extern "C" fn hmhd_solver_shell_spectrum(
    solver: *const HmhdSolver,
    s: f64,
    out_u: *mut f64,
    out_b: *mut f64,
    len: usize,
) -> HmhdStatus {
    let Some(solver) = solver.as_ref() else {
        set_error("null solver handle");
        return HmhdStatus::InvalidArgument;
    };
    if out_u.is_null() || out_b.is_null() {
        set_error("null spectrum output array");
        return HmhdStatus::InvalidArgument;
    }
    let rows = shell_spectrum(&solver.state, s);
    if len < rows.len() {
        set_error("spectrum output arrays too short");
        return HmhdStatus::InvalidArgument;
    }
    for (i, row) in rows.iter().enumerate() {
        *out_u.add(i) = row.u_energy;
        *out_b.add(i) = row.b_energy;
    }
    HmhdStatus::Ok
}

/// Writes the current state as a snapshot file readable by the CLI.
///
/// # Safety
/// `solver` must be a live handle; `path` a NUL-terminated path.
#[no_mangle]
pub unsafe extern "C" fn hmhd_solver_write_snapshot(
    solver: *const HmhdSolver,
    path: *const c_char,
) -> HmhdStatus {
    let Some(solver) = solver.as_ref() else {
        set_error("null solver handle");
        return HmhdStatus::InvalidArgument;
    };
    if path.is_null() {
        set_error("null snapshot path");
        return HmhdStatus::InvalidArgument;
    }
    let path = match CStr::from_ptr(path).to_str() {
        Ok(s) => s,
        Err(_) => {
            set_error("snapshot path is not valid UTF-8");
            return HmhdStatus::InvalidArgument;
        }
    };
    match write_snapshot(
        Path::new(path),
        &Snapshot::from_state(&solver.state, &solver.config),
    ) {
        Ok(()) => HmhdStatus::Ok,
        Err(e) => {
            set_error(&e.to_string());
            status_for(&e)
        }
    }
}
