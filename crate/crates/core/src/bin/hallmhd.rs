//! Batch command-line interface: simulation runs, snapshot decomposition,
//! budget/cancellation series, lemma-constant probes, vanishing-Hall sweeps,
//! and existence-horizon estimates.
//!
//! Exit codes: 0 success, 1 configuration error, 2 numerical fault
//! (CFL/blow-up/NaN), 64 usage error. `HALLMHD_LOG` controls stderr
//! verbosity (`error`, `warn`, `info`, `debug`; default `warn`).

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use hallmhd::config::{parse_config, ParsedConfig};
use hallmhd::diagnostics::{cancellation_checks, energy_budget, shell_spectrum};
use hallmhd::error::Error;
use hallmhd::littlewood_paley::DyadicProfile;
use hallmhd::probes::{max_ratios_by_shell, probe_suite};
use hallmhd::report::{
    write_cancellation_csv, write_curve_csv, write_ndjson_line, write_probe_csv,
    write_spectrum_csv, write_sweep_csv, DiagRecord, SweepSummary,
};
use hallmhd::riccati::{existence_time_estimate, fit_riccati_params, riccati_time, RiccatiParams};
use hallmhd::snapshot::{read_snapshot, write_snapshot, Snapshot};
use hallmhd::solver::{make_initial, run, RunFailure, SolverConfig};
use hallmhd::sweep::convergence_sweep;

#[derive(Parser)]
#[command(
    name = "hallmhd",
    about = "Pseudo-spectral Hall-MHD simulation and analysis on the periodic box",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Run configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for output artifacts (created if missing).
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Worker threads for spectral kernels (default: all cores). Results
    /// are reproducible across thread counts.
    #[arg(long)]
    threads: Option<usize>,
    /// Replaces the seed from the configuration file.
    #[arg(long)]
    seed_override: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a run configuration, streaming NDJSON diagnostics and
    /// writing a final checkpoint snapshot.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Shell-decompose a snapshot into weighted per-shell energies (CSV).
    Decompose {
        /// Snapshot file to analyze.
        #[arg(long)]
        snapshot: PathBuf,
        /// Sobolev weight for the shell energies.
        #[arg(long, default_value_t = 0.0)]
        s: f64,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run a simulation and emit the energy-budget and cancellation series.
    Budget {
        /// Sobolev weight override (defaults to the config's `s`).
        #[arg(long)]
        s: Option<f64>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the commutator/block-norm constant probes and export the ratios.
    Probe {
        /// Seeded draws per probe.
        #[arg(long, default_value_t = 100)]
        seeds: u64,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the vanishing-Hall convergence sweep and fit the rate.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Fit the Riccati growth model along a run and report the guaranteed
    /// existence horizon.
    Riccati {
        /// Sobolev weight override (defaults to the config's `s`).
        #[arg(long)]
        s: Option<f64>,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Clone, Copy, PartialEq, PartialOrd)]
enum LogLevel {
    Error = 0,
    Warn = 1,
    Info = 2,
    Debug = 3,
}

fn log_level() -> LogLevel {
    match std::env::var("HALLMHD_LOG").as_deref() {
        Ok("error") => LogLevel::Error,
        Ok("info") => LogLevel::Info,
        Ok("debug") => LogLevel::Debug,
        _ => LogLevel::Warn,
    }
}

fn log(level: LogLevel, msg: &str) {
    if level <= log_level() {
        eprintln!("hallmhd: {msg}");
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            _ => {
                eprint!("{e}");
                return ExitCode::from(64);
            }
        },
    };

    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log(LogLevel::Error, &e.to_string());
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::CflError { .. } | Error::BlowupDetected { .. } | Error::NumericalFault(_) => 2,
        _ => 1,
    }
}

fn dispatch(cli: Cli) -> hallmhd::Result<()> {
    match cli.command {
        Command::Simulate { common } => {
            setup(&common)?;
            let config = load_solver_config(&common)?;
            cmd_simulate(&config, &common.out_dir)
        }
        Command::Decompose {
            snapshot,
            s,
            common,
        } => {
            setup(&common)?;
            cmd_decompose(&snapshot, s, &common.out_dir)
        }
        Command::Budget { s, common } => {
            setup(&common)?;
            let config = load_solver_config(&common)?;
            let s = s.unwrap_or(config.s);
            cmd_budget(&config, s, &common.out_dir)
        }
        Command::Probe { seeds, common } => {
            setup(&common)?;
            let n = match &common.config {
                Some(_) => load_solver_config(&common)?.n,
                None => 32,
            };
            let seed_base = common.seed_override.unwrap_or(0);
            cmd_probe(n, seeds, seed_base, &common.out_dir)
        }
        Command::Sweep { common } => {
            setup(&common)?;
            let path = require_config(&common)?;
            let (parsed, warnings) = parse_config(&path)?;
            for w in &warnings {
                log(LogLevel::Warn, w);
            }
            let mut cfg = match parsed {
                ParsedConfig::Sweep(c) => c,
                ParsedConfig::Solver(_) => {
                    return Err(Error::ConfigError {
                        location: path.display().to_string(),
                        message: "the sweep subcommand needs `kind = sweep`".into(),
                    })
                }
            };
            if let Some(seed) = common.seed_override {
                cfg.base.seed = seed;
            }
            cmd_sweep(&cfg, &common.out_dir)
        }
        Command::Riccati { s, common } => {
            setup(&common)?;
            let config = load_solver_config(&common)?;
            let s = s.unwrap_or(config.s);
            cmd_riccati(&config, s, &common.out_dir)
        }
    }
}

fn setup(common: &CommonArgs) -> hallmhd::Result<()> {
    if let Some(threads) = common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::InvalidParameter(format!("cannot size thread pool: {e}")))?;
    }
    std::fs::create_dir_all(&common.out_dir)?;
    Ok(())
}

fn require_config(common: &CommonArgs) -> hallmhd::Result<PathBuf> {
    common.config.clone().ok_or_else(|| Error::ConfigError {
        location: "cli".into(),
        message: "this subcommand needs --config".into(),
    })
}

fn load_solver_config(common: &CommonArgs) -> hallmhd::Result<SolverConfig> {
    let path = require_config(common)?;
    let (parsed, warnings) = parse_config(&path)?;
    for w in &warnings {
        log(LogLevel::Warn, w);
    }
    let mut config = match parsed {
        ParsedConfig::Solver(c) => c,
        ParsedConfig::Sweep(_) => {
            return Err(Error::ConfigError {
                location: path.display().to_string(),
                message: "this subcommand needs `kind = solver`".into(),
            })
        }
    };
    if let Some(seed) = common.seed_override {
        config.seed = seed;
    }
    Ok(config)
}

fn fail_run(failure: RunFailure) -> Error {
    match failure {
        RunFailure::Cfl(e) | RunFailure::Blowup(e) | RunFailure::Fault(e) => e,
    }
}

fn cmd_simulate(config: &SolverConfig, out_dir: &Path) -> hallmhd::Result<()> {
    let initial = make_initial(config.initial_kind, config.grid(), config.seed, config.s)?;
    let mut ndjson = BufWriter::new(File::create(out_dir.join("diagnostics.ndjson"))?);
    let stdout = std::io::stdout();
    // A consumer hanging up on the stdout stream (e.g. `| head`) must not
    // abort the run; the file artifacts keep writing.
    let mut stdout_open = true;

    let trajectory = run(initial, config, |state| {
        let spectrum = shell_spectrum(state, config.s);
        let budget = energy_budget(state, config, config.s)?;
        let record = DiagRecord::new(state, &spectrum, budget);
        write_ndjson_line(&mut ndjson, &record)?;
        if stdout_open {
            let mut out = stdout.lock();
            if write_ndjson_line(&mut out, &record).is_err() {
                stdout_open = false;
            }
        }
        Ok(())
    })?;
    ndjson.flush()?;

    write_snapshot(
        &out_dir.join("checkpoint.snap"),
        &Snapshot::from_state(&trajectory.final_state, config),
    )?;
    log(
        LogLevel::Info,
        &format!(
            "simulated {} steps to t = {}",
            trajectory.steps_taken, trajectory.final_state.t
        ),
    );
    match trajectory.failure {
        Some(f) => Err(fail_run(f)),
        None => Ok(()),
    }
}

fn cmd_decompose(snapshot: &Path, s: f64, out_dir: &Path) -> hallmhd::Result<()> {
    let snap = read_snapshot(snapshot)?;
    let state = snap.to_state()?;
    let spectrum = shell_spectrum(&state, s);
    let mut csv = BufWriter::new(File::create(out_dir.join("decompose.csv"))?);
    write_spectrum_csv(&mut csv, &spectrum)?;
    csv.flush()?;
    Ok(())
}

fn cmd_budget(config: &SolverConfig, s: f64, out_dir: &Path) -> hallmhd::Result<()> {
    let initial = make_initial(config.initial_kind, config.grid(), config.seed, config.s)?;
    let mut ndjson = BufWriter::new(File::create(out_dir.join("budget.ndjson"))?);
    let mut cancellations = Vec::new();

    let trajectory = run(initial, config, |state| {
        let budget = energy_budget(state, config, s)?;
        write_ndjson_line(&mut ndjson, &budget)?;
        cancellations.push(cancellation_checks(state, s)?);
        Ok(())
    })?;
    ndjson.flush()?;

    let mut csv = BufWriter::new(File::create(out_dir.join("cancellations.csv"))?);
    write_cancellation_csv(&mut csv, &cancellations)?;
    csv.flush()?;
    match trajectory.failure {
        Some(f) => Err(fail_run(f)),
        None => Ok(()),
    }
}

fn cmd_probe(n: usize, seeds: u64, seed_base: u64, out_dir: &Path) -> hallmhd::Result<()> {
    let profile = DyadicProfile::new(hallmhd::Grid::new(n)?);
    let rows = probe_suite(&profile, seeds, seed_base)?;
    let mut csv = BufWriter::new(File::create(out_dir.join("probes.csv"))?);
    write_probe_csv(&mut csv, &rows)?;
    csv.flush()?;

    #[derive(serde::Serialize)]
    struct ProbeSummary {
        n: usize,
        seeds: u64,
        max_ratios: Vec<ProbeMax>,
    }
    #[derive(serde::Serialize)]
    struct ProbeMax {
        lemma: &'static str,
        q: i32,
        max_ratio: f64,
    }
    let summary = ProbeSummary {
        n,
        seeds,
        max_ratios: max_ratios_by_shell(&rows)
            .into_iter()
            .map(|(lemma, q, max_ratio)| ProbeMax {
                lemma,
                q,
                max_ratio,
            })
            .collect(),
    };
    let mut json = BufWriter::new(File::create(out_dir.join("probe_summary.json"))?);
    serde_json::to_writer_pretty(&mut json, &summary)
        .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    json.write_all(b"\n")?;
    json.flush()?;
    Ok(())
}

fn cmd_sweep(cfg: &hallmhd::sweep::SweepConfig, out_dir: &Path) -> hallmhd::Result<()> {
    let result = convergence_sweep(cfg)?;

    let mut csv = BufWriter::new(File::create(out_dir.join("sweep.csv"))?);
    write_sweep_csv(&mut csv, &result.rows)?;
    csv.flush()?;

    let mut json = BufWriter::new(File::create(out_dir.join("sweep_summary.json"))?);
    serde_json::to_writer_pretty(&mut json, &SweepSummary::from_result(&result))
        .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    json.write_all(b"\n")?;
    json.flush()?;

    match result.aborted_eta {
        Some((eta, e)) => {
            log(
                LogLevel::Error,
                &format!("sweep aborted at eta = {eta}: {e}"),
            );
            Err(e)
        }
        None => {
            log(
                LogLevel::Info,
                &format!(
                    "fitted slope {} (r² = {})",
                    result.fitted_slope, result.fit_r2
                ),
            );
            Ok(())
        }
    }
}

fn cmd_riccati(config: &SolverConfig, s: f64, out_dir: &Path) -> hallmhd::Result<()> {
    let initial = make_initial(config.initial_kind, config.grid(), config.seed, config.s)?;
    let trajectory = run(initial.clone(), config, |_| Ok(()))?;
    if let Some(f) = trajectory.failure {
        return Err(fail_run(f));
    }
    let fit = fit_riccati_params(&trajectory, config, s)?;
    let horizon = existence_time_estimate(&initial, config, s, &fit.params)?;
    let solution = riccati_time(&RiccatiParams {
        x0: hallmhd::diagnostics::shell_energy_sum(&initial, s),
        ..fit.params
    })?;

    let mut csv = BufWriter::new(File::create(out_dir.join("riccati_curve.csv"))?);
    write_curve_csv(&mut csv, &solution.curve)?;
    csv.flush()?;

    #[derive(serde::Serialize)]
    struct RiccatiSummary {
        t_guaranteed: f64,
        observed_doubling_time: f64,
        samples_used: usize,
        params: RiccatiParams,
    }
    let mut json = BufWriter::new(File::create(out_dir.join("riccati_summary.json"))?);
    serde_json::to_writer_pretty(
        &mut json,
        &RiccatiSummary {
            t_guaranteed: horizon,
            observed_doubling_time: fit.observed_doubling_time,
            samples_used: fit.samples_used,
            params: fit.params,
        },
    )
    .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    json.write_all(b"\n")?;
    json.flush()?;
    Ok(())
}
