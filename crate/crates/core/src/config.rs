//! Flat key-value run configuration files.
//!
//! One format serves both single runs and sweeps, with explicit schema
//! versioning so byte-exact reproducibility survives format evolution:
//!
//! ```text
//! schema = hallmhd-config/1
//! kind = solver            # or "sweep"
//! nu = 0.1
//! mu = 0.1
//! eta = 0.01               # ignored (with a warning) when kind = sweep
//! alpha = 1.0
//! s = 2.0
//! n = 32
//! dt = 1e-3
//! t_end = 0.5
//! seed = 7
//! initial = taylor_green   # taylor_green | abc | random_band
//! # optional: blowup_factor, cfl_safety, diag_stride, nonlinear
//! # sweep only:
//! etas = 1e-1, 1e-2, 1e-3
//! diff_stride = 5
//! ```
//!
//! `#` starts a comment; blank lines are ignored; unknown keys are rejected
//! with their line number.

use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::solver::{InitialKind, SolverConfig};
use crate::sweep::SweepConfig;

pub const SCHEMA: &str = "hallmhd-config/1";

/// A parsed configuration file.
#[derive(Debug, Clone)]
pub enum ParsedConfig {
    Solver(SolverConfig),
    Sweep(SweepConfig),
}

impl ParsedConfig {
    pub fn base(&self) -> &SolverConfig {
        match self {
            ParsedConfig::Solver(c) => c,
            ParsedConfig::Sweep(c) => &c.base,
        }
    }
}

/// Parses and validates a configuration file; returns the config and any
/// non-fatal warnings (threshold advisories, ignored keys).
pub fn parse_config(path: &Path) -> Result<(ParsedConfig, Vec<String>)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config(path.display().to_string(), format!("cannot read file: {e}")))?;
    parse_config_str(&text, &path.display().to_string())
}

/// Parses configuration text; `origin` labels error locations.
pub fn parse_config_str(text: &str, origin: &str) -> Result<(ParsedConfig, Vec<String>)> {
    let mut entries: HashMap<String, (String, usize)> = HashMap::new();
    for (line_no, raw) in text.lines().enumerate() {
        let line_no = line_no + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::config(
                format!("{origin}:{line_no}"),
                format!("expected `key = value`, got `{line}`"),
            )
        })?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if entries.insert(key.clone(), (value, line_no)).is_some() {
            return Err(Error::config(
                format!("{origin}:{line_no}"),
                format!("duplicate key `{key}`"),
            ));
        }
    }

    let mut warnings = Vec::new();
    let mut take = |key: &str| entries.remove(key);

    let schema = take("schema");
    match schema {
        Some((v, line)) if v != SCHEMA => {
            return Err(Error::config(
                format!("{origin}:{line}"),
                format!("unsupported schema `{v}` (expected `{SCHEMA}`)"),
            ));
        }
        None => {
            return Err(Error::config(
                origin,
                format!("missing `schema = {SCHEMA}` line"),
            ));
        }
        _ => {}
    }

    let kind = match take("kind") {
        Some((v, line)) => match v.as_str() {
            "solver" | "sweep" => (v, line),
            other => {
                return Err(Error::config(
                    format!("{origin}:{line}"),
                    format!("kind must be `solver` or `sweep`, got `{other}`"),
                ))
            }
        },
        None => ("solver".to_string(), 0),
    };

    let parse_f64 = |key: &str, (v, line): (String, usize)| -> Result<f64> {
        v.parse::<f64>().map_err(|_| {
            Error::config(
                format!("{origin}:{line}"),
                format!("field `{key}`: `{v}` is not a number"),
            )
        })
    };
    let parse_usize = |key: &str, (v, line): (String, usize)| -> Result<usize> {
        v.parse::<usize>().map_err(|_| {
            Error::config(
                format!("{origin}:{line}"),
                format!("field `{key}`: `{v}` is not a nonnegative integer"),
            )
        })
    };

    let mut cfg = SolverConfig::default();
    let mut require = |key: &'static str| -> Result<(String, usize)> {
        entries
            .remove(key)
            .ok_or_else(|| Error::config(origin, format!("missing required field `{key}`")))
    };

    cfg.nu = parse_f64("nu", require("nu")?)?;
    cfg.mu = parse_f64("mu", require("mu")?)?;
    cfg.alpha = parse_f64("alpha", require("alpha")?)?;
    cfg.s = parse_f64("s", require("s")?)?;
    cfg.n = parse_usize("n", require("n")?)?;
    cfg.dt = parse_f64("dt", require("dt")?)?;
    cfg.t_end = parse_f64("t_end", require("t_end")?)?;
    let (initial, initial_line) = require("initial")?;
    cfg.initial_kind = InitialKind::parse(&initial).ok_or_else(|| {
        Error::config(
            format!("{origin}:{initial_line}"),
            format!("unknown initial condition `{initial}`"),
        )
    })?;

    if let Some(v) = entries.remove("eta") {
        let line = v.1;
        let eta = parse_f64("eta", v)?;
        if kind.0 == "sweep" {
            warnings.push(format!(
                "{origin}:{line}: `eta` is ignored for sweeps (the etas list drives the runs)"
            ));
        }
        cfg.eta = eta;
    }
    if let Some(v) = entries.remove("seed") {
        cfg.seed = v.0.parse::<u64>().map_err(|_| {
            Error::config(
                format!("{origin}:{}", v.1),
                format!("field `seed`: `{}` is not an unsigned integer", v.0),
            )
        })?;
    }
    if let Some(v) = entries.remove("blowup_factor") {
        cfg.blowup_factor = parse_f64("blowup_factor", v)?;
    }
    if let Some(v) = entries.remove("cfl_safety") {
        cfg.cfl_safety = parse_f64("cfl_safety", v)?;
    }
    if let Some(v) = entries.remove("diag_stride") {
        cfg.diag_stride = parse_usize("diag_stride", v)?.max(1);
    }
    if let Some((v, line)) = entries.remove("nonlinear") {
        cfg.nonlinear = match v.as_str() {
            "true" => true,
            "false" => false,
            other => {
                return Err(Error::config(
                    format!("{origin}:{line}"),
                    format!("field `nonlinear`: expected true/false, got `{other}`"),
                ))
            }
        };
    }

    let parsed = if kind.0 == "sweep" {
        let (etas_raw, etas_line) = entries.remove("etas").ok_or_else(|| {
            Error::config(origin, "sweep configs need an `etas` list".to_string())
        })?;
        let etas: Vec<f64> = etas_raw
            .split(',')
            .map(|tok| {
                tok.trim().parse::<f64>().map_err(|_| {
                    Error::config(
                        format!("{origin}:{etas_line}"),
                        format!("field `etas`: `{}` is not a number", tok.trim()),
                    )
                })
            })
            .collect::<Result<_>>()?;
        let diff_stride = match entries.remove("diff_stride") {
            Some(v) => parse_usize("diff_stride", v)?.max(1),
            None => cfg.diag_stride,
        };
        ParsedConfig::Sweep(SweepConfig {
            base: cfg,
            etas,
            diff_stride,
        })
    } else {
        ParsedConfig::Solver(cfg)
    };

    if let Some((key, (_, line))) = entries.into_iter().next() {
        return Err(Error::config(
            format!("{origin}:{line}"),
            format!("unknown key `{key}`"),
        ));
    }

    // Constraint validation, mapped onto ConfigError for a uniform CLI
    // surface; threshold advisories come back as warnings.
    let more_warnings = match &parsed {
        ParsedConfig::Solver(c) => c.validate(),
        ParsedConfig::Sweep(c) => c.validate(),
    }
    .map_err(|e| Error::config(origin, e.to_string()))?;
    warnings.extend(more_warnings);

    Ok((parsed, warnings))
}
