//! Run configuration: the key=value config grammar and its validation.
//!
//! One pair per line, `#` starts a comment, dotted keys (`params.Cf`,
//! `case.a`) are forwarded to the case registry as overrides.

use crate::cases::default_resolution;
use crate::error::{Error, Result};
use crate::riemann::SolverKind;
use std::collections::BTreeMap;
use std::path::PathBuf;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub case: String,
    pub solver: SolverKind,
    pub order: u32,
    pub nx: Option<usize>,
    pub ny: Option<usize>,
    pub cfl: f64,
    /// Source implicitness; None selects the per-case default.
    pub theta: Option<f64>,
    pub beta: f64,
    /// None selects the case's default final time.
    pub t_end: Option<f64>,
    /// Simulated seconds between snapshots; 0 disables intermediate output.
    pub snapshot_every: f64,
    pub out_dir: PathBuf,
    /// Mesh-doubling levels used by the convergence driver.
    pub levels: usize,
    pub overrides: BTreeMap<String, f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            case: String::new(),
            solver: SolverKind::Hllc5,
            order: 2,
            nx: None,
            ny: None,
            cfl: 0.5,
            theta: None,
            beta: 1.0,
            t_end: None,
            snapshot_every: 0.0,
            out_dir: PathBuf::from("out"),
            levels: 3,
            overrides: BTreeMap::new(),
        }
    }
}

const OVERRIDE_KEYS: [&str; 9] = [
    "params.g",
    "params.Cf",
    "params.Cr",
    "params.phi",
    "case.a",
    "case.h0",
    "case.incline",
    "case.Lx",
    "case.Ly",
];

fn config_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Config {
        line,
        msg: msg.into(),
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<T> {
    value
        .parse::<T>()
        .map_err(|_| config_err(line, format!("cannot parse '{value}' for key '{key}'")))
}

/// Apply one key=value pair; `line` is used in error messages (0 for CLI
/// flags).
pub fn apply_pair(config: &mut RunConfig, key: &str, value: &str, line: usize) -> Result<()> {
    match key {
        "case" => config.case = value.to_string(),
        "solver" => {
            config.solver = value
                .parse::<SolverKind>()
                .map_err(|e| config_err(line, e))?;
        }
        "order" => {
            let order: u32 = parse_num(key, value, line)?;
            if order != 1 && order != 2 {
                return Err(config_err(line, format!("order = {order} (must be 1 or 2)")));
            }
            config.order = order;
        }
        "nx" => config.nx = Some(parse_num(key, value, line)?),
        "ny" => config.ny = Some(parse_num(key, value, line)?),
        "cfl" => {
            let cfl: f64 = parse_num(key, value, line)?;
            if !(cfl > 0.0 && cfl <= 1.0) {
                return Err(config_err(line, format!("cfl = {cfl} (must be in (0, 1])")));
            }
            config.cfl = cfl;
        }
        "theta" => {
            let theta: f64 = parse_num(key, value, line)?;
            if !(0.0..=1.0).contains(&theta) {
                return Err(config_err(line, format!("theta = {theta} (must be in [0, 1])")));
            }
            config.theta = Some(theta);
        }
        "beta" => {
            let beta: f64 = parse_num(key, value, line)?;
            if !(1.0..=2.0).contains(&beta) {
                return Err(config_err(line, format!("beta = {beta} (must be in [1, 2])")));
            }
            config.beta = beta;
        }
        "t_end" => {
            let t: f64 = parse_num(key, value, line)?;
            if !(t >= 0.0) {
                return Err(config_err(line, format!("t_end = {t} (must be >= 0)")));
            }
            config.t_end = Some(t);
        }
        "snapshot_every" => {
            let s: f64 = parse_num(key, value, line)?;
            if !(s >= 0.0) {
                return Err(config_err(line, format!("snapshot_every = {s} (must be >= 0)")));
            }
            config.snapshot_every = s;
        }
        "out_dir" => config.out_dir = PathBuf::from(value),
        "levels" => {
            let l: usize = parse_num(key, value, line)?;
            if l < 1 {
                return Err(config_err(line, "levels must be >= 1"));
            }
            config.levels = l;
        }
        dotted if OVERRIDE_KEYS.contains(&dotted) => {
            let v: f64 = parse_num(key, value, line)?;
            config.overrides.insert(dotted.to_string(), v);
        }
        unknown => {
            return Err(config_err(line, format!("unknown key '{unknown}'")));
        }
    }
    Ok(())
}

/// Parse the config text. The `case` key is required; everything else has a
/// default.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut config = RunConfig::default();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(config_err(line_no, format!("expected key=value, got '{line}'")));
        };
        apply_pair(&mut config, key.trim(), value.trim(), line_no)?;
    }
    if config.case.is_empty() {
        return Err(config_err(0, "missing required key 'case'"));
    }
    // resolves the name early so typos fail as config errors
    default_resolution(&config.case)
        .map_err(|_| config_err(0, format!("unknown case '{}'", config.case)))?;
    Ok(config)
}

/// Apply `--key=value` command-line flags on top of a parsed config.
pub fn apply_flags(config: &mut RunConfig, flags: &[String]) -> Result<()> {
    for flag in flags {
        let stripped = flag.strip_prefix("--").ok_or_else(|| {
            config_err(0, format!("expected --key=value flag, got '{flag}'"))
        })?;
        let Some((key, value)) = stripped.split_once('=') else {
            return Err(config_err(0, format!("expected --key=value flag, got '{flag}'")));
        };
        apply_pair(config, key.trim(), value.trim(), 0)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config("case=shear1d\nnx=500\n").unwrap();
        assert_eq!(c.case, "shear1d");
        assert_eq!(c.nx, Some(500));
        assert_eq!(c.solver, SolverKind::Hllc5);
        assert_eq!(c.order, 2);
        assert_eq!(c.cfl, 0.5);
        assert_eq!(c.beta, 1.0);
        assert!(c.theta.is_none());
    }

    #[test]
    fn bad_solver_reports_value_and_line() {
        let err = parse_config("case=shear1d\nsolver=hllc9\n").unwrap_err();
        match err {
            Error::Config { line, msg } => {
                assert_eq!(line, 2);
                assert!(msg.contains("hllc9"), "{msg}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn comments_and_overrides() {
        let text = "# run setup\ncase=rollwave1d_case1 # the first data set\nparams.Cf=0.0036\ncase.a=0.02\n";
        let c = parse_config(text).unwrap();
        assert_eq!(c.overrides["params.Cf"], 0.0036);
        assert_eq!(c.overrides["case.a"], 0.02);
    }

    #[test]
    fn unknown_key_and_range_violations() {
        assert!(parse_config("case=shear1d\nwibble=1\n").is_err());
        assert!(parse_config("case=shear1d\ncfl=0\n").is_err());
        assert!(parse_config("case=shear1d\nbeta=2.5\n").is_err());
        assert!(parse_config("nx=10\n").is_err());
    }

    #[test]
    fn flags_override_file_values() {
        let mut c = parse_config("case=dambreak1d\nnx=100\n").unwrap();
        apply_flags(
            &mut c,
            &["--nx=200".to_string(), "--solver=hll".to_string()],
        )
        .unwrap();
        assert_eq!(c.nx, Some(200));
        assert_eq!(c.solver, SolverKind::Hll);
        assert!(apply_flags(&mut c, &["nx=1".to_string()]).is_err());
    }
}
