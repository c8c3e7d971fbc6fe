//! `ssw` command line interface.
//!
//! Subcommands:
//!   ssw run <config> [--key=value ...]    execute a configured case
//!   ssw cases                             list the case registry
//!   ssw convergence <config> [...]        mesh-doubling error study
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical abort.
//! SSW_THREADS caps the worker count.

use ssw::cases::{case_summary, default_resolution, CASE_NAMES};
use ssw::config::{apply_flags, parse_config, RunConfig};
use ssw::driver;
use ssw::Error;
use std::process::ExitCode;

const USAGE: &str = "usage:
  ssw run <config> [--key=value ...]
  ssw cases
  ssw convergence <config> [--key=value ...]

Config keys (also usable as flags): case, solver, order, nx, ny, cfl,
theta, beta, t_end, snapshot_every, out_dir, levels, params.g, params.Cf,
params.Cr, params.phi, case.a, case.h0, case.incline, case.Lx, case.Ly.";

fn exit_code_for(err: &Error) -> ExitCode {
    match err {
        Error::Config { .. }
        | Error::UnknownCase(_)
        | Error::BadOverride { .. }
        | Error::InvalidParameter(_)
        | Error::Io(_) => ExitCode::from(2),
        _ => ExitCode::from(3),
    }
}

fn init_thread_pool() {
    if let Ok(v) = std::env::var("SSW_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn load_config(path: &str, flags: &[String]) -> Result<RunConfig, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("cannot read config '{path}': {e}")))?;
    let mut config = parse_config(&text)?;
    apply_flags(&mut config, flags)?;
    Ok(config)
}

fn cmd_run(path: &str, flags: &[String]) -> Result<(), Error> {
    let config = load_config(path, flags)?;
    let artifacts = driver::run(&config)?;
    println!(
        "{}: {} steps to t = {:.6}; final snapshot at {}",
        config.case,
        artifacts.steps,
        artifacts.final_time,
        artifacts.final_snapshot.display()
    );
    if let Some(errs) = artifacts.errors_l1 {
        println!("L1 errors vs exact:");
        for (name, e) in driver::FIELD_NAMES.iter().zip(errs) {
            println!("  {name:>4}: {e:.6e}");
        }
    }
    Ok(())
}

fn cmd_cases() {
    for name in CASE_NAMES {
        let (nx, ny) = default_resolution(name).expect("registered");
        println!(
            "{name:<18} {:>4} x {:<4} {}",
            nx,
            ny,
            case_summary(name).unwrap_or("")
        );
    }
}

fn cmd_convergence(path: &str, flags: &[String]) -> Result<(), Error> {
    let config = load_config(path, flags)?;
    let table = driver::convergence(&config)?;
    print!("{}", table.to_csv());
    println!(
        "table written to {}",
        config.out_dir.join("convergence.csv").display()
    );
    Ok(())
}

fn main() -> ExitCode {
    init_thread_pool();
    let args: Vec<String> = std::env::args().skip(1).collect();
    let result = match args.first().map(String::as_str) {
        Some("run") if args.len() >= 2 => cmd_run(&args[1], &args[2..]),
        Some("cases") => {
            cmd_cases();
            Ok(())
        }
        Some("convergence") if args.len() >= 2 => cmd_convergence(&args[1], &args[2..]),
        _ => {
            eprintln!("{USAGE}");
            return ExitCode::from(2);
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}
