//! Batch run orchestration: executes a configured case, writes snapshots,
//! the step log, and error/convergence reports.

use crate::analysis::{convergence_rate, error_norm, Norm};
use crate::cases::{init_case, CaseSetup};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::grid::{ExactField, Grid2D};
use crate::integrator::{advance, Order, RunLog, StepControls};
use crate::snapshot::{fmt_f64, write_snapshot};
use std::fmt::Write as _;
use std::path::PathBuf;

pub const FIELD_NAMES: [&str; 6] = ["h", "v1", "v2", "P11", "P12", "P22"];

/// Artifacts produced by a completed run.
pub struct RunArtifacts {
    pub out_dir: PathBuf,
    pub final_snapshot: PathBuf,
    pub steps: u64,
    pub final_time: f64,
    /// Per-variable L1 error against the exact field, when one exists.
    pub errors_l1: Option<[f64; 6]>,
}

fn controls_for(setup: &CaseSetup, config: &RunConfig) -> Result<StepControls> {
    let controls = StepControls {
        order: Order::from_u32(config.order)?,
        solver: config.solver,
        theta: config.theta.unwrap_or_else(|| setup.default_theta(config.order)),
        beta: config.beta,
        cfl: config.cfl,
    };
    controls.validate()?;
    Ok(controls)
}

fn write_step_log(log: &RunLog, path: &PathBuf) -> Result<()> {
    let mut text = String::from("step,t,dt,min_h,min_P11,min_P22,solver_fallbacks\n");
    for r in &log.records {
        let _ = writeln!(
            text,
            "{},{},{},{},{},{},{}",
            r.step,
            fmt_f64(r.t),
            fmt_f64(r.dt),
            fmt_f64(r.min_h),
            fmt_f64(r.min_p11),
            fmt_f64(r.min_p22),
            r.solver_fallbacks
        );
    }
    std::fs::write(path, text)?;
    Ok(())
}

/// L1/L2/Linf error of every primitive variable against the exact field at
/// the grid's current time, midpoint-evaluated.
pub fn errors_against_exact(grid: &Grid2D, exact: &dyn ExactField) -> [[f64; 3]; 6] {
    let cell_area = grid.dx * if grid.is_one_dimensional() { 1.0 } else { grid.dy };
    let mut exact_fields = vec![Vec::with_capacity(grid.nx * grid.ny); 6];
    for k in 0..grid.ny as isize {
        for j in 0..grid.nx as isize {
            let q = exact.eval(grid.cell_x(j), grid.cell_y(k), grid.time);
            let vals = [q.h, q.v1, q.v2, q.p11(), q.p12(), q.p22()];
            for (f, v) in exact_fields.iter_mut().zip(vals) {
                f.push(v);
            }
        }
    }
    let mut out = [[0.0; 3]; 6];
    for (f, row) in out.iter_mut().enumerate() {
        let numeric = grid.extract_primitive(f);
        for (n, norm) in [Norm::L1, Norm::L2, Norm::LInf].into_iter().enumerate() {
            row[n] = error_norm(&numeric, &exact_fields[f], cell_area, norm)
                .expect("matching shapes by construction");
        }
    }
    out
}

/// Execute a configured run. On a numerical abort the error is also written
/// to `<out_dir>/abort.txt` so batch operators keep the diagnostics.
pub fn run(config: &RunConfig) -> Result<RunArtifacts> {
    std::fs::create_dir_all(&config.out_dir)?;
    match run_inner(config) {
        Ok(artifacts) => Ok(artifacts),
        Err(e) => {
            let _ = std::fs::write(config.out_dir.join("abort.txt"), format!("{e}\n"));
            Err(e)
        }
    }
}

fn run_inner(config: &RunConfig) -> Result<RunArtifacts> {
    let mut setup = init_case(&config.case, config.nx, config.ny, &config.overrides)?;
    let controls = controls_for(&setup, config)?;
    let t_end = config.t_end.unwrap_or(setup.t_end);
    let exact = setup.exact;
    let exact_ref: Option<&dyn ExactField> = exact.as_ref().map(|e| e as &dyn ExactField);

    let mut snap_idx = 0usize;
    let mut next_snap = 0.0;
    let every = config.snapshot_every;
    if every > 0.0 {
        let path = config.out_dir.join(format!("snap_{snap_idx:06}.csv"));
        write_snapshot(&setup.grid, &path)?;
        snap_idx += 1;
        next_snap = every;
    }

    let out_dir = config.out_dir.clone();
    let log = advance(
        &mut setup.grid,
        &setup.bc,
        exact_ref,
        &controls,
        &setup.params,
        t_end,
        |grid, _rec| {
            if every > 0.0 && grid.time + 1e-12 * t_end.max(1.0) >= next_snap {
                let path = out_dir.join(format!("snap_{snap_idx:06}.csv"));
                write_snapshot(grid, &path)?;
                snap_idx += 1;
                while next_snap <= grid.time {
                    next_snap += every;
                }
            }
            Ok(())
        },
    )?;

    let final_snapshot = config.out_dir.join("final.csv");
    write_snapshot(&setup.grid, &final_snapshot)?;
    write_step_log(&log, &config.out_dir.join("steps.csv"))?;

    let errors_l1 = if let Some(ex) = exact.as_ref() {
        let errs = errors_against_exact(&setup.grid, ex);
        let mut text = String::from("variable,L1,L2,Linf\n");
        for (f, name) in FIELD_NAMES.iter().enumerate() {
            let _ = writeln!(
                text,
                "{},{},{},{}",
                name,
                fmt_f64(errs[f][0]),
                fmt_f64(errs[f][1]),
                fmt_f64(errs[f][2])
            );
        }
        std::fs::write(config.out_dir.join("errors.csv"), text)?;
        Some([errs[0][0], errs[1][0], errs[2][0], errs[3][0], errs[4][0], errs[5][0]])
    } else {
        None
    };

    Ok(RunArtifacts {
        out_dir: config.out_dir.clone(),
        final_snapshot,
        steps: log.steps(),
        final_time: setup.grid.time,
        errors_l1,
    })
}

/// Mesh-doubling convergence study.
pub struct ConvergenceTable {
    pub resolutions: Vec<(usize, usize)>,
    /// Per level, L1 error of each primitive variable.
    pub errors: Vec<[f64; 6]>,
    /// log2 error ratios between consecutive levels.
    pub rates: Vec<[f64; 6]>,
}

impl ConvergenceTable {
    pub fn to_csv(&self) -> String {
        let mut text = String::from(
            "nx,ny,L1_h,L1_v1,L1_v2,L1_P11,L1_P12,L1_P22,rate_h,rate_v1,rate_v2,rate_P11,rate_P12,rate_P22\n",
        );
        for (i, ((nx, ny), errs)) in self.resolutions.iter().zip(&self.errors).enumerate() {
            let mut row = format!("{nx},{ny}");
            for e in errs {
                let _ = write!(row, ",{}", fmt_f64(*e));
            }
            if i == 0 {
                row.push_str(",,,,,,");
            } else {
                for r in &self.rates[i - 1] {
                    let _ = write!(row, ",{r:.4}");
                }
            }
            row.push('\n');
            text.push_str(&row);
        }
        text
    }
}

/// Run the configured case on `levels` meshes, doubling the resolution each
/// time, and report L1 errors and observed rates. Requires a case with an
/// exact solution.
pub fn convergence(config: &RunConfig) -> Result<ConvergenceTable> {
    let probe = init_case(&config.case, config.nx, config.ny, &config.overrides)?;
    if probe.exact.is_none() {
        return Err(Error::MissingExactField);
    }
    let base_nx = config.nx.unwrap_or(probe.grid.nx);
    let base_ny = config.ny.unwrap_or(probe.grid.ny);

    let mut table = ConvergenceTable {
        resolutions: Vec::new(),
        errors: Vec::new(),
        rates: Vec::new(),
    };
    for level in 0..config.levels {
        let factor = 1usize << level;
        let nx = base_nx * factor;
        let ny = base_ny * factor;
        let mut setup = init_case(&config.case, Some(nx), Some(ny), &config.overrides)?;
        let controls = controls_for(&setup, config)?;
        let t_end = config.t_end.unwrap_or(setup.t_end);
        let exact = setup.exact.expect("checked above");
        advance(
            &mut setup.grid,
            &setup.bc,
            Some(&exact as &dyn ExactField),
            &controls,
            &setup.params,
            t_end,
            |_, _| Ok(()),
        )?;
        let errs = errors_against_exact(&setup.grid, &exact);
        table.resolutions.push((nx, ny));
        table
            .errors
            .push([errs[0][0], errs[1][0], errs[2][0], errs[3][0], errs[4][0], errs[5][0]]);
    }
    for i in 1..table.errors.len() {
        let mut rates = [0.0; 6];
        for c in 0..6 {
            rates[c] = convergence_rate(table.errors[i - 1][c], table.errors[i][c])?;
        }
        table.rates.push(rates);
    }

    std::fs::create_dir_all(&config.out_dir)?;
    std::fs::write(config.out_dir.join("convergence.csv"), table.to_csv())?;
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn zero_t_end_emits_initial_snapshot_only() {
        let dir = std::env::temp_dir().join("ssw_driver_t0");
        let _ = std::fs::remove_dir_all(&dir);
        let mut config = parse_config("case=shear1d\nnx=20\nt_end=0\n").unwrap();
        config.out_dir = dir.clone();
        let artifacts = run(&config).unwrap();
        assert_eq!(artifacts.steps, 0);
        assert_eq!(artifacts.final_time, 0.0);
        let text = std::fs::read_to_string(artifacts.final_snapshot).unwrap();
        assert_eq!(text.lines().count(), 2 + 20);
    }

    #[test]
    fn short_run_produces_artifacts() {
        let dir = std::env::temp_dir().join("ssw_driver_short");
        let _ = std::fs::remove_dir_all(&dir);
        let mut config = parse_config("case=dambreak1d\nnx=50\nt_end=0.02\n").unwrap();
        config.out_dir = dir.clone();
        let artifacts = run(&config).unwrap();
        assert!(artifacts.steps > 0);
        assert!((artifacts.final_time - 0.02).abs() < 1e-12);
        assert!(dir.join("steps.csv").exists());
        assert!(dir.join("final.csv").exists());
    }
}
