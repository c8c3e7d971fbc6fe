//! Simulation sessions behind the wasm API, kept free of wasm types so the
//! logic also compiles and tests natively.

use ssw::analysis::{energy_spectrum_grid, y_average_decompose};
use ssw::cases::{init_case, Analytic2d, CaseSetup};
use ssw::integrator::{compute_dt, step_with_dt, Order, StepControls};
use ssw::{ExactField, SolverKind};
use std::collections::BTreeMap;

pub struct Session {
    setup: CaseSetup,
    controls: StepControls,
    step: u64,
}

impl Session {
    pub fn new(case: &str, solver: &str, order: u32, nx: usize, ny: Option<usize>) -> Result<Session, String> {
        let solver: SolverKind = solver.parse()?;
        let setup = init_case(case, Some(nx), ny, &BTreeMap::new()).map_err(|e| e.to_string())?;
        let controls = StepControls {
            order: Order::from_u32(order).map_err(|e| e.to_string())?,
            solver,
            theta: setup.default_theta(order),
            beta: 1.0,
            cfl: 0.5,
        };
        controls.validate().map_err(|e| e.to_string())?;
        Ok(Session {
            setup,
            controls,
            step: 0,
        })
    }

    pub fn time(&self) -> f64 {
        self.setup.grid.time
    }

    pub fn nx(&self) -> usize {
        self.setup.grid.nx
    }

    pub fn ny(&self) -> usize {
        self.setup.grid.ny
    }

    /// Advance by up to `sim_seconds` of simulated time, capped at
    /// `max_steps` so a UI frame never blocks for long. Returns the number
    /// of steps taken.
    pub fn advance(&mut self, sim_seconds: f64, max_steps: u32) -> Result<u32, String> {
        let target = self.setup.grid.time + sim_seconds;
        let exact = self.setup.exact;
        let exact_ref: Option<&dyn ExactField> = exact.as_ref().map(|e| e as &dyn ExactField);
        let mut taken = 0;
        while self.setup.grid.time < target && taken < max_steps {
            let dt = compute_dt(&self.setup.grid, &self.setup.params, &self.controls)
                .map_err(|e| e.to_string())?
                .min(target - self.setup.grid.time);
            step_with_dt(
                &mut self.setup.grid,
                &self.setup.bc,
                exact_ref,
                &self.controls,
                &self.setup.params,
                dt,
                self.step,
            )
            .map_err(|e| e.to_string())?;
            self.step += 1;
            taken += 1;
        }
        Ok(taken)
    }

    /// Interior x coordinates (cell centers).
    pub fn positions_x(&self) -> Vec<f64> {
        (0..self.setup.grid.nx as isize)
            .map(|j| self.setup.grid.cell_x(j))
            .collect()
    }

    /// One primitive field over the interior, row-major (x fastest).
    pub fn field(&self, name: &str) -> Result<Vec<f64>, String> {
        let idx = match name {
            "h" => 0,
            "v1" => 1,
            "v2" => 2,
            "P11" => 3,
            "P12" => 4,
            "P22" => 5,
            other => return Err(format!("unknown field '{other}'")),
        };
        Ok(self.setup.grid.extract_primitive(idx))
    }

    /// Per-column y-average of a field (2-D sessions).
    pub fn y_average(&self, name: &str) -> Result<Vec<f64>, String> {
        let field = self.field(name)?;
        let (mean, _) = y_average_decompose(&field, self.nx(), self.ny()).map_err(|e| e.to_string())?;
        Ok(mean)
    }

    /// Fluctuation of a field around its y-average.
    pub fn fluctuation(&self, name: &str) -> Result<Vec<f64>, String> {
        let field = self.field(name)?;
        let (_, fluct) =
            y_average_decompose(&field, self.nx(), self.ny()).map_err(|e| e.to_string())?;
        Ok(fluct)
    }

    /// Kinetic-energy spectrum of the velocity fluctuations around the
    /// y-average; returns (k, E) flattened as [k0, E0, k1, E1, ...].
    pub fn velocity_spectrum(&self) -> Result<Vec<f64>, String> {
        let u = self.fluctuation("v1")?;
        let v = self.fluctuation("v2")?;
        let spec =
            energy_spectrum_grid(&self.setup.grid, &u, &v).map_err(|e| e.to_string())?;
        let mut out = Vec::with_capacity(spec.k.len() * 2);
        for (k, e) in spec.k.iter().zip(spec.e.iter()) {
            out.push(*k as f64);
            out.push(*e);
        }
        Ok(out)
    }
}

/// Depth field of the closed-form 2-D solution on an n x n sampling of
/// [0, 10]^2 at time t; the companion velocity magnitude is interleaved by
/// the caller if needed.
pub fn exact_field_2d(t: f64, n: usize, name: &str) -> Result<Vec<f64>, String> {
    if n == 0 || n > 1024 {
        return Err("sampling resolution must be in 1..=1024".into());
    }
    let exact = Analytic2d::default();
    let mut out = Vec::with_capacity(n * n);
    let d = 10.0 / n as f64;
    for k in 0..n {
        let y = (k as f64 + 0.5) * d;
        for j in 0..n {
            let x = (j as f64 + 0.5) * d;
            let q = exact.eval(x, y, t);
            out.push(match name {
                "h" => q.h,
                "v1" => q.v1,
                "v2" => q.v2,
                "speed" => (q.v1 * q.v1 + q.v2 * q.v2).sqrt(),
                "P11" => q.p11(),
                "P12" => q.p12(),
                "P22" => q.p22(),
                other => return Err(format!("unknown field '{other}'")),
            });
        }
    }
    Ok(out)
}
