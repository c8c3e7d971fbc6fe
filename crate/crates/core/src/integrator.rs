//! First-order and MUSCL-Hancock second-order time stepping in one and two
//! dimensions, with CFL time-step control and the semi-implicit source
//! treatment.
//!
//! theta selects where the source is evaluated within a sub-step of length
//! tau: theta = 0 is fully explicit; otherwise the exact solve
//! U - tau_i S(U) = U~ + (tau - tau_i) S(U_in) with tau_i = min(theta dt, tau)
//! is used, which reproduces the fully implicit first-order step at theta = 1
//! and the implicit half-step predictor at theta = 1/2.

use crate::error::{Error, Result};
use crate::grid::{apply_bc, BoundarySpec, ExactField, Grid2D};
use crate::model::{max_abs_eigenvalue, noncons_vector, physical_flux, source_terms, Axis};
use crate::riemann::{solve_face, solve_face_y, FluctuationPair, SolverKind};
use crate::source_solver::{implicit_source_update, ImplicitUpdateInput};
use crate::state::{cons_to_prim_unchecked, ConservedState, ModelParams, PrimitiveState};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    First,
    Second,
}

impl Order {
    pub fn from_u32(v: u32) -> Result<Order> {
        match v {
            1 => Ok(Order::First),
            2 => Ok(Order::Second),
            other => Err(Error::InvalidParameter(format!(
                "order = {other} (must be 1 or 2)"
            ))),
        }
    }

    pub fn as_u32(&self) -> u32 {
        match self {
            Order::First => 1,
            Order::Second => 2,
        }
    }
}

/// Numerical controls of a run.
#[derive(Debug, Clone, Copy)]
pub struct StepControls {
    pub order: Order,
    pub solver: SolverKind,
    /// Source implicitness, in [0, 1].
    pub theta: f64,
    /// Limiter parameter, in [1, 2].
    pub beta: f64,
    /// Courant number, in (0, 1].
    pub cfl: f64,
}

impl StepControls {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "cfl = {} (must be in (0, 1])",
                self.cfl
            )));
        }
        if !(self.beta >= 1.0 && self.beta <= 2.0) {
            return Err(Error::InvalidParameter(format!(
                "beta = {} (must be in [1, 2])",
                self.beta
            )));
        }
        if !(self.theta >= 0.0 && self.theta <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "theta = {} (must be in [0, 1])",
                self.theta
            )));
        }
        Ok(())
    }
}

/// Per-step diagnostics; positivity minima are monitored, never enforced.
#[derive(Debug, Clone, Copy)]
pub struct StepRecord {
    pub step: u64,
    /// Time after the step.
    pub t: f64,
    pub dt: f64,
    pub min_h: f64,
    pub min_p11: f64,
    pub min_p22: f64,
    /// Faces where the requested Riemann solver fell back to a simpler one.
    pub solver_fallbacks: u64,
}

#[derive(Debug, Clone, Default)]
pub struct RunLog {
    pub records: Vec<StepRecord>,
}

impl RunLog {
    pub fn steps(&self) -> u64 {
        self.records.len() as u64
    }
}

/// CFL time step: dt = cfl / max_cells(lambda_x / dx + lambda_y / dy), with
/// the y term absent on one-dimensional grids.
pub fn compute_dt(grid: &Grid2D, params: &ModelParams, controls: &StepControls) -> Result<f64> {
    let one_d = grid.is_one_dimensional();
    let rate_of_row = |k: usize| -> Result<f64> {
        let mut row_max = 0.0_f64;
        for j in 0..grid.nx {
            let u = grid.cell(j as isize, k as isize);
            u.validate_positivity()
                .map_err(|e| e.at_cell(j as isize, k as isize, 0))?;
            let mut rate = max_abs_eigenvalue(u, Axis::X, params.g)? / grid.dx;
            if !one_d {
                rate += max_abs_eigenvalue(u, Axis::Y, params.g)? / grid.dy;
            }
            row_max = row_max.max(rate);
        }
        Ok(row_max)
    };

    #[cfg(feature = "parallel")]
    let max_rate = (0..grid.ny)
        .into_par_iter()
        .map(rate_of_row)
        .try_reduce(|| 0.0_f64, |a, b| Ok(a.max(b)))?;
    #[cfg(not(feature = "parallel"))]
    let max_rate = {
        let mut m = 0.0_f64;
        for k in 0..grid.ny {
            m = m.max(rate_of_row(k)?);
        }
        m
    };

    if !(max_rate > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "non-positive wave speed bound {max_rate}"
        )));
    }
    Ok(controls.cfl / max_rate)
}

/// Componentwise minmod slope of the primitive variables:
/// minmod(beta (Q0 - Qm), (Qp - Qm)/2, beta (Qp - Q0)).
pub fn minmod_slope(
    q_minus: &PrimitiveState,
    q_0: &PrimitiveState,
    q_plus: &PrimitiveState,
    beta: f64,
) -> [f64; 6] {
    let qm = q_minus.to_array();
    let q0 = q_0.to_array();
    let qp = q_plus.to_array();
    let mut slope = [0.0; 6];
    for c in 0..6 {
        slope[c] = minmod3(
            beta * (q0[c] - qm[c]),
            0.5 * (qp[c] - qm[c]),
            beta * (qp[c] - q0[c]),
        );
    }
    slope
}

fn minmod3(a: f64, b: f64, c: f64) -> f64 {
    if a > 0.0 && b > 0.0 && c > 0.0 {
        a.min(b).min(c)
    } else if a < 0.0 && b < 0.0 && c < 0.0 {
        a.max(b).max(c)
    } else {
        0.0
    }
}

/// dU/dQ applied to a primitive slope.
fn slope_to_conserved(q: &PrimitiveState, dq: &[f64; 6]) -> [f64; 6] {
    let (h, v1, v2) = (q.h, q.v1, q.v2);
    [
        dq[0],
        v1 * dq[0] + h * dq[1],
        v2 * dq[0] + h * dq[2],
        0.5 * v1 * v1 * dq[0] + h * v1 * dq[1] + 0.5 * dq[3],
        0.5 * v1 * v2 * dq[0] + 0.5 * h * v2 * dq[1] + 0.5 * h * v1 * dq[2] + 0.5 * dq[4],
        0.5 * v2 * v2 * dq[0] + h * v2 * dq[2] + 0.5 * dq[5],
    ]
}

fn add_scaled(u: &ConservedState, d: &[f64; 6], s: f64) -> ConservedState {
    let a = u.to_array();
    ConservedState::from_array([
        a[0] + s * d[0],
        a[1] + s * d[1],
        a[2] + s * d[2],
        a[3] + s * d[3],
        a[4] + s * d[4],
        a[5] + s * d[5],
    ])
}

/// Source contribution over a sub-step of length `tau` starting from `u_in`,
/// applied to the source-free update `u_tilde`.
fn apply_source(
    u_tilde: ConservedState,
    u_in: &ConservedState,
    dbdx: f64,
    dbdy: f64,
    tau: f64,
    dt: f64,
    controls: &StepControls,
    params: &ModelParams,
) -> Result<ConservedState> {
    if controls.theta == 0.0 {
        let s = source_terms(u_in, dbdx, dbdy, params);
        return Ok(add_scaled(&u_tilde, &s, tau));
    }
    let tau_implicit = (controls.theta * dt).min(tau);
    let explicit = tau - tau_implicit;
    let mut rhs = u_tilde;
    if explicit > 0.0 {
        let s = source_terms(u_in, dbdx, dbdy, params);
        rhs = add_scaled(&rhs, &s, explicit);
    }
    implicit_source_update(&ImplicitUpdateInput {
        u_tilde: rhs,
        dbdx,
        dbdy,
        theta_dt: tau_implicit,
        params: *params,
    })
}

/// Half-step states and face extrapolations produced by the MUSCL-Hancock
/// predictor on the interior plus one ghost ring.
pub struct PredictorOutput {
    nx: usize,
    half: Vec<ConservedState>,
    face_w: Vec<ConservedState>,
    face_e: Vec<ConservedState>,
    face_s: Vec<ConservedState>,
    face_n: Vec<ConservedState>,
    /// Limited h-slopes at time n, kept for the corrector's B terms.
    slope_h_x: Vec<f64>,
    slope_h_y: Vec<f64>,
}

impl PredictorOutput {
    #[inline]
    fn ring(&self, j: isize, k: isize) -> usize {
        ((j + 1) as usize) + ((k + 1) as usize) * (self.nx + 2)
    }

    pub fn half(&self, j: isize, k: isize) -> &ConservedState {
        &self.half[self.ring(j, k)]
    }
}

/// One predictor row (ring row kk covering cells j in [-1, nx]).
#[allow(clippy::too_many_arguments)]
fn predictor_row(
    grid: &Grid2D,
    controls: &StepControls,
    params: &ModelParams,
    dt: f64,
    kk: usize,
    half: &mut [ConservedState],
    face_w: &mut [ConservedState],
    face_e: &mut [ConservedState],
    face_s: &mut [ConservedState],
    face_n: &mut [ConservedState],
    slope_h_x: &mut [f64],
    slope_h_y: &mut [f64],
) -> Result<()> {
    let nx = grid.nx as isize;
    let ny = grid.ny as isize;
    let k = kk as isize - 1;
    let half_dt = 0.5 * dt;
    for jj in 0..(grid.nx + 2) {
        let j = jj as isize - 1;
        // Ring corners feed no face; skip them.
        if (j < 0 || j >= nx) && (k < 0 || k >= ny) {
            continue;
        }
        let u = grid.cell(j, k);
        let q = cons_to_prim_unchecked(u);
        let slope_x = minmod_slope(
            &cons_to_prim_unchecked(grid.cell(j - 1, k)),
            &q,
            &cons_to_prim_unchecked(grid.cell(j + 1, k)),
            controls.beta,
        );
        let slope_y = minmod_slope(
            &cons_to_prim_unchecked(grid.cell(j, k - 1)),
            &q,
            &cons_to_prim_unchecked(grid.cell(j, k + 1)),
            controls.beta,
        );
        let du_x = slope_to_conserved(&q, &slope_x);
        let du_y = slope_to_conserved(&q, &slope_y);

        let w = add_scaled(u, &du_x, -0.5);
        let e = add_scaled(u, &du_x, 0.5);
        let s = add_scaled(u, &du_y, -0.5);
        let n = add_scaled(u, &du_y, 0.5);

        let f_w = try_flux(&w, Axis::X, params.g).map_err(|er| er.at_cell(j, k, 0))?;
        let f_e = try_flux(&e, Axis::X, params.g).map_err(|er| er.at_cell(j, k, 0))?;
        let f_s = try_flux(&s, Axis::Y, params.g).map_err(|er| er.at_cell(j, k, 0))?;
        let f_n = try_flux(&n, Axis::Y, params.g).map_err(|er| er.at_cell(j, k, 0))?;
        let b_x = noncons_vector(u.m1, u.m2, Axis::X, params.g);
        let b_y = noncons_vector(u.m1, u.m2, Axis::Y, params.g);

        let gi = grid.idx(j, k);
        let (dbdx, dbdy) = (grid.topo.dbdx[gi], grid.topo.dbdy[gi]);
        let mut dudt = [0.0; 6];
        for c in 0..6 {
            dudt[c] = -(f_e[c] - f_w[c]) / grid.dx
                - (f_n[c] - f_s[c]) / grid.dy
                - b_x[c] * slope_x[0] / grid.dx
                - b_y[c] * slope_y[0] / grid.dy;
        }
        let tilde = add_scaled(u, &dudt, half_dt);
        let half_state = apply_source(tilde, u, dbdx, dbdy, half_dt, dt, controls, params)
            .map_err(|er| er.at_cell(j, k, 0))?;
        half_state
            .validate_positivity()
            .map_err(|er| er.at_cell(j, k, 0))?;

        half[jj] = half_state;
        face_w[jj] = add_scaled(&half_state, &du_x, -0.5);
        face_e[jj] = add_scaled(&half_state, &du_x, 0.5);
        face_s[jj] = add_scaled(&half_state, &du_y, -0.5);
        face_n[jj] = add_scaled(&half_state, &du_y, 0.5);
        slope_h_x[jj] = slope_x[0];
        slope_h_y[jj] = slope_y[0];
    }
    Ok(())
}

/// MUSCL-Hancock predictor: limited slopes, half-step evolution, and face
/// extrapolation at the half time level. Ghost cells are already filled.
pub fn predictor(
    grid: &Grid2D,
    controls: &StepControls,
    params: &ModelParams,
    dt: f64,
) -> Result<PredictorOutput> {
    let nx = grid.nx;
    let ny = grid.ny;
    let rs = nx + 2;
    let n_ring = rs * (ny + 2);
    let mut out = PredictorOutput {
        nx,
        half: vec![ConservedState::ZERO; n_ring],
        face_w: vec![ConservedState::ZERO; n_ring],
        face_e: vec![ConservedState::ZERO; n_ring],
        face_s: vec![ConservedState::ZERO; n_ring],
        face_n: vec![ConservedState::ZERO; n_ring],
        slope_h_x: vec![0.0; n_ring],
        slope_h_y: vec![0.0; n_ring],
    };

    #[cfg(feature = "parallel")]
    out.half
        .par_chunks_mut(rs)
        .zip(out.face_w.par_chunks_mut(rs))
        .zip(out.face_e.par_chunks_mut(rs))
        .zip(out.face_s.par_chunks_mut(rs))
        .zip(out.face_n.par_chunks_mut(rs))
        .zip(out.slope_h_x.par_chunks_mut(rs))
        .zip(out.slope_h_y.par_chunks_mut(rs))
        .enumerate()
        .try_for_each(|(kk, ((((((h, w), e), s), n), sx), sy))| {
            predictor_row(grid, controls, params, dt, kk, h, w, e, s, n, sx, sy)
        })?;
    #[cfg(not(feature = "parallel"))]
    for (kk, ((((((h, w), e), s), n), sx), sy)) in out
        .half
        .chunks_mut(rs)
        .zip(out.face_w.chunks_mut(rs))
        .zip(out.face_e.chunks_mut(rs))
        .zip(out.face_s.chunks_mut(rs))
        .zip(out.face_n.chunks_mut(rs))
        .zip(out.slope_h_x.chunks_mut(rs))
        .zip(out.slope_h_y.chunks_mut(rs))
        .enumerate()
    {
        predictor_row(grid, controls, params, dt, kk, h, w, e, s, n, sx, sy)?;
    }

    Ok(out)
}

fn try_flux(u: &ConservedState, dir: Axis, g: f64) -> Result<[f64; 6]> {
    u.validate_positivity()?;
    Ok(physical_flux(u, dir, g))
}

struct FaceSet {
    x: Vec<FluctuationPair>,
    y: Vec<FluctuationPair>,
    fallbacks: u64,
}

type StateOf<'a> = &'a (dyn Fn(isize, isize) -> ConservedState + Sync);

/// Solve every face. The x-face (fj - 1/2, k) takes its left state from
/// `east_of(fj - 1, k)` and right state from `west_of(fj, k)`; y-faces use
/// `north_of` / `south_of` of the cells below and above.
fn solve_faces(
    grid: &Grid2D,
    controls: &StepControls,
    params: &ModelParams,
    east_of: StateOf,
    west_of: StateOf,
    south_of: StateOf,
    north_of: StateOf,
) -> Result<FaceSet> {
    let nx = grid.nx;
    let ny = grid.ny;
    let g = params.g;
    let kind = controls.solver;

    let mut x = vec![FluctuationPair::ZERO; (nx + 1) * ny];
    let x_row = |k: usize, row: &mut [FluctuationPair]| -> Result<u64> {
        let mut fb = 0;
        for fj in 0..=nx {
            let l = east_of(fj as isize - 1, k as isize);
            let r = west_of(fj as isize, k as isize);
            let sol = solve_face(kind, &l, &r, g)
                .map_err(|e| e.at_cell(fj as isize, k as isize, 0))?;
            if sol.used != kind {
                fb += 1;
            }
            row[fj] = sol.fluctuations;
        }
        Ok(fb)
    };

    let mut y = vec![FluctuationPair::ZERO; nx * (ny + 1)];
    let y_row = |fk: usize, row: &mut [FluctuationPair]| -> Result<u64> {
        let mut fb = 0;
        for j in 0..nx {
            let lower = north_of(j as isize, fk as isize - 1);
            let upper = south_of(j as isize, fk as isize);
            let (fluct, used) = solve_face_y(kind, &lower, &upper, g)
                .map_err(|e| e.at_cell(j as isize, fk as isize, 0))?;
            if used != kind {
                fb += 1;
            }
            row[j] = fluct;
        }
        Ok(fb)
    };

    #[cfg(feature = "parallel")]
    let fallbacks = {
        let fx: u64 = x
            .par_chunks_mut(nx + 1)
            .enumerate()
            .map(|(k, row)| x_row(k, row))
            .try_reduce(|| 0, |a, b| Ok(a + b))?;
        let fy: u64 = y
            .par_chunks_mut(nx)
            .enumerate()
            .map(|(fk, row)| y_row(fk, row))
            .try_reduce(|| 0, |a, b| Ok(a + b))?;
        fx + fy
    };
    #[cfg(not(feature = "parallel"))]
    let fallbacks = {
        let mut fb = 0;
        for (k, row) in x.chunks_mut(nx + 1).enumerate() {
            fb += x_row(k, row)?;
        }
        for (fk, row) in y.chunks_mut(nx).enumerate() {
            fb += y_row(fk, row)?;
        }
        fb
    };

    Ok(FaceSet { x, y, fallbacks })
}

fn write_back(grid: &mut Grid2D, new_cells: &[ConservedState]) {
    let nx = grid.nx;
    for k in 0..grid.ny {
        for j in 0..nx {
            let gi = grid.idx(j as isize, k as isize);
            grid.cells[gi] = new_cells[j + k * nx];
        }
    }
}

fn update_cells<F>(nx: usize, ny: usize, update_row: F) -> Result<Vec<ConservedState>>
where
    F: Fn(usize, &mut [ConservedState]) -> Result<()> + Sync,
{
    let mut new_cells = vec![ConservedState::ZERO; nx * ny];
    #[cfg(feature = "parallel")]
    new_cells
        .par_chunks_mut(nx)
        .enumerate()
        .try_for_each(|(k, row)| update_row(k, row))?;
    #[cfg(not(feature = "parallel"))]
    for (k, row) in new_cells.chunks_mut(nx).enumerate() {
        update_row(k, row)?;
    }
    Ok(new_cells)
}

/// Second-order corrector: face fluxes and fluctuations at the half time
/// level, non-conservative terms with the time-n depth slopes, source at the
/// half-step state.
pub fn corrector(
    grid: &mut Grid2D,
    pred: &PredictorOutput,
    controls: &StepControls,
    params: &ModelParams,
    dt: f64,
) -> Result<u64> {
    let nx = grid.nx;
    let faces = solve_faces(
        grid,
        controls,
        params,
        &|j, k| pred.face_e[pred.ring(j, k)],
        &|j, k| pred.face_w[pred.ring(j, k)],
        &|j, k| pred.face_s[pred.ring(j, k)],
        &|j, k| pred.face_n[pred.ring(j, k)],
    )?;

    let g = params.g;
    let grid_ref: &Grid2D = grid;
    let new_cells = update_cells(nx, grid.ny, |k, row| {
        for (j, slot) in row.iter_mut().enumerate() {
            let r = pred.ring(j as isize, k as isize);
            let half = &pred.half[r];
            let f_w = physical_flux(&pred.face_w[r], Axis::X, g);
            let f_e = physical_flux(&pred.face_e[r], Axis::X, g);
            let f_s = physical_flux(&pred.face_s[r], Axis::Y, g);
            let f_n = physical_flux(&pred.face_n[r], Axis::Y, g);
            let d_w = &faces.x[j + k * (nx + 1)];
            let d_e = &faces.x[(j + 1) + k * (nx + 1)];
            let d_s = &faces.y[j + k * nx];
            let d_n = &faces.y[j + (k + 1) * nx];
            let b_x = noncons_vector(half.m1, half.m2, Axis::X, g);
            let b_y = noncons_vector(half.m1, half.m2, Axis::Y, g);
            let gi = grid_ref.idx(j as isize, k as isize);
            let src = source_terms(half, grid_ref.topo.dbdx[gi], grid_ref.topo.dbdy[gi], params);

            let u = grid_ref.cell(j as isize, k as isize).to_array();
            let mut unew = [0.0; 6];
            for c in 0..6 {
                let rate = -(f_e[c] + d_e.d_minus[c] - f_w[c] + d_w.d_plus[c]) / grid_ref.dx
                    - (f_n[c] + d_n.d_minus[c] - f_s[c] + d_s.d_plus[c]) / grid_ref.dy
                    - b_x[c] * pred.slope_h_x[r] / grid_ref.dx
                    - b_y[c] * pred.slope_h_y[r] / grid_ref.dy
                    + src[c];
                unew[c] = u[c] + dt * rate;
            }
            *slot = ConservedState::from_array(unew);
        }
        Ok(())
    })?;

    write_back(grid, &new_cells);
    Ok(faces.fallbacks)
}

/// First-order path-conservative step: fluctuations from the cell states at
/// time n and the theta source treatment over the full step.
fn first_order_step(
    grid: &mut Grid2D,
    controls: &StepControls,
    params: &ModelParams,
    dt: f64,
) -> Result<u64> {
    let nx = grid.nx;
    let cell: StateOf = &|j, k| *grid.cell(j, k);
    let faces = solve_faces(grid, controls, params, cell, cell, cell, cell)?;

    let grid_ref: &Grid2D = grid;
    let new_cells = update_cells(nx, grid.ny, |k, row| {
        for (j, slot) in row.iter_mut().enumerate() {
            let d_w = &faces.x[j + k * (nx + 1)];
            let d_e = &faces.x[(j + 1) + k * (nx + 1)];
            let d_s = &faces.y[j + k * nx];
            let d_n = &faces.y[j + (k + 1) * nx];
            let u = grid_ref.cell(j as isize, k as isize);
            let ua = u.to_array();
            let mut tilde = [0.0; 6];
            for c in 0..6 {
                tilde[c] = ua[c]
                    - dt / grid_ref.dx * (d_w.d_plus[c] + d_e.d_minus[c])
                    - dt / grid_ref.dy * (d_s.d_plus[c] + d_n.d_minus[c]);
            }
            let gi = grid_ref.idx(j as isize, k as isize);
            *slot = apply_source(
                ConservedState::from_array(tilde),
                u,
                grid_ref.topo.dbdx[gi],
                grid_ref.topo.dbdy[gi],
                dt,
                dt,
                controls,
                params,
            )
            .map_err(|e| e.at_cell(j as isize, k as isize, 0))?;
        }
        Ok(())
    })?;

    write_back(grid, &new_cells);
    Ok(faces.fallbacks)
}

/// One full time step of size `dt`: boundary refresh, scheme update,
/// positivity monitoring.
pub fn step_with_dt(
    grid: &mut Grid2D,
    spec: &BoundarySpec,
    exact: Option<&dyn ExactField>,
    controls: &StepControls,
    params: &ModelParams,
    dt: f64,
    step: u64,
) -> Result<StepRecord> {
    apply_bc(grid, spec, exact)?;
    let fallbacks = match controls.order {
        Order::First => first_order_step(grid, controls, params, dt)?,
        Order::Second => {
            let pred = predictor(grid, controls, params, dt)?;
            corrector(grid, &pred, controls, params, dt)?
        }
    };
    grid.time += dt;

    let mut min_h = f64::INFINITY;
    let mut min_p11 = f64::INFINITY;
    let mut min_p22 = f64::INFINITY;
    for k in 0..grid.ny {
        for j in 0..grid.nx {
            let u = grid.cell(j as isize, k as isize);
            for (field, value) in [("h", u.h), ("P11", u.p11()), ("P22", u.p22())] {
                if !(value > 0.0) {
                    return Err(Error::PositivityViolation {
                        step,
                        j,
                        k,
                        field,
                        value,
                        state: u.to_array(),
                    });
                }
            }
            min_h = min_h.min(u.h);
            min_p11 = min_p11.min(u.p11());
            min_p22 = min_p22.min(u.p22());
        }
    }

    Ok(StepRecord {
        step,
        t: grid.time,
        dt,
        min_h,
        min_p11,
        min_p22,
        solver_fallbacks: fallbacks,
    })
}

/// March the grid to `t_end`, clamping the final step to land exactly.
pub fn advance<F>(
    grid: &mut Grid2D,
    spec: &BoundarySpec,
    exact: Option<&dyn ExactField>,
    controls: &StepControls,
    params: &ModelParams,
    t_end: f64,
    mut on_step: F,
) -> Result<RunLog>
where
    F: FnMut(&Grid2D, &StepRecord) -> Result<()>,
{
    controls.validate()?;
    params.validate()?;
    spec.validate()?;
    let mut log = RunLog::default();
    let t_tol = 1e-12 * t_end.abs().max(1.0);
    let mut step = 0u64;
    while grid.time < t_end - t_tol {
        let dt = compute_dt(grid, params, controls)?.min(t_end - grid.time);
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "time step degenerated to {dt} at t = {}",
                grid.time
            )));
        }
        let rec = step_with_dt(grid, spec, exact, controls, params, dt, step)?;
        on_step(grid, &rec)?;
        log.records.push(rec);
        step += 1;
    }
    Ok(log)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::BcKind;

    const G: f64 = 9.81;

    fn controls(order: Order, solver: SolverKind, theta: f64) -> StepControls {
        StepControls {
            order,
            solver,
            theta,
            beta: 1.0,
            cfl: 0.5,
        }
    }

    fn uniform_grid(nx: usize, ny: usize) -> Grid2D {
        Grid2D::new(
            nx,
            ny,
            0.0,
            0.0,
            1.0,
            if ny == 1 { 1.0 / nx as f64 } else { 1.0 },
            2,
            |_, _| PrimitiveState::new(0.5, 0.2, -0.1, 0.05, 0.01, 0.04),
            |_, _| (0.0, 0.0, 0.0),
        )
    }

    // State whose largest x-wave speed is exactly 0.5: v = 0 and
    // g h + 3 P11 = 0.25.
    fn half_speed_state() -> PrimitiveState {
        let h = 0.01;
        let p = (0.25 - G * h) / 3.0;
        PrimitiveState::new(h, 0.0, 0.0, h * p, 0.0, h * p)
    }

    #[test]
    fn dt_single_cell_and_dx_scaling() {
        let params = ModelParams::inviscid(G);
        let c = controls(Order::First, SolverKind::Hll, 0.0);
        let grid = Grid2D::new(1, 1, 0.0, 0.0, 0.1, 0.1, 2, |_, _| half_speed_state(), |_, _| {
            (0.0, 0.0, 0.0)
        });
        let dt = compute_dt(&grid, &params, &c).unwrap();
        assert!((dt - 0.1).abs() < 1e-14, "dt = {dt}");

        let grid2 = Grid2D::new(1, 1, 0.0, 0.0, 0.2, 0.2, 2, |_, _| half_speed_state(), |_, _| {
            (0.0, 0.0, 0.0)
        });
        let dt2 = compute_dt(&grid2, &params, &c).unwrap();
        assert!((dt2 - 0.2).abs() < 1e-14);
    }

    #[test]
    fn dt_two_dimensional_sums_directions() {
        // lambda_x / dx = lambda_y / dy = 5 -> dt = 0.5 / 10 = 0.05
        let params = ModelParams::inviscid(G);
        let c = controls(Order::First, SolverKind::Hll, 0.0);
        let grid = Grid2D::new(
            2,
            2,
            0.0,
            0.0,
            0.2,
            0.2,
            2,
            |_, _| half_speed_state(),
            |_, _| (0.0, 0.0, 0.0),
        );
        let dt = compute_dt(&grid, &params, &c).unwrap();
        assert!((dt - 0.05).abs() < 1e-14, "dt = {dt}");
    }

    #[test]
    fn minmod_cases() {
        let q = |a: f64| PrimitiveState::new(a, a, a, a, a, a);
        // args (1, 2, 3) componentwise -> 1
        let s = minmod_slope(&q(0.0), &q(1.0), &q(4.0), 1.0);
        for c in 0..6 {
            assert_eq!(s[c], 1.0);
        }
        // sign disagreement -> 0
        let s = minmod_slope(&q(1.0), &q(0.0), &q(3.0), 1.0);
        for c in 0..6 {
            assert_eq!(s[c], 0.0);
        }
        // smooth linear data: slope recovered exactly
        let s = minmod_slope(&q(1.0), &q(1.5), &q(2.0), 1.0);
        for c in 0..6 {
            assert_eq!(s[c], 0.5);
        }
    }

    #[test]
    fn uniform_state_is_steady_both_orders() {
        let params = ModelParams::inviscid(G);
        let spec = BoundarySpec::uniform(BcKind::Periodic);
        for order in [Order::First, Order::Second] {
            let mut grid = uniform_grid(16, 1);
            let before = grid.cells.clone();
            let c = controls(order, SolverKind::Hllc5, 0.0);
            for s in 0..100 {
                step_with_dt(&mut grid, &spec, None, &c, &params, 1e-3, s).unwrap();
            }
            for j in 0..16 {
                let a = before[grid.idx(j, 0)];
                let b = *grid.cell(j, 0);
                assert_eq!(a, b, "drifted at cell {j}");
            }
        }
    }

    #[test]
    fn predictor_identity_on_uniform_state() {
        let grid = {
            let mut g = uniform_grid(8, 1);
            let spec = BoundarySpec::uniform(BcKind::Periodic);
            apply_bc(&mut g, &spec, None).unwrap();
            g
        };
        let c = controls(Order::Second, SolverKind::Hllc5, 0.0);
        let params = ModelParams::inviscid(G);
        let pred = predictor(&grid, &c, &params, 1e-3).unwrap();
        for j in 0..8 {
            assert_eq!(*pred.half(j, 0), *grid.cell(j, 0));
        }
    }

    #[test]
    fn order2_with_flat_slopes_matches_order1_one_step() {
        // Piecewise-constant dam-break data: every minmod slope vanishes at
        // t = 0, so one second-order step reproduces the first-order one in
        // the absence of sources.
        let params = ModelParams::inviscid(G);
        let spec = BoundarySpec::uniform(BcKind::Transmissive);
        let init = |x: f64, _: f64| {
            let h = if x < 0.5 { 0.02 } else { 0.01 };
            PrimitiveState::new(h, 0.0, 0.0, h * 1e-4, 0.0, h * 1e-4)
        };
        let mk = || Grid2D::new(50, 1, 0.0, 0.0, 1.0, 0.02, 2, init, |_, _| (0.0, 0.0, 0.0));
        let dt = 1e-3;
        let mut g1 = mk();
        let mut g2 = mk();
        step_with_dt(
            &mut g1,
            &spec,
            None,
            &controls(Order::First, SolverKind::Hllc3, 0.0),
            &params,
            dt,
            0,
        )
        .unwrap();
        step_with_dt(
            &mut g2,
            &spec,
            None,
            &controls(Order::Second, SolverKind::Hllc3, 0.0),
            &params,
            dt,
            0,
        )
        .unwrap();
        for j in 0..50 {
            let a = g1.cell(j, 0).to_array();
            let b = g2.cell(j, 0).to_array();
            for c in 0..6 {
                assert!(
                    (a[c] - b[c]).abs() <= 1e-15 * a[c].abs().max(1.0),
                    "cell {j} comp {c}: {} vs {}",
                    a[c],
                    b[c]
                );
            }
        }
    }

    #[test]
    fn advance_t_end_zero_is_identity() {
        let mut grid = uniform_grid(8, 1);
        let before = grid.cells.clone();
        let spec = BoundarySpec::uniform(BcKind::Periodic);
        let c = controls(Order::Second, SolverKind::Hll, 0.0);
        let params = ModelParams::inviscid(G);
        let log = advance(&mut grid, &spec, None, &c, &params, 0.0, |_, _| Ok(())).unwrap();
        assert_eq!(log.steps(), 0);
        assert_eq!(before, grid.cells);
    }

    #[test]
    fn advance_lands_exactly_on_t_end() {
        let mut grid = uniform_grid(8, 1);
        let spec = BoundarySpec::uniform(BcKind::Periodic);
        let c = controls(Order::First, SolverKind::Hll, 0.0);
        let params = ModelParams::inviscid(G);
        let t_end = 0.0123;
        advance(&mut grid, &spec, None, &c, &params, t_end, |_, _| Ok(())).unwrap();
        assert!((grid.time - t_end).abs() < 1e-12);
    }

    #[test]
    fn split_runs_replay_bitwise_with_fixed_dt_schedule() {
        let params = ModelParams::inviscid(G);
        let spec = BoundarySpec::uniform(BcKind::Transmissive);
        let init = |x: f64, _: f64| {
            let h = if x < 0.5 { 0.02 } else { 0.01 };
            PrimitiveState::new(h, 0.0, 0.0, h * 1e-4, 0.0, h * 1e-4)
        };
        let mk = || Grid2D::new(40, 1, 0.0, 0.0, 1.0, 0.025, 2, init, |_, _| (0.0, 0.0, 0.0));
        let c = controls(Order::Second, SolverKind::Hllc5, 0.0);

        let mut reference = mk();
        let mut schedule = Vec::new();
        for s in 0..40u64 {
            let dt = compute_dt(&reference, &params, &c).unwrap();
            schedule.push(dt);
            step_with_dt(&mut reference, &spec, None, &c, &params, dt, s).unwrap();
        }

        let mut replay = mk();
        for (s, dt) in schedule.iter().take(20).enumerate() {
            step_with_dt(&mut replay, &spec, None, &c, &params, *dt, s as u64).unwrap();
        }
        let mut resumed = replay.clone();
        for (s, dt) in schedule.iter().enumerate().skip(20) {
            step_with_dt(&mut resumed, &spec, None, &c, &params, *dt, s as u64).unwrap();
        }
        for (a, b) in reference.cells.iter().zip(resumed.cells.iter()) {
            assert_eq!(a.to_array(), b.to_array());
        }
    }
}
