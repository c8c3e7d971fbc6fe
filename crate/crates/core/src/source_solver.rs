//! Exact solution of the semi-implicit source update
//! U - theta*dt * S(U) = U~, where U~ is the explicit update without the
//! source term. The continuity equation carries no source, so h is taken
//! directly from U~; the momentum solve reduces to a quadratic in |m| and the
//! stress solve to a scalar equation for the trace of P with a closed-form
//! root on each branch of the dissipation coefficient.

use crate::error::{Error, Result};
use crate::model::{alpha_coeff, source_terms};
use crate::state::{ConservedState, ModelParams};

/// Input of the per-cell implicit update.
#[derive(Debug, Clone, Copy)]
pub struct ImplicitUpdateInput {
    /// Explicit update without the source term; h is final already.
    pub u_tilde: ConservedState,
    pub dbdx: f64,
    pub dbdy: f64,
    /// theta * dt of the sub-step being made implicit [s].
    pub theta_dt: f64,
    pub params: ModelParams,
}

/// Solve m (1 + c m) = |a| for the momentum magnitude and return the momentum
/// components a_i / (1 + c m). The form below is stable for every c >= 0,
/// including c = 0 where it reduces to m = |a|.
pub fn solve_momentum(a1: f64, a2: f64, c: f64) -> (f64, f64) {
    let a_norm = (a1 * a1 + a2 * a2).sqrt();
    if a_norm == 0.0 {
        return (0.0, 0.0);
    }
    let m = 2.0 * a_norm / (1.0 + (1.0 + 4.0 * c * a_norm).sqrt());
    let scale = 1.0 + c * m;
    (a1 / scale, a2 / scale)
}

/// Solve f(T) = h T / 2 + alpha(h, T) |v|^3 theta_dt T - S_sum = 0 for the
/// stress trace T = P11 + P22. `k` below is Cr |v|^3 theta_dt.
pub fn solve_trace(
    s_sum: f64,
    h: f64,
    speed3: f64,
    theta_dt: f64,
    params: &ModelParams,
) -> Result<f64> {
    if !(s_sum > 0.0) {
        return Err(Error::NegativeEnergyTrace { s_sum, h, theta_dt });
    }
    let t_hat = 2.0 * s_sum / h;
    let phi_h2 = params.phi * h * h;
    if t_hat <= phi_h2 {
        return Ok(t_hat);
    }
    let k = params.cr * speed3 * theta_dt;
    if k == 0.0 {
        return Ok(t_hat);
    }
    // On (phi h^2, inf):  h T^2 / 2 + (k - S_sum) T - k phi h^2 = 0,
    // with a unique positive root there.
    let half_h = 0.5 * h;
    let b = k - s_sum;
    let disc = (b * b + 4.0 * half_h * k * phi_h2).sqrt();
    let t = (-b + disc) / (2.0 * half_h);
    Ok(t)
}

/// The residual f(T) used by [`solve_trace`]; exposed so callers can verify
/// the root and its bracketing.
pub fn trace_residual(
    t: f64,
    s_sum: f64,
    h: f64,
    speed3: f64,
    theta_dt: f64,
    params: &ModelParams,
) -> f64 {
    0.5 * h * t + alpha_coeff(h, t, params) * speed3 * theta_dt * t - s_sum
}

/// Exact per-cell solve of U - theta_dt * S(U) = U~.
pub fn implicit_source_update(input: &ImplicitUpdateInput) -> Result<ConservedState> {
    let u_tilde = input.u_tilde;
    let p = &input.params;
    let theta_dt = input.theta_dt;
    if theta_dt == 0.0 {
        return Ok(u_tilde);
    }
    let h = u_tilde.h;
    if !(h > 0.0) {
        return Err(Error::NonPhysicalState {
            component: "h",
            value: h,
            state: u_tilde.to_array(),
        });
    }

    // Momentum block.
    let a1 = u_tilde.m1 - theta_dt * p.g * h * input.dbdx;
    let a2 = u_tilde.m2 - theta_dt * p.g * h * input.dbdy;
    let c = theta_dt * p.cf / (h * h);
    let (m1, m2) = solve_momentum(a1, a2, c);
    let v1 = m1 / h;
    let v2 = m2 / h;
    let speed = (v1 * v1 + v2 * v2).sqrt();
    let speed3 = speed * speed * speed;

    // Stress block: right-hand sides of the P equations with the solved
    // velocity.
    let s11 = u_tilde.e11
        - 0.5 * h * v1 * v1
        - theta_dt * (p.g * h * v1 * input.dbdx + p.cf * speed * v1 * v1);
    let s22 = u_tilde.e22
        - 0.5 * h * v2 * v2
        - theta_dt * (p.g * h * v2 * input.dbdy + p.cf * speed * v2 * v2);
    let s12 = u_tilde.e12
        - 0.5 * h * v1 * v2
        - theta_dt
            * (0.5 * p.g * h * v2 * input.dbdx
                + 0.5 * p.g * h * v1 * input.dbdy
                + p.cf * speed * v1 * v2);

    let trace = solve_trace(s11 + s22, h, speed3, theta_dt, p)?;
    let alpha = alpha_coeff(h, trace, p);
    let denom = 0.5 * h + alpha * speed3 * theta_dt;
    let p11 = s11 / denom;
    let p22 = s22 / denom;
    let p12 = s12 / denom;

    let out = ConservedState::new(
        h,
        m1,
        m2,
        0.5 * h * p11 + 0.5 * h * v1 * v1,
        0.5 * h * p12 + 0.5 * h * v1 * v2,
        0.5 * h * p22 + 0.5 * h * v2 * v2,
    );
    out.validate()?;
    Ok(out)
}

/// Fixed-point residual U - theta_dt S(U) - U~ of an implicit update result.
pub fn implicit_residual(result: &ConservedState, input: &ImplicitUpdateInput) -> [f64; 6] {
    let s = source_terms(result, input.dbdx, input.dbdy, &input.params);
    let r = result.to_array();
    let t = input.u_tilde.to_array();
    let mut res = [0.0; 6];
    for i in 0..6 {
        res[i] = r[i] - input.theta_dt * s[i] - t[i];
    }
    res
}
