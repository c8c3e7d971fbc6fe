//! Algebra of the shear shallow water system: fluxes, non-conservative
//! vectors, source terms, eigenvalues and diagnostic functionals.

use crate::error::{Error, Result};
use crate::state::{ConservedState, ModelParams};

/// Coordinate direction of a flux or eigenvalue evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Physical flux F1 (dir = X) or F2 (dir = Y).
pub fn physical_flux(u: &ConservedState, dir: Axis, g: f64) -> [f64; 6] {
    let h = u.h;
    let v1 = u.v1();
    let v2 = u.v2();
    let r11 = u.r11();
    let r12 = u.r12();
    let r22 = u.r22();
    match dir {
        Axis::X => [
            h * v1,
            r11 + h * v1 * v1 + 0.5 * g * h * h,
            r12 + h * v1 * v2,
            (u.e11 + r11) * v1,
            u.e12 * v1 + 0.5 * (r11 * v2 + r12 * v1),
            u.e22 * v1 + r12 * v2,
        ],
        Axis::Y => [
            h * v2,
            r12 + h * v1 * v2,
            r22 + h * v2 * v2 + 0.5 * g * h * h,
            u.e11 * v2 + r12 * v1,
            u.e12 * v2 + 0.5 * (r12 * v2 + r22 * v1),
            (u.e22 + r22) * v2,
        ],
    }
}

/// Non-conservative vector B1 or B2 multiplying the depth gradient. Linear in
/// the momentum density (m1, m2).
pub fn noncons_vector(m1: f64, m2: f64, dir: Axis, g: f64) -> [f64; 6] {
    match dir {
        Axis::X => [0.0, 0.0, 0.0, g * m1, 0.5 * g * m2, 0.0],
        Axis::Y => [0.0, 0.0, 0.0, 0.0, 0.5 * g * m1, g * m2],
    }
}

/// The six characteristic speeds along `dir`, sorted ascending:
/// v -+ sqrt(gh + 3P), v -+ sqrt(P), v, v  with P the normal stress component.
pub fn eigenvalues(u: &ConservedState, dir: Axis, g: f64) -> Result<[f64; 6]> {
    let (v, p) = match dir {
        Axis::X => (u.v1(), u.p11()),
        Axis::Y => (u.v2(), u.p22()),
    };
    let radicand = g * u.h + 3.0 * p;
    if radicand < 0.0 || p < 0.0 {
        return Err(Error::NonHyperbolic {
            radicand: radicand.min(p),
            state: u.to_array(),
        });
    }
    let a = radicand.sqrt();
    let c = p.sqrt();
    Ok([v - a, v - c, v, v, v + c, v + a])
}

/// Largest absolute characteristic speed along `dir`; used by the CFL
/// condition.
pub fn max_abs_eigenvalue(u: &ConservedState, dir: Axis, g: f64) -> Result<f64> {
    let lambda = eigenvalues(u, dir, g)?;
    Ok(lambda[0].abs().max(lambda[5].abs()))
}

/// Dissipation coefficient alpha = max(0, Cr (T - phi h^2) / T^2) with
/// T = tr(P). Returns 0 for T = 0 (the limit of the max expression).
pub fn alpha_coeff(h: f64, trace_p: f64, params: &ModelParams) -> f64 {
    if trace_p <= 0.0 {
        return 0.0;
    }
    (params.cr * (trace_p - params.phi * h * h) / (trace_p * trace_p)).max(0.0)
}

/// Source vector S(U): topography, Chezy friction and stress dissipation.
pub fn source_terms(u: &ConservedState, dbdx: f64, dbdy: f64, params: &ModelParams) -> [f64; 6] {
    let g = params.g;
    let cf = params.cf;
    let h = u.h;
    let v1 = u.v1();
    let v2 = u.v2();
    let p11 = u.p11();
    let p12 = u.p12();
    let p22 = u.p22();
    let speed = (v1 * v1 + v2 * v2).sqrt();
    let speed3 = speed * speed * speed;
    let alpha = alpha_coeff(h, p11 + p22, params);
    [
        0.0,
        -g * h * dbdx - cf * speed * v1,
        -g * h * dbdy - cf * speed * v2,
        -g * h * v1 * dbdx - alpha * speed3 * p11 - cf * speed * v1 * v1,
        -0.5 * g * h * v2 * dbdx - 0.5 * g * h * v1 * dbdy - alpha * speed3 * p12
            - cf * speed * v1 * v2,
        -g * h * v2 * dbdy - alpha * speed3 * p22 - cf * speed * v2 * v2,
    ]
}

/// Convex entropy eta = -h log(det R / h^4).
pub fn entropy(u: &ConservedState) -> f64 {
    let det = u.r11() * u.r22() - u.r12() * u.r12();
    -u.h * (det / u.h.powi(4)).ln()
}

/// Diagnostic "total energy" density h*e with e = |v|^2/2 + tr(P)/2 + g h^2/2.
///
/// The g h^2 / 2 term is dimensionally inconsistent with the kinetic and
/// stress terms; the quantity is reported verbatim as a diagnostic only and
/// plays no role in the scheme.
pub fn total_energy_density(u: &ConservedState, g: f64) -> f64 {
    let v1 = u.v1();
    let v2 = u.v2();
    let e = 0.5 * (v1 * v1 + v2 * v2) + 0.5 * (u.p11() + u.p22()) + 0.5 * g * u.h * u.h;
    u.h * e
}
