//! State vectors of the shear shallow water system and the transformations
//! between them.
//!
//! The conserved vector is U = (h, hv1, hv2, E11, E12, E22) where the energy
//! tensor components are E_ij = R_ij/2 + h v_i v_j / 2 and R_ij = h P_ij is
//! the integrated stress. Reconstruction and output work on the primitive
//! vector Q = (h, v1, v2, R11, R12, R22).

use crate::error::{Error, Result};
use std::ops::{Add, Mul, Sub};

/// Conserved cell state U = (h, hv1, hv2, E11, E12, E22).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservedState {
    /// Water depth [m].
    pub h: f64,
    /// x-momentum density h*v1 [m^2/s].
    pub m1: f64,
    /// y-momentum density h*v2 [m^2/s].
    pub m2: f64,
    pub e11: f64,
    pub e12: f64,
    pub e22: f64,
}

/// Primitive state Q = (h, v1, v2, R11, R12, R22) with R = h*P.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimitiveState {
    pub h: f64,
    pub v1: f64,
    pub v2: f64,
    pub r11: f64,
    pub r12: f64,
    pub r22: f64,
}

impl ConservedState {
    pub const ZERO: ConservedState = ConservedState {
        h: 0.0,
        m1: 0.0,
        m2: 0.0,
        e11: 0.0,
        e12: 0.0,
        e22: 0.0,
    };

    pub fn new(h: f64, m1: f64, m2: f64, e11: f64, e12: f64, e22: f64) -> Self {
        Self { h, m1, m2, e11, e12, e22 }
    }

    pub fn to_array(self) -> [f64; 6] {
        [self.h, self.m1, self.m2, self.e11, self.e12, self.e22]
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        Self::new(a[0], a[1], a[2], a[3], a[4], a[5])
    }

    pub fn v1(&self) -> f64 {
        self.m1 / self.h
    }

    pub fn v2(&self) -> f64 {
        self.m2 / self.h
    }

    pub fn r11(&self) -> f64 {
        2.0 * self.e11 - self.m1 * self.m1 / self.h
    }

    pub fn r12(&self) -> f64 {
        2.0 * self.e12 - self.m1 * self.m2 / self.h
    }

    pub fn r22(&self) -> f64 {
        2.0 * self.e22 - self.m2 * self.m2 / self.h
    }

    pub fn p11(&self) -> f64 {
        self.r11() / self.h
    }

    pub fn p12(&self) -> f64 {
        self.r12() / self.h
    }

    pub fn p22(&self) -> f64 {
        self.r22() / self.h
    }

    /// The quantities monitored during time stepping: h, R11, R22 strictly
    /// positive. det R is deliberately not part of the runtime monitor; the
    /// state between two shear waves is close to stress degeneracy and
    /// transiently crosses det R = 0 in partially resolved cells.
    pub fn validate_positivity(&self) -> Result<()> {
        if !(self.h > 0.0) {
            return Err(Error::NonPhysicalState {
                component: "h",
                value: self.h,
                state: self.to_array(),
            });
        }
        let r11 = self.r11();
        if !(r11 > 0.0) {
            return Err(Error::NonPhysicalState {
                component: "R11",
                value: r11,
                state: self.to_array(),
            });
        }
        let r22 = self.r22();
        if !(r22 > 0.0) {
            return Err(Error::NonPhysicalState {
                component: "R22",
                value: r22,
                state: self.to_array(),
            });
        }
        Ok(())
    }

    /// Check h > 0 and positive definiteness of the stress tensor, reporting
    /// the first offending component.
    pub fn validate(&self) -> Result<()> {
        self.validate_positivity()?;
        let det = self.r11() * self.r22() - self.r12() * self.r12();
        if !(det > 0.0) {
            return Err(Error::NonPhysicalState {
                component: "det R",
                value: det,
                state: self.to_array(),
            });
        }
        Ok(())
    }
}

impl PrimitiveState {
    pub fn new(h: f64, v1: f64, v2: f64, r11: f64, r12: f64, r22: f64) -> Self {
        Self { h, v1, v2, r11, r12, r22 }
    }

    pub fn to_array(self) -> [f64; 6] {
        [self.h, self.v1, self.v2, self.r11, self.r12, self.r22]
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        Self::new(a[0], a[1], a[2], a[3], a[4], a[5])
    }

    pub fn p11(&self) -> f64 {
        self.r11 / self.h
    }

    pub fn p12(&self) -> f64 {
        self.r12 / self.h
    }

    pub fn p22(&self) -> f64 {
        self.r22 / self.h
    }

    pub fn validate(&self) -> Result<()> {
        prim_to_cons(self).validate()
    }
}

/// U -> Q. Fails on a non-physical input.
pub fn cons_to_prim(u: &ConservedState) -> Result<PrimitiveState> {
    u.validate()?;
    Ok(cons_to_prim_unchecked(u))
}

/// U -> Q without the validity check; used in hot loops after the grid has
/// already been validated.
pub fn cons_to_prim_unchecked(u: &ConservedState) -> PrimitiveState {
    PrimitiveState {
        h: u.h,
        v1: u.m1 / u.h,
        v2: u.m2 / u.h,
        r11: u.r11(),
        r12: u.r12(),
        r22: u.r22(),
    }
}

/// Q -> U, the exact inverse of [`cons_to_prim`].
pub fn prim_to_cons(q: &PrimitiveState) -> ConservedState {
    ConservedState {
        h: q.h,
        m1: q.h * q.v1,
        m2: q.h * q.v2,
        e11: 0.5 * q.r11 + 0.5 * q.h * q.v1 * q.v1,
        e12: 0.5 * q.r12 + 0.5 * q.h * q.v1 * q.v2,
        e22: 0.5 * q.r22 + 0.5 * q.h * q.v2 * q.v2,
    }
}

impl Add for ConservedState {
    type Output = ConservedState;
    fn add(self, o: ConservedState) -> ConservedState {
        ConservedState::new(
            self.h + o.h,
            self.m1 + o.m1,
            self.m2 + o.m2,
            self.e11 + o.e11,
            self.e12 + o.e12,
            self.e22 + o.e22,
        )
    }
}

impl Sub for ConservedState {
    type Output = ConservedState;
    fn sub(self, o: ConservedState) -> ConservedState {
        ConservedState::new(
            self.h - o.h,
            self.m1 - o.m1,
            self.m2 - o.m2,
            self.e11 - o.e11,
            self.e12 - o.e12,
            self.e22 - o.e22,
        )
    }
}

impl Mul<f64> for ConservedState {
    type Output = ConservedState;
    fn mul(self, s: f64) -> ConservedState {
        ConservedState::new(
            self.h * s,
            self.m1 * s,
            self.m2 * s,
            self.e11 * s,
            self.e12 * s,
            self.e22 * s,
        )
    }
}

/// Physical model constants. Numerical knobs (order, CFL, limiter) live in
/// [`crate::integrator::StepControls`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Gravity [m/s^2].
    pub g: f64,
    /// Chezy friction coefficient.
    pub cf: f64,
    /// Dissipation constant.
    pub cr: f64,
    /// Stress calibration constant phi [1/s^2].
    pub phi: f64,
}

impl ModelParams {
    pub fn new(g: f64, cf: f64, cr: f64, phi: f64) -> Self {
        Self { g, cf, cr, phi }
    }

    /// Frictionless, dissipation-free parameter set.
    pub fn inviscid(g: f64) -> Self {
        Self::new(g, 0.0, 0.0, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g > 0.0) {
            return Err(Error::InvalidParameter(format!("g = {} must be > 0", self.g)));
        }
        for (name, v) in [("Cf", self.cf), ("Cr", self.cr), ("phi", self.phi)] {
            if !(v >= 0.0) {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be >= 0")));
            }
        }
        Ok(())
    }
}

/// Bottom elevation and its analytic gradient at cell centers.
///
/// Gradients are always supplied analytically from the case description; a
/// discontinuous b must never be differenced.
#[derive(Debug, Clone, Default)]
pub struct Topography {
    pub b: Vec<f64>,
    pub dbdx: Vec<f64>,
    pub dbdy: Vec<f64>,
}

impl Topography {
    pub fn flat(n: usize) -> Self {
        Self {
            b: vec![0.0; n],
            dbdx: vec![0.0; n],
            dbdy: vec![0.0; n],
        }
    }
}
