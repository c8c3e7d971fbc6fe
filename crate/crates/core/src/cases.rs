//! Test-case registry: initial data, boundary conditions, parameters and
//! default run times for the bundled experiments.

use crate::error::{Error, Result};
use crate::grid::{BcKind, BoundarySpec, ExactField, Grid2D};
use crate::state::{ModelParams, PrimitiveState};
use std::collections::BTreeMap;

pub const GRAVITY: f64 = 9.81;

/// Registered case names, in listing order.
pub const CASE_NAMES: [&str; 7] = [
    "shear1d",
    "dambreak1d",
    "moddambreak1d",
    "rollwave1d_case1",
    "rollwave1d_case2",
    "analytic2d",
    "rollwave2d",
];

/// One-line description per case for the CLI listing.
pub fn case_summary(name: &str) -> Option<&'static str> {
    Some(match name {
        "shear1d" => "1-D transverse-velocity jump producing two shear waves",
        "dambreak1d" => "1-D dam break: rarefaction, contact and shock",
        "moddambreak1d" => "1-D dam break with an extra transverse-velocity jump",
        "rollwave1d_case1" => "1-D roll waves on an incline (first parameter set)",
        "rollwave1d_case2" => "1-D roll waves on an incline (second parameter set)",
        "analytic2d" => "2-D closed-form solution for convergence studies",
        "rollwave2d" => "2-D roll waves with a transverse perturbation",
        _ => return None,
    })
}

/// Closed-form unsteady field used by `analytic2d`: spatially linear
/// velocity, uniform depth and stress decaying in time.
#[derive(Debug, Clone, Copy)]
pub struct Analytic2d {
    pub h0: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub beta: f64,
}

impl Default for Analytic2d {
    fn default() -> Self {
        Analytic2d {
            h0: 1.0,
            lambda: 0.1,
            gamma: 0.01,
            beta: 1e-3,
        }
    }
}

impl Analytic2d {
    pub fn eval(&self, x: f64, y: f64, t: f64) -> PrimitiveState {
        let bt = self.beta * t;
        let den = 1.0 + bt * bt;
        let h = self.h0 / den;
        let v1 = self.beta * (bt * x + y) / den;
        let v2 = self.beta * (-x + bt * y) / den;
        let p11 = (self.lambda + self.gamma * bt * bt) / (den * den);
        let p12 = (self.lambda - self.gamma) * bt / (den * den);
        let p22 = (self.gamma + self.lambda * bt * bt) / (den * den);
        PrimitiveState::new(h, v1, v2, h * p11, h * p12, h * p22)
    }
}

impl ExactField for Analytic2d {
    fn eval(&self, x: f64, y: f64, t: f64) -> PrimitiveState {
        Analytic2d::eval(self, x, y, t)
    }
}

/// Fully initialized case: grid with initial data, boundaries, physics and
/// the default final time.
pub struct CaseSetup {
    pub name: String,
    pub grid: Grid2D,
    pub bc: BoundarySpec,
    pub params: ModelParams,
    pub t_end: f64,
    pub exact: Option<Analytic2d>,
    pub has_sources: bool,
}

impl CaseSetup {
    /// Default source implicitness: explicit for source-free Riemann
    /// problems, implicit half step for second order with sources, fully
    /// implicit for first order with sources.
    pub fn default_theta(&self, order: u32) -> f64 {
        if !self.has_sources {
            0.0
        } else if order == 2 {
            0.5
        } else {
            1.0
        }
    }
}

/// Default (nx, ny) per case.
pub fn default_resolution(name: &str) -> Result<(usize, usize)> {
    Ok(match name {
        "shear1d" | "dambreak1d" | "moddambreak1d" => (500, 1),
        "rollwave1d_case1" | "rollwave1d_case2" => (500, 1),
        "analytic2d" => (40, 40),
        "rollwave2d" => (130, 50),
        other => return Err(Error::UnknownCase(other.into())),
    })
}

const GHOST: usize = 2;

struct OverrideSet<'a> {
    case: &'a str,
    map: &'a BTreeMap<String, f64>,
    allowed: &'a [&'a str],
}

impl<'a> OverrideSet<'a> {
    fn new(case: &'a str, map: &'a BTreeMap<String, f64>, allowed: &'a [&'a str]) -> Result<Self> {
        for key in map.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(Error::BadOverride {
                    key: key.clone(),
                    case: case.into(),
                });
            }
        }
        Ok(OverrideSet { case, map, allowed })
    }

    fn get(&self, key: &str, default: f64) -> f64 {
        debug_assert!(self.allowed.contains(&key), "{key} not allowed for {}", self.case);
        self.map.get(key).copied().unwrap_or(default)
    }
}

const MODEL_KEYS: [&str; 4] = ["params.g", "params.Cf", "params.Cr", "params.phi"];

fn model_params(ov: &OverrideSet) -> ModelParams {
    ModelParams::new(
        ov.get("params.g", GRAVITY),
        ov.get("params.Cf", 0.0),
        ov.get("params.Cr", 0.0),
        ov.get("params.phi", 0.0),
    )
}

/// Build a case by name. `nx`/`ny` default to [`default_resolution`];
/// overrides use dotted keys (`params.Cf`, `case.a`, ...).
pub fn init_case(
    name: &str,
    nx: Option<usize>,
    ny: Option<usize>,
    overrides: &BTreeMap<String, f64>,
) -> Result<CaseSetup> {
    let (dnx, dny) = default_resolution(name)?;
    let nx = nx.unwrap_or(dnx);
    let ny = ny.unwrap_or(dny);
    if nx == 0 || ny == 0 {
        return Err(Error::InvalidParameter("nx and ny must be >= 1".into()));
    }

    let setup = match name {
        "shear1d" => riemann_case_1d(
            name,
            nx,
            ny,
            overrides,
            10.0,
            |x| {
                let v2 = if x < 0.5 { 0.2 } else { -0.2 };
                let h = 0.01;
                PrimitiveState::new(h, 0.0, v2, h * 1e-4, 0.0, h * 1e-4)
            },
        )?,
        "dambreak1d" => riemann_case_1d(
            name,
            nx,
            ny,
            overrides,
            0.5,
            |x| {
                let h = if x < 0.5 { 0.02 } else { 0.01 };
                PrimitiveState::new(h, 0.0, 0.0, h * 1e-4, 0.0, h * 1e-4)
            },
        )?,
        "moddambreak1d" => riemann_case_1d(
            name,
            nx,
            ny,
            overrides,
            0.5,
            |x| {
                let h = if x < 0.5 { 0.01 } else { 0.02 };
                let v2 = if x < 0.5 { 0.2 } else { -0.2 };
                PrimitiveState::new(h, 0.1, v2, h * 4e-2, h * 1e-8, h * 4e-2)
            },
        )?,
        "rollwave1d_case1" => roll_wave_case(
            name,
            nx,
            ny,
            overrides,
            RollWaveDefaults {
                incline: 0.05011,
                cf: 0.0036,
                h0: 7.98e-3,
                a: 0.05,
                phi: 22.76,
                cr: 0.00035,
                lx: 1.3,
                ly: 0.0,
                t_end: 26.99,
                two_d: false,
            },
        )?,
        "rollwave1d_case2" => roll_wave_case(
            name,
            nx,
            ny,
            overrides,
            RollWaveDefaults {
                incline: 0.119528,
                cf: 0.0038,
                h0: 5.33e-3,
                a: 0.05,
                phi: 153.501,
                cr: 0.002,
                lx: 1.8,
                ly: 0.0,
                t_end: 26.35185,
                two_d: false,
            },
        )?,
        "rollwave2d" => roll_wave_case(
            name,
            nx,
            ny,
            overrides,
            RollWaveDefaults {
                incline: 0.05011,
                cf: 0.0036,
                h0: 7.98e-3,
                a: 0.05,
                phi: 22.76,
                cr: 0.00035,
                lx: 1.3,
                ly: 0.5,
                t_end: 5.0,
                two_d: true,
            },
        )?,
        "analytic2d" => {
            let ov = OverrideSet::new(name, overrides, &["params.g"])?;
            let params = ModelParams::inviscid(ov.get("params.g", GRAVITY));
            let exact = Analytic2d::default();
            let grid = Grid2D::new(
                nx,
                ny,
                0.0,
                0.0,
                10.0,
                10.0,
                GHOST,
                |x, y| exact.eval(x, y, 0.0),
                |_, _| (0.0, 0.0, 0.0),
            );
            CaseSetup {
                name: name.into(),
                grid,
                bc: BoundarySpec::uniform(BcKind::DirichletExact),
                params,
                t_end: 50.0,
                exact: Some(exact),
                has_sources: false,
            }
        }
        other => return Err(Error::UnknownCase(other.into())),
    };

    setup.params.validate()?;
    setup.grid.validate_interior()?;
    Ok(setup)
}

fn riemann_case_1d(
    name: &str,
    nx: usize,
    ny: usize,
    overrides: &BTreeMap<String, f64>,
    t_end: f64,
    init: impl Fn(f64) -> PrimitiveState,
) -> Result<CaseSetup> {
    if ny != 1 {
        return Err(Error::InvalidParameter(format!(
            "case '{name}' is one-dimensional (ny must be 1)"
        )));
    }
    let ov = OverrideSet::new(name, overrides, &MODEL_KEYS)?;
    let params = model_params(&ov);
    let dx = 1.0 / nx as f64;
    let grid = Grid2D::new(nx, 1, 0.0, 0.0, 1.0, dx, GHOST, |x, _| init(x), |_, _| {
        (0.0, 0.0, 0.0)
    });
    let has_sources = params.cf > 0.0 || params.cr > 0.0;
    Ok(CaseSetup {
        name: name.into(),
        grid,
        bc: BoundarySpec::uniform(BcKind::Transmissive),
        params,
        t_end,
        exact: None,
        has_sources,
    })
}

struct RollWaveDefaults {
    incline: f64,
    cf: f64,
    h0: f64,
    a: f64,
    phi: f64,
    cr: f64,
    lx: f64,
    ly: f64,
    t_end: f64,
    two_d: bool,
}

fn roll_wave_case(
    name: &str,
    nx: usize,
    ny: usize,
    overrides: &BTreeMap<String, f64>,
    d: RollWaveDefaults,
) -> Result<CaseSetup> {
    let allowed = [
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
    let allowed_1d = &allowed[..8];
    let ov = OverrideSet::new(
        name,
        overrides,
        if d.two_d { &allowed } else { allowed_1d },
    )?;
    let params = ModelParams::new(
        ov.get("params.g", GRAVITY),
        ov.get("params.Cf", d.cf),
        ov.get("params.Cr", d.cr),
        ov.get("params.phi", d.phi),
    );
    let incline = ov.get("case.incline", d.incline);
    let h0 = ov.get("case.h0", d.h0);
    let a = ov.get("case.a", d.a);
    let lx = ov.get("case.Lx", d.lx);
    let ly = if d.two_d { ov.get("case.Ly", d.ly) } else { 0.0 };
    if !(h0 > 0.0) || !(lx > 0.0) || (d.two_d && !(ly > 0.0)) {
        return Err(Error::InvalidParameter(
            "roll wave case needs positive h0 and domain lengths".into(),
        ));
    }
    if ny != 1 && !d.two_d {
        return Err(Error::InvalidParameter(format!(
            "case '{name}' is one-dimensional (ny must be 1)"
        )));
    }

    let slope = incline.tan();
    let v_base = (params.g * h0 * slope / params.cf).sqrt();
    let phi = params.phi;
    let two_d = d.two_d;
    let init = move |x: f64, y: f64| {
        let mut h = h0 * (1.0 + a * (2.0 * std::f64::consts::PI * x / lx).sin());
        if two_d {
            h = h0
                * (1.0
                    + a * (2.0 * std::f64::consts::PI * x / lx).sin()
                    + a * (2.0 * std::f64::consts::PI * y / ly).sin());
        }
        let p = 0.5 * phi * h * h;
        PrimitiveState::new(h, v_base, 0.0, h * p, 0.0, h * p)
    };
    let topo = move |x: f64, _: f64| (-x * slope, -slope, 0.0);

    let grid = if two_d {
        Grid2D::new(nx, ny, 0.0, 0.0, lx, ly, GHOST, init, topo)
    } else {
        let dx = lx / nx as f64;
        Grid2D::new(nx, 1, 0.0, 0.0, lx, dx, GHOST, init, topo)
    };
    Ok(CaseSetup {
        name: name.into(),
        grid,
        bc: BoundarySpec::uniform(BcKind::Periodic),
        params,
        t_end: d.t_end,
        exact: None,
        has_sources: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    #[test]
    fn shear1d_initial_values() {
        let setup = init_case("shear1d", Some(100), None, &BTreeMap::new()).unwrap();
        // x = 0.25 lies in the left state
        let j = (0.25 / setup.grid.dx - 0.5).round() as isize;
        let u = setup.grid.cell(j, 0);
        assert!((u.v2() - 0.2).abs() < 1e-15);
        assert!((u.h - 0.01).abs() < 1e-18);
        assert!(!setup.has_sources);
    }

    #[test]
    fn roll_wave_base_velocity() {
        let setup = init_case("rollwave1d_case1", Some(10), None, &BTreeMap::new()).unwrap();
        let expected = (GRAVITY * 7.98e-3 * 0.05011_f64.tan() / 0.0036).sqrt();
        let u = setup.grid.cell(0, 0);
        assert!((u.v1() - expected).abs() < 1e-14);
        assert!(setup.has_sources);
        // b = -x tan(theta) with analytic gradient
        let gi = setup.grid.idx(3, 0);
        assert!((setup.grid.topo.dbdx[gi] + 0.05011_f64.tan()).abs() < 1e-15);
    }

    #[test]
    fn rollwave2d_depth_formula() {
        let setup = init_case("rollwave2d", Some(26), Some(10), &BTreeMap::new()).unwrap();
        let g = &setup.grid;
        let (j, k) = (5isize, 3isize);
        let (x, y) = (g.cell_x(j), g.cell_y(k));
        let h0 = 7.98e-3;
        let expected = h0
            * (1.0
                + 0.05 * (2.0 * std::f64::consts::PI * x / 1.3).sin()
                + 0.05 * (2.0 * std::f64::consts::PI * y / 0.5).sin());
        assert!((g.cell(j, k).h - expected).abs() < 1e-17);
    }

    #[test]
    fn analytic2d_closed_form_values() {
        let exact = Analytic2d::default();
        let q = exact.eval(10.0, 10.0, 0.0);
        assert_eq!(q.h, 1.0);
        assert!((q.v1 - 0.01).abs() < 1e-18);
        assert!((q.v2 + 0.01).abs() < 1e-18);
        assert!((q.p11() - 0.1).abs() < 1e-15);
        assert!((q.p22() - 0.01).abs() < 1e-15);
        assert_eq!(q.p12(), 0.0);

        let origin = exact.eval(0.0, 0.0, 0.0);
        assert_eq!(origin.v1, 0.0);
        assert_eq!(origin.v2, 0.0);

        // 1 + beta^2 t^2 = 2 at t = 1000 for beta = 1e-3
        let late = exact.eval(3.0, 4.0, 1000.0);
        assert!((late.h - 0.5).abs() < 1e-15);
    }

    #[test]
    fn unknown_case_and_bad_override() {
        assert!(matches!(
            init_case("vortex9d", None, None, &BTreeMap::new()),
            Err(Error::UnknownCase(_))
        ));
        let mut ov = BTreeMap::new();
        ov.insert("case.a".to_string(), 0.1);
        assert!(matches!(
            init_case("dambreak1d", None, None, &ov),
            Err(Error::BadOverride { .. })
        ));
    }

    #[test]
    fn override_reaches_model_params() {
        let mut ov = BTreeMap::new();
        ov.insert("params.Cf".to_string(), 0.0072);
        let setup = init_case("rollwave1d_case1", Some(10), None, &ov).unwrap();
        assert_eq!(setup.params.cf, 0.0072);
        // base velocity follows the override
        let expected = (GRAVITY * 7.98e-3 * 0.05011_f64.tan() / 0.0072).sqrt();
        assert!((setup.grid.cell(0, 0).v1() - expected).abs() < 1e-14);
    }

    #[test]
    fn all_cases_initialize_validly() {
        for name in CASE_NAMES {
            let (nx, ny) = default_resolution(name).unwrap();
            let setup = init_case(
                name,
                Some((nx / 10).max(4)),
                Some((ny / 10).max(1)).filter(|_| ny > 1),
                &BTreeMap::new(),
            )
            .unwrap();
            setup.grid.validate_interior().unwrap();
            assert!(setup.t_end >= 0.0);
            assert!(case_summary(name).is_some());
        }
    }
}
