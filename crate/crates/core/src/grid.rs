//! Structured cell-centered grid with ghost layers and boundary conditions.

use crate::error::{Error, Result};
use crate::state::{prim_to_cons, ConservedState, PrimitiveState, Topography};

/// Time-dependent exact field used by Dirichlet boundaries (and by error
/// norms when available).
pub trait ExactField: Sync {
    fn eval(&self, x: f64, y: f64, t: f64) -> PrimitiveState;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BcKind {
    Periodic,
    Transmissive,
    DirichletExact,
}

/// Boundary condition per side. Periodic sides must be paired.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundarySpec {
    pub west: BcKind,
    pub east: BcKind,
    pub south: BcKind,
    pub north: BcKind,
}

impl BoundarySpec {
    pub fn uniform(kind: BcKind) -> Self {
        Self {
            west: kind,
            east: kind,
            south: kind,
            north: kind,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let paired = |a: BcKind, b: BcKind| {
            (a == BcKind::Periodic) == (b == BcKind::Periodic)
        };
        if !paired(self.west, self.east) || !paired(self.south, self.north) {
            return Err(Error::InvalidParameter(
                "periodic boundaries must be paired on opposite sides".into(),
            ));
        }
        Ok(())
    }
}

/// Cell-centered Cartesian grid. Cells are stored row-major including ghost
/// layers; interior indices run j in [0, nx), k in [0, ny).
#[derive(Debug, Clone)]
pub struct Grid2D {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub x0: f64,
    pub y0: f64,
    pub ghost: usize,
    pub cells: Vec<ConservedState>,
    pub topo: Topography,
    pub time: f64,
}

impl Grid2D {
    /// Build a grid over [x0, x0 + lx] x [y0, y0 + ly], evaluating `init` at
    /// every cell center (ghosts included) and `topo` for the bottom
    /// elevation and its analytic gradient.
    pub fn new(
        nx: usize,
        ny: usize,
        x0: f64,
        y0: f64,
        lx: f64,
        ly: f64,
        ghost: usize,
        init: impl Fn(f64, f64) -> PrimitiveState,
        topo: impl Fn(f64, f64) -> (f64, f64, f64),
    ) -> Self {
        assert!(nx >= 1 && ny >= 1 && ghost >= 2);
        let dx = lx / nx as f64;
        let dy = ly / ny as f64;
        let sx = nx + 2 * ghost;
        let sy = ny + 2 * ghost;
        let mut cells = Vec::with_capacity(sx * sy);
        let mut b = Vec::with_capacity(sx * sy);
        let mut dbdx = Vec::with_capacity(sx * sy);
        let mut dbdy = Vec::with_capacity(sx * sy);
        for kk in 0..sy {
            let k = kk as isize - ghost as isize;
            let y = y0 + (k as f64 + 0.5) * dy;
            for jj in 0..sx {
                let j = jj as isize - ghost as isize;
                let x = x0 + (j as f64 + 0.5) * dx;
                cells.push(prim_to_cons(&init(x, y)));
                let (bv, bx, by) = topo(x, y);
                b.push(bv);
                dbdx.push(bx);
                dbdy.push(by);
            }
        }
        Grid2D {
            nx,
            ny,
            dx,
            dy,
            x0,
            y0,
            ghost,
            cells,
            topo: Topography { b, dbdx, dbdy },
            time: 0.0,
        }
    }

    #[inline]
    pub fn stride(&self) -> usize {
        self.nx + 2 * self.ghost
    }

    /// Flat index of cell (j, k); ghost cells are addressed with negative or
    /// past-the-end indices.
    #[inline]
    pub fn idx(&self, j: isize, k: isize) -> usize {
        debug_assert!(j >= -(self.ghost as isize) && j < (self.nx + self.ghost) as isize);
        debug_assert!(k >= -(self.ghost as isize) && k < (self.ny + self.ghost) as isize);
        (j + self.ghost as isize) as usize + (k + self.ghost as isize) as usize * self.stride()
    }

    #[inline]
    pub fn cell(&self, j: isize, k: isize) -> &ConservedState {
        &self.cells[self.idx(j, k)]
    }

    #[inline]
    pub fn cell_x(&self, j: isize) -> f64 {
        self.x0 + (j as f64 + 0.5) * self.dx
    }

    #[inline]
    pub fn cell_y(&self, k: isize) -> f64 {
        self.y0 + (k as f64 + 0.5) * self.dy
    }

    pub fn is_one_dimensional(&self) -> bool {
        self.ny == 1
    }

    /// Validate every interior cell, reporting the first failure with its
    /// location.
    pub fn validate_interior(&self) -> Result<()> {
        for k in 0..self.ny as isize {
            for j in 0..self.nx as isize {
                self.cell(j, k)
                    .validate()
                    .map_err(|e| e.at_cell(j, k, 0))?;
            }
        }
        Ok(())
    }

    /// Interior values of one primitive field in row-major order
    /// (x fastest). `field` indexes (h, v1, v2, P11, P12, P22).
    pub fn extract_primitive(&self, field: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.nx * self.ny);
        for k in 0..self.ny as isize {
            for j in 0..self.nx as isize {
                let u = self.cell(j, k);
                out.push(match field {
                    0 => u.h,
                    1 => u.v1(),
                    2 => u.v2(),
                    3 => u.p11(),
                    4 => u.p12(),
                    5 => u.p22(),
                    _ => panic!("field index out of range"),
                });
            }
        }
        out
    }
}

/// Fill ghost layers. Periodic sides wrap, transmissive sides copy the
/// nearest interior cell, Dirichlet sides evaluate the exact field at the
/// ghost centers and the current grid time. The x sweep runs first over
/// interior rows, then the y sweep over all columns so corners are filled.
pub fn apply_bc(
    grid: &mut Grid2D,
    spec: &BoundarySpec,
    exact: Option<&dyn ExactField>,
) -> Result<()> {
    spec.validate()?;
    let needs_exact = [spec.west, spec.east, spec.south, spec.north]
        .contains(&BcKind::DirichletExact);
    if needs_exact && exact.is_none() {
        return Err(Error::MissingExactField);
    }
    let g = grid.ghost as isize;
    let nx = grid.nx as isize;
    let ny = grid.ny as isize;
    let t = grid.time;

    let eval = |grid: &Grid2D, j: isize, k: isize| -> ConservedState {
        let f = exact.expect("checked above");
        prim_to_cons(&f.eval(grid.cell_x(j), grid.cell_y(k), t))
    };

    for k in 0..ny {
        for layer in 1..=g {
            let west_j = -layer;
            let value = match spec.west {
                BcKind::Periodic => *grid.cell(nx - layer, k),
                BcKind::Transmissive => *grid.cell(0, k),
                BcKind::DirichletExact => eval(grid, west_j, k),
            };
            let gi = grid.idx(west_j, k);
            grid.cells[gi] = value;

            let east_j = nx - 1 + layer;
            let value = match spec.east {
                BcKind::Periodic => *grid.cell(layer - 1, k),
                BcKind::Transmissive => *grid.cell(nx - 1, k),
                BcKind::DirichletExact => eval(grid, east_j, k),
            };
            let gi = grid.idx(east_j, k);
            grid.cells[gi] = value;
        }
    }
    for j in -g..nx + g {
        for layer in 1..=g {
            let south_k = -layer;
            let value = match spec.south {
                BcKind::Periodic => *grid.cell(j, ny - layer),
                BcKind::Transmissive => *grid.cell(j, 0),
                BcKind::DirichletExact => eval(grid, j, south_k),
            };
            let gi = grid.idx(j, south_k);
            grid.cells[gi] = value;

            let north_k = ny - 1 + layer;
            let value = match spec.north {
                BcKind::Periodic => *grid.cell(j, layer - 1),
                BcKind::Transmissive => *grid.cell(j, ny - 1),
                BcKind::DirichletExact => eval(grid, j, north_k),
            };
            let gi = grid.idx(j, north_k);
            grid.cells[gi] = value;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_grid(nx: usize) -> Grid2D {
        Grid2D::new(
            nx,
            1,
            0.0,
            0.0,
            1.0,
            1.0 / nx as f64,
            2,
            |x, _| PrimitiveState::new(1.0 + x, 0.0, 0.0, 1.0, 0.0, 1.0),
            |_, _| (0.0, 0.0, 0.0),
        )
    }

    #[test]
    fn periodic_wrap_matches_definition() {
        // cells [A, B, C], ghost 2 -> left ghosts [B, C], right ghosts [A, B]
        let mut grid = tiny_grid(3);
        let spec = BoundarySpec::uniform(BcKind::Periodic);
        apply_bc(&mut grid, &spec, None).unwrap();
        let a = grid.cell(0, 0).h;
        let b = grid.cell(1, 0).h;
        let c = grid.cell(2, 0).h;
        assert_eq!(grid.cell(-2, 0).h, b);
        assert_eq!(grid.cell(-1, 0).h, c);
        assert_eq!(grid.cell(3, 0).h, a);
        assert_eq!(grid.cell(4, 0).h, b);
    }

    #[test]
    fn transmissive_copies_nearest_interior() {
        let mut grid = tiny_grid(4);
        let spec = BoundarySpec::uniform(BcKind::Transmissive);
        apply_bc(&mut grid, &spec, None).unwrap();
        assert_eq!(grid.cell(-1, 0), grid.cell(0, 0));
        assert_eq!(grid.cell(-2, 0), grid.cell(0, 0));
        assert_eq!(grid.cell(4, 0), grid.cell(3, 0));
        assert_eq!(grid.cell(5, 0), grid.cell(3, 0));
    }

    #[test]
    fn apply_bc_is_idempotent() {
        let mut grid = tiny_grid(5);
        let spec = BoundarySpec::uniform(BcKind::Periodic);
        apply_bc(&mut grid, &spec, None).unwrap();
        let snapshot = grid.cells.clone();
        apply_bc(&mut grid, &spec, None).unwrap();
        assert_eq!(snapshot.len(), grid.cells.len());
        for (a, b) in snapshot.iter().zip(grid.cells.iter()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn unpaired_periodic_rejected() {
        let spec = BoundarySpec {
            west: BcKind::Periodic,
            east: BcKind::Transmissive,
            south: BcKind::Transmissive,
            north: BcKind::Transmissive,
        };
        assert!(spec.validate().is_err());
    }

    #[test]
    fn dirichlet_without_field_is_an_error() {
        let mut grid = tiny_grid(3);
        let spec = BoundarySpec::uniform(BcKind::DirichletExact);
        assert!(matches!(
            apply_bc(&mut grid, &spec, None),
            Err(Error::MissingExactField)
        ));
    }
}
