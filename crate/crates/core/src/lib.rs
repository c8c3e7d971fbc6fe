//! Path-conservative finite volume solver for the shear shallow water
//! equations.
//!
//! The model evolves U = (h, h v1, h v2, E11, E12, E22), a shallow water
//! system extended with the depth-integrated stress of vertical shear. Its
//! non-conservative part involves only depth gradients, which permits
//! HLL-type Riemann solvers built on generalized Rankine-Hugoniot conditions
//! along a linear path: a two-wave HLL solver, a three-wave solver resolving
//! the contact, and a five-wave solver resolving both shear waves. Time
//! stepping is first order or MUSCL-Hancock second order, with friction,
//! topography and dissipation sources handled by an exact local
//! semi-implicit solve.

pub mod analysis;
pub mod cases;
pub mod config;
pub mod driver;
pub mod error;
pub mod grid;
pub mod integrator;
pub mod model;
pub mod riemann;
pub mod snapshot;
pub mod source_solver;
pub mod state;

pub use error::{Error, Result};
pub use grid::{apply_bc, BcKind, BoundarySpec, ExactField, Grid2D};
pub use integrator::{advance, compute_dt, Order, StepControls};
pub use riemann::SolverKind;
pub use state::{cons_to_prim, prim_to_cons, ConservedState, ModelParams, PrimitiveState};
