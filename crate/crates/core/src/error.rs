//! Error type shared by all solver stages.

use thiserror::Error;

/// Failures raised by the solver. Numerical aborts carry enough context to
/// locate the offending cell; states are never clipped to paper over them.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("non-physical state: {component} = {value:e} (state = {state:?})")]
    NonPhysicalState {
        component: &'static str,
        value: f64,
        state: [f64; 6],
    },

    #[error("non-hyperbolic state: gh + 3*P11 = {radicand:e} < 0 (state = {state:?})")]
    NonHyperbolic { radicand: f64, state: [f64; 6] },

    #[error("degenerate Riemann fan: S_L = S_R = {speed:e}")]
    DegenerateFace { speed: f64 },

    #[error(
        "source solve has no positive stress trace: S11 + S22 = {s_sum:e} <= 0 \
         (h = {h:e}, theta*dt = {theta_dt:e})"
    )]
    NegativeEnergyTrace { s_sum: f64, h: f64, theta_dt: f64 },

    #[error(
        "positivity violation at step {step}, cell ({j}, {k}): {field} = {value:e} \
         (state = {state:?})"
    )]
    PositivityViolation {
        step: u64,
        j: usize,
        k: usize,
        field: &'static str,
        value: f64,
        state: [f64; 6],
    },

    #[error("cell ({j}, {k}) at step {step}: {source}")]
    AtCell {
        j: isize,
        k: isize,
        step: u64,
        source: Box<Error>,
    },

    #[error("field shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("unknown case '{0}'")]
    UnknownCase(String),

    #[error("override '{key}' is not applicable to case '{case}'")]
    BadOverride { key: String, case: String },

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dirichlet_exact boundary requested but the case has no exact solution")]
    MissingExactField,

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Wrap a per-cell failure with its grid location (ghost cells carry
    /// negative indices).
    pub fn at_cell(self, j: isize, k: isize, step: u64) -> Error {
        Error::AtCell {
            j,
            k,
            step,
            source: Box::new(self),
        }
    }
}
