use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} is outside the domain of the function: {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("{0} overflows the double-precision range")]
    Overflow(String),

    #[error("{0} underflows the double-precision range")]
    Underflow(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("length mismatch: grid has {expected} nodes, samples have {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("grid would need {nodes} nodes, above the configured cap of {cap}")]
    GridTooLarge { nodes: usize, cap: usize },

    #[error("d/dr G is discontinuous on the diagonal r = s = {0}; use a one-sided evaluation")]
    DiagonalDerivative(f64),

    #[error("fixed-point iteration is not contracting: update grew for {streak} consecutive iterations (last update {update:e})")]
    NonContraction { streak: usize, update: f64 },

    #[error("density lost positivity at r = {r}: rho = {rho}")]
    Positivity { r: f64, rho: f64 },

    #[error("Newton iteration diverged after {iterations} steps (residual {residual:e})")]
    NewtonDivergence { iterations: usize, residual: f64 },

    #[error("decay fit window is empty: no samples above the floor in [{lo}, {hi}]")]
    EmptyWindow { lo: f64, hi: f64 },

    #[error("no boundary value on the stable manifold matches slope {slope}: {reason}")]
    NoRoot { slope: f64, reason: String },

    #[error("step size collapsed to {step:e} at y = {y}")]
    StepCollapse { step: f64, y: f64 },

    #[error("no norms selected")]
    NoNormsSelected,

    #[error("rate study needs at least {needed} successful kappa values, got {got}")]
    TooFewPoints { needed: usize, got: usize },
}
