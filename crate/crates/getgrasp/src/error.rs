use thiserror::Error;

/// Errors produced by grasp construction and analysis.
///
/// Scenario-file schema errors are reported separately by
/// [`crate::scenario::SchemaError`] so that the CLI can map them to their
/// own exit code.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum GraspError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{what} out of range: {value} not in [{min}, {max}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("no lever arm defined for a flat finger pair")]
    NoLeverArm,

    #[error("object exceeds gripper capacity: {0}")]
    ObjectExceedsCapacity(String),

    #[error("no contact: object outside finger footprints")]
    NoContact,

    #[error("unstable pose: equilibrium residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    UnstablePose { residual: f64, tolerance: f64 },

    #[error("gel bottom-out: indentation {depth} mm exceeds gel thickness {max_indent} mm")]
    GelBottomOut { depth: f64, max_indent: f64 },

    #[error("empty contact set")]
    EmptyContactSet,

    #[error("linear program unbounded (internal error): {0}")]
    LpUnbounded(String),

    #[error("unknown sweep parameter: {0}")]
    UnknownParameter(String),
}

pub type Result<T> = std::result::Result<T, GraspError>;
