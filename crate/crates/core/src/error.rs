use thiserror::Error;

/// Errors raised by the lab.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter or configuration field is outside its admissible range.
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    /// Newton's method failed to reach the tolerance after the whole regularization schedule.
    #[error(
        "newton did not converge at time step {step} (t = {time}): last residual {residual:.3e}"
    )]
    NewtonDiverged {
        step: usize,
        time: f64,
        residual: f64,
    },

    /// The linear solver inside a Newton step failed.
    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    /// A set built from a cylinder or a level has no grid nodes.
    #[error("empty grid intersection: {0}")]
    EmptyIntersection(String),

    /// A precondition of an estimate or an operation does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A bracketing root finder has no sign change in its bracket.
    #[error("no root in bracket: {0}")]
    NoRoot(String),

    /// A computed chain of inequalities is violated.
    #[error("invariant violated at index {index}: {what}")]
    Invariant { index: usize, what: String },

    /// A value is not representable in the chosen number format.
    #[error("value not representable: {0}")]
    Unrepresentable(String),

    /// One solve of an ε-sweep failed; the sweep stops there.
    #[error("sweep run at eps = {eps} failed: {source}")]
    SweepRun {
        eps: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
