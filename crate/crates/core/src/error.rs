use thiserror::Error;

use crate::expr::{EvalError, ParseError};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite value at node {node}")]
    NonFinite { node: usize },

    #[error("dirichlet-zero boundary violated at node {node} (value {value})")]
    DirichletViolation { node: usize, value: f64 },

    #[error("step size {lambda} exceeds the admissible maximum {max}")]
    StepTooLarge { lambda: f64, max: f64 },

    #[error("newton solver did not converge after {iterations} iterations (residual {residual:e})")]
    NewtonDiverged {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("conjugate gradient did not converge after {iterations} iterations (residual {residual:e})")]
    CgDiverged { iterations: usize, residual: f64 },

    #[error("blow-up at t = {time}: state norm {norm:e} exceeds ceiling {ceiling:e}")]
    BlowUp { time: f64, norm: f64, ceiling: f64 },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("empty series")]
    EmptySeries,

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Eval(#[from] EvalError),

    #[error("config error (line {line}): {message}")]
    Config { line: usize, message: String },

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// Innermost error, with any [`Error::Context`] wrappers removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }

    /// True for errors produced by numerical solvers rather than by bad input.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self.root(),
            Error::NewtonDiverged { .. } | Error::CgDiverged { .. } | Error::BlowUp { .. }
        )
    }
}
