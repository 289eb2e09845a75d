//! Independent reference solutions used to cross-check the main solvers.
//!
//! Nothing here calls into the resolvent machinery; the oracles are
//! deliberately simple closed forms or explicit marches.

mod explicit;
mod heat;
mod scalar;

pub use explicit::{fine_explicit_plaplace, ExplicitOptions, ExplicitRun};
pub use heat::{heat_first_eigenvalue, heat_spectral};
pub use scalar::{
    comparison_check, perron_max_solution, rk4_scalar, Comparison, PerronOptions, PerronSolution, ScalarTrajectory,
};
