//! Brackets, resolvent time stepping, and integral-solution diagnostics.

mod benilan;
mod bracket;
mod stepping;

pub use benilan::{benilan_residual, benilan_residual_bracket, integral_inequality_residual};
pub use bracket::{bracket, Side};
pub(crate) use stepping::{check_ceiling, Stepper};
pub use stepping::{
    crandall_liggett, implicit_euler_step, solve_integral, IntegralOptions, Picard, StepMeta, Trajectory,
    DEFAULT_BLOW_UP_CEILING,
};
