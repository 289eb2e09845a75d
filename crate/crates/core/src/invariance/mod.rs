//! Constraint functionals, directional derivatives, hypothesis checks and
//! trajectory monitors for invariance of `K = {V ≤ 0}`.

mod conditions;
mod derivative;
mod functional;
mod impulsive;
mod monitor;
mod omega;
mod pointwise;
mod report;
mod slow;

pub use conditions::{
    limsup_probe, verify_problem_conditions, ConditionReport, LimsupProbe, Problem, Side, NODE_TOL, PROBE_EXPONENTS,
};
pub use derivative::{a_derivative, a_derivative_at, dyadic_schedule, ADerivative, DEFAULT_H0, DEFAULT_LEVELS};
pub use functional::{ConstraintFunctional, FunctionalFn, FunctionalKind, GradientFn, QUAD_EXIT_TOL, SUP_EXIT_TOL};
pub use impulsive::{simulate_impulsive, Barrier, ImpulsiveOptions, ImpulsiveRun, Jump, TauFn};
pub use monitor::{monitor, monitor_with_tol, MonitorReport};
pub use omega::{OmegaForm, OmegaFunction};
pub use pointwise::{
    bump_profiles, check_pointwise_condition, perturbation_family, Region, Sample, SampleOptions, POINTWISE_TOL,
    REGION_MARGIN,
};
pub use report::{CertReport, Verdict, Witness, MAX_WITNESSES};
pub use slow::{certify_slow, SlowGrid};
