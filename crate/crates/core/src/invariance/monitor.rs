use crate::error::{Error, Result};
use crate::semigroup::Trajectory;

use super::functional::ConstraintFunctional;

#[derive(Debug, Clone, PartialEq)]
pub struct MonitorReport {
    pub times: Vec<f64>,
    /// `V(tₖ, u(tₖ))`.
    pub v_series: Vec<f64>,
    /// Forward difference quotients of `V` along the trajectory, one per step.
    pub dini: Vec<f64>,
    pub exit_tol: f64,
    /// First `(t, V)` with `V > exit_tol`.
    pub first_exit: Option<(f64, f64)>,
    pub max_v: f64,
}

impl MonitorReport {
    pub fn stayed_inside(&self) -> bool {
        self.first_exit.is_none()
    }
}

/// Evaluates `V` along a trajectory with the functional's default exit tolerance.
pub fn monitor(traj: &Trajectory, v_fn: &ConstraintFunctional) -> Result<MonitorReport> {
    monitor_with_tol(traj, v_fn, v_fn.exit_tol())
}

pub fn monitor_with_tol(traj: &Trajectory, v_fn: &ConstraintFunctional, exit_tol: f64) -> Result<MonitorReport> {
    if traj.is_empty() {
        return Err(Error::EmptySeries);
    }
    let times = traj.times().to_vec();
    let v_series = times
        .iter()
        .zip(traj.states())
        .map(|(t, u)| v_fn.eval_at(*t, u))
        .collect::<Result<Vec<f64>>>()?;
    let dini = times
        .windows(2)
        .zip(v_series.windows(2))
        .map(|(t, v)| (v[1] - v[0]) / (t[1] - t[0]))
        .collect();
    let first_exit = times
        .iter()
        .zip(&v_series)
        .find(|(_, v)| !(**v <= exit_tol))
        .map(|(t, v)| (*t, *v));
    let max_v = v_series.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(MonitorReport {
        times,
        v_series,
        dini,
        exit_tol,
        first_exit,
        max_v,
    })
}
