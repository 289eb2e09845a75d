use crate::error::{Error, Result};
use crate::grid::GridFunction;

use super::bracket::{bracket, Side};
use super::stepping::Trajectory;

fn check_time_grids(u1: &Trajectory, u2: &Trajectory) -> Result<()> {
    if u1.times() != u2.times() {
        return Err(Error::GridMismatch(format!(
            "time grids differ ({} vs {} points)",
            u1.len(),
            u2.len()
        )));
    }
    u1.states()[0].ensure_compatible(&u2.states()[0])
}

/// `max_{s ≤ t} (a_t − I_t) − (a_s − I_s)` where `I` is the running trapezoid
/// integral of `b`. Linear in the number of grid points.
fn max_increment(times: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let mut integral = 0.0;
    let mut running_min = f64::INFINITY;
    let mut worst = f64::NEG_INFINITY;
    for k in 0..times.len() {
        if k > 0 {
            integral += 0.5 * (times[k] - times[k - 1]) * (b[k] + b[k - 1]);
        }
        let c = a[k] - integral;
        running_min = running_min.min(c);
        worst = worst.max(c - running_min);
    }
    worst
}

fn benilan_with(
    u1: &Trajectory,
    u2: &Trajectory,
    alpha: f64,
    integrand: impl Fn(&GridFunction, &GridFunction) -> Result<f64>,
) -> Result<f64> {
    check_time_grids(u1, u2)?;
    let n = u1.len();
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for k in 0..n {
        let decay = (-u1.times()[k] * alpha).exp();
        let du = u1.states()[k].sub(&u2.states()[k])?;
        let dw = u1.forcings()[k].sub(&u2.forcings()[k])?;
        a.push(decay * du.norm());
        b.push(decay * integrand(&du, &dw)?);
    }
    Ok(max_increment(u1.times(), &a, &b))
}

/// Largest violation of the Benilán inequality
/// `e^{−tα}‖u₁(t)−u₂(t)‖ ≤ e^{−sα}‖u₁(s)−u₂(s)‖ + ∫ₛᵗ e^{−zα}‖w₁−w₂‖ dz`
/// over grid pairs `s ≤ t`. Never negative (the pair `s = t` contributes 0).
pub fn benilan_residual(u1: &Trajectory, u2: &Trajectory, alpha: f64) -> Result<f64> {
    benilan_with(u1, u2, alpha, |_, dw| Ok(dw.norm()))
}

/// Sharper form with `[u₁−u₂, w₁−w₂]₊` in place of `‖w₁−w₂‖`.
pub fn benilan_residual_bracket(u1: &Trajectory, u2: &Trajectory, alpha: f64) -> Result<f64> {
    benilan_with(u1, u2, alpha, |du, dw| bracket(du, dw, Side::Plus))
}

/// Largest violation of the integral-solution inequality
/// `e^{−tα}‖u(t)−y‖ ≤ e^{−sα}‖u(s)−y‖ + ∫ₛᵗ e^{−zα}[u(z)−y, w(z)−v]₊ dz`
/// over grid pairs `s ≤ t` and the supplied graph pairs `(y, v)`, `v ∈ Ay`.
pub fn integral_inequality_residual(
    u: &Trajectory,
    graph_pairs: &[(GridFunction, GridFunction)],
    alpha: f64,
) -> Result<f64> {
    let mut worst = 0.0_f64;
    for (y, v) in graph_pairs {
        let n = u.len();
        let mut a = Vec::with_capacity(n);
        let mut b = Vec::with_capacity(n);
        for k in 0..n {
            let decay = (-u.times()[k] * alpha).exp();
            let du = u.states()[k].sub(y)?;
            let dw = u.forcings()[k].sub(v)?;
            du.ensure_compatible(&dw)?;
            a.push(decay * du.norm());
            b.push(decay * bracket(&du, &dw, Side::Plus)?);
        }
        worst = worst.max(max_increment(u.times(), &a, &b));
    }
    Ok(worst)
}
