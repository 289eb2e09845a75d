use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::operators::Resolvent;

use super::functional::ConstraintFunctional;

pub const DEFAULT_H0: f64 = 1e-2;
pub const DEFAULT_LEVELS: usize = 9;

/// `h₀·2⁻ᵏ` for `k = 0..levels`.
pub fn dyadic_schedule(h0: f64, levels: usize) -> Vec<f64> {
    (0..levels).map(|k| h0 * 0.5f64.powi(k as i32)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ADerivative {
    /// Lower Dini surrogate: the minimum quotient over the schedule.
    pub value: f64,
    /// `(h, q(h))`, one resolvent step of size `h`.
    pub quotients: Vec<(f64, f64)>,
    /// Quotients from two half steps, aligned with `quotients`.
    pub refined: Vec<f64>,
    /// Richardson extrapolation `2q(h_min) − q(2h_min)`.
    pub extrapolated: f64,
    /// `2|value − extrapolated| + |q(h_min) − q₂(h_min)|`, floored at 1e-9.
    pub error_bound: f64,
}

/// Estimates `D_A V(x; v) = liminf_{h↓0} (V(J_h(x + hv)) − V(x))/h`.
pub fn a_derivative(
    op: &dyn Resolvent,
    v_fn: &ConstraintFunctional,
    x: &GridFunction,
    v: &GridFunction,
    schedule: &[f64],
) -> Result<ADerivative> {
    a_derivative_at(op, v_fn, 0.0, x, v, schedule)
}

/// As [`a_derivative`], for the time-dependent functional `V(t, ·)`.
pub fn a_derivative_at(
    op: &dyn Resolvent,
    v_fn: &ConstraintFunctional,
    t: f64,
    x: &GridFunction,
    v: &GridFunction,
    schedule: &[f64],
) -> Result<ADerivative> {
    let mut hs: Vec<f64> = schedule.to_vec();
    if hs.len() < 2 || hs.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
        return Err(Error::InvalidSpec(
            "derivative schedule needs at least two positive steps".into(),
        ));
    }
    hs.sort_by(|a, b| b.total_cmp(a));
    let lmax = op.lambda_max();
    if hs[0] >= lmax {
        return Err(Error::StepTooLarge {
            lambda: hs[0],
            max: lmax,
        });
    }
    let v0 = v_fn.eval_at(t, x)?;
    let mut quotients = Vec::with_capacity(hs.len());
    let mut refined = Vec::with_capacity(hs.len());
    for &h in &hs {
        let one = op.resolve(h, &x.axpy(h, v)?)?;
        quotients.push((h, (v_fn.eval_at(t, &one)? - v0) / h));
        let half = 0.5 * h;
        let w = op.resolve(half, &x.axpy(half, v)?)?;
        let w2 = op.resolve(half, &w.axpy(half, v)?)?;
        refined.push((v_fn.eval_at(t, &w2)? - v0) / h);
    }
    let value = quotients.iter().map(|q| q.1).fold(f64::INFINITY, f64::min);
    let n = quotients.len();
    let q_min = quotients[n - 1].1;
    let q_prev = quotients[n - 2].1;
    // Richardson for a first-order error in h, assuming consecutive steps halve.
    let ratio = quotients[n - 2].0 / quotients[n - 1].0;
    let extrapolated = (ratio * q_min - q_prev) / (ratio - 1.0);
    let error_bound = (2.0 * (value - extrapolated).abs() + (q_min - refined[n - 1]).abs()).max(1e-9);
    if !value.is_finite() {
        return Err(Error::InvalidSpec(format!("non-finite derivative quotient {value}")));
    }
    Ok(ADerivative {
        value,
        quotients,
        refined,
        extrapolated,
        error_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::NormTag;
    use crate::operators::{ScaledIdentity, ZeroOperator};

    fn sq_norm() -> ConstraintFunctional {
        ConstraintFunctional::custom("sq", |_, u: &GridFunction| u.values().iter().map(|v| v * v).sum(), None)
    }

    #[test]
    fn zero_operator_orthogonal_direction() {
        let op = ZeroOperator { norm: NormTag::L2 };
        let x = GridFunction::vector(vec![1.0, 0.0], NormTag::L2).unwrap();
        let v = GridFunction::vector(vec![0.0, 1.0], NormTag::L2).unwrap();
        let d = a_derivative(&op, &sq_norm(), &x, &v, &dyadic_schedule(DEFAULT_H0, DEFAULT_LEVELS)).unwrap();
        // q(h) = h exactly.
        assert!(d.value.abs() < 1e-4);
        assert!(d.extrapolated.abs() < 1e-9);
    }

    #[test]
    fn identity_decay() {
        let op = ScaledIdentity {
            rate: 1.0,
            norm: NormTag::Sup,
        };
        let x = GridFunction::scalar(1.0, NormTag::Sup);
        let v = GridFunction::scalar(0.0, NormTag::Sup);
        let d = a_derivative(&op, &sq_norm(), &x, &v, &dyadic_schedule(DEFAULT_H0, DEFAULT_LEVELS)).unwrap();
        assert!((d.value + 2.0).abs() < 1e-3);
        assert!((d.extrapolated + 2.0).abs() < 1e-6);
        assert!((d.value + 2.0).abs() <= d.error_bound);
    }

    #[test]
    fn rejects_degenerate_schedule() {
        let op = ZeroOperator { norm: NormTag::Sup };
        let x = GridFunction::scalar(1.0, NormTag::Sup);
        assert!(a_derivative(&op, &sq_norm(), &x, &x, &[1e-2]).is_err());
    }
}
