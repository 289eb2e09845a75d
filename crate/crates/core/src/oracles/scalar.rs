use crate::error::{Error, Result};

/// Scalar time series on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarTrajectory {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl ScalarTrajectory {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::EmptySeries);
        }
        if times.len() != values.len() {
            return Err(Error::InvalidSpec(format!(
                "{} times for {} values",
                times.len(),
                values.len()
            )));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidSpec("times must be strictly increasing".into()));
        }
        Ok(ScalarTrajectory { times, values })
    }

    pub fn last(&self) -> f64 {
        *self.values.last().expect("nonempty")
    }
}

/// Classical fourth-order Runge–Kutta for `ẋ = rhs(x)` with `t_k = T·k/steps`.
pub fn rk4_scalar(rhs: impl Fn(f64) -> f64, x0: f64, t_end: f64, steps: usize) -> ScalarTrajectory {
    let h = t_end / steps as f64;
    let mut times = Vec::with_capacity(steps + 1);
    let mut values = Vec::with_capacity(steps + 1);
    let mut x = x0;
    times.push(0.0);
    values.push(x);
    for k in 1..=steps {
        let k1 = rhs(x);
        let k2 = rhs(x + 0.5 * h * k1);
        let k3 = rhs(x + 0.5 * h * k2);
        let k4 = rhs(x + h * k3);
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        times.push(t_end * k as f64 / steps as f64);
        values.push(x);
    }
    ScalarTrajectory { times, values }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerronOptions {
    pub steps: usize,
    /// Decreasing lift parameters.
    pub eps_schedule: Vec<f64>,
    /// Lifted solutions above this value count as diverged.
    pub ceiling: f64,
}

impl Default for PerronOptions {
    fn default() -> Self {
        PerronOptions {
            steps: 20_000,
            eps_schedule: vec![1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8],
            ceiling: 1e8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerronSolution {
    /// Limit estimate of the lifted solutions (Aitken Δ² on the last three).
    pub limit: ScalarTrajectory,
    /// The smallest-ε lifted solution itself.
    pub last_iterate: ScalarTrajectory,
    /// Every lifted solution dominated the next one pointwise.
    pub monotone: bool,
    /// `|limit − last_iterate|`, the size of the extrapolation correction.
    pub extrapolation_gap: f64,
    /// Time at which a lifted solution crossed the ceiling; the series stop there.
    pub truncated_at: Option<f64>,
}

fn aitken(a: f64, b: f64, c: f64) -> f64 {
    let den = c - 2.0 * b + a;
    let num = (c - b) * (c - b);
    if num == 0.0 || den.abs() <= 1e-300 {
        return c;
    }
    let est = c - num / den;
    if est.is_finite() {
        est
    } else {
        c
    }
}

/// Maximal solution of `ẋ = ω(x)`, `x(0) = x0`, as the limit of the lifted
/// problems `ẏ = ω(y) + ε`, `y(0) = x0 + ε`.
pub fn perron_max_solution(
    omega: impl Fn(f64) -> f64,
    x0: f64,
    t_end: f64,
    opts: &PerronOptions,
) -> Result<PerronSolution> {
    if opts.eps_schedule.is_empty() || opts.eps_schedule.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidSpec(
            "epsilon schedule must be nonempty and decreasing".into(),
        ));
    }
    if !(t_end > 0.0) || opts.steps == 0 {
        return Err(Error::InvalidSpec("need T > 0 and steps >= 1".into()));
    }
    let runs: Vec<ScalarTrajectory> = opts
        .eps_schedule
        .iter()
        .map(|&eps| rk4_scalar(|y| omega(y) + eps, x0 + eps, t_end, opts.steps))
        .collect();

    let mut len = opts.steps + 1;
    let mut truncated_at = None;
    for r in &runs {
        if let Some(k) = r.values.iter().position(|v| !(v.abs() <= opts.ceiling)) {
            if k < len {
                len = k;
                truncated_at = Some(r.times[k]);
            }
        }
    }
    if len == 0 {
        return Err(Error::InvalidSpec("lifted solutions diverge immediately".into()));
    }

    let mut monotone = true;
    for pair in runs.windows(2) {
        for k in 0..len {
            if pair[1].values[k] > pair[0].values[k] + 1e-12 * (1.0 + pair[0].values[k].abs()) {
                monotone = false;
            }
        }
    }

    let times = runs[0].times[..len].to_vec();
    let last = &runs[runs.len() - 1];
    let limit: Vec<f64> = (0..len)
        .map(|k| match runs.len() {
            1 | 2 => last.values[k],
            n => aitken(runs[n - 3].values[k], runs[n - 2].values[k], runs[n - 1].values[k]),
        })
        .collect();
    let extrapolation_gap = (0..len).fold(0.0_f64, |m, k| m.max((limit[k] - last.values[k]).abs()));
    Ok(PerronSolution {
        limit: ScalarTrajectory {
            times: times.clone(),
            values: limit,
        },
        last_iterate: ScalarTrajectory {
            times,
            values: last.values[..len].to_vec(),
        },
        monotone,
        extrapolation_gap,
        truncated_at,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub holds: bool,
    /// First index where `u` exceeds the bound: `(index, t, u, bound)`.
    pub witness: Option<(usize, f64, f64, f64)>,
}

/// Checks `u ≤ x_max + 1e−9` pointwise on a shared time grid.
pub fn comparison_check(u: &ScalarTrajectory, x_max: &ScalarTrajectory) -> Result<Comparison> {
    let same = u.times.len() == x_max.times.len()
        && u.times
            .iter()
            .zip(&x_max.times)
            .all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(1.0));
    if !same {
        return Err(Error::GridMismatch(format!(
            "comparison needs a shared time grid ({} vs {} points)",
            u.times.len(),
            x_max.times.len()
        )));
    }
    let witness = u
        .values
        .iter()
        .zip(&x_max.values)
        .enumerate()
        .find(|(_, (a, b))| **a > **b + 1e-9)
        .map(|(k, (a, b))| (k, u.times[k], *a, *b));
    Ok(Comparison {
        holds: witness.is_none(),
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rk4_constant_and_exponential() {
        let c = rk4_scalar(|_| 0.0, 3.0, 1.0, 10);
        assert!(c.values.iter().all(|&v| v == 3.0));
        let e = rk4_scalar(|x| x, 1.0, 1.0, 100);
        assert!((e.last() - std::f64::consts::E).abs() < 1e-9);
    }

    #[test]
    fn rk4_is_fourth_order() {
        let err = |n| (rk4_scalar(|x| x, 1.0, 1.0, n).last() - std::f64::consts::E).abs();
        assert!(err(20) / err(40) >= 14.0);
    }

    #[test]
    fn rk4_square_root_growth() {
        let eps: f64 = 1e-4;
        let r = rk4_scalar(|x| 2.0 * x.max(0.0).sqrt(), eps, 1.0, 2000);
        assert!((r.last() - (1.0 + eps.sqrt()).powi(2)).abs() < 1e-6);
    }

    #[test]
    fn perron_trivial_and_linear() {
        let z = perron_max_solution(|_| 0.0, 1.0, 1.0, &PerronOptions::default()).unwrap();
        assert!(z.limit.values.iter().all(|v| (v - 1.0).abs() < 1e-10));
        let e = perron_max_solution(|x| x, 1.0, 1.0, &PerronOptions::default()).unwrap();
        assert!((e.limit.last() - std::f64::consts::E).abs() < 1e-6);
        assert!(e.monotone);
    }

    #[test]
    fn perron_divergence_truncates() {
        let r = perron_max_solution(|x| x * x, 1.0, 2.0, &PerronOptions::default()).unwrap();
        let t = r.truncated_at.expect("solution blows up before t = 1");
        assert!(t < 1.0);
        assert_eq!(r.limit.times.len(), r.limit.values.len());
    }

    #[test]
    fn comparison_witness() {
        let x = ScalarTrajectory::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 2.0]).unwrap();
        assert!(comparison_check(&x, &x).unwrap().holds);
        let u = ScalarTrajectory::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.5, 2.0]).unwrap();
        let c = comparison_check(&u, &x).unwrap();
        assert!(!c.holds);
        assert_eq!(c.witness.unwrap().0, 1);
    }
}
