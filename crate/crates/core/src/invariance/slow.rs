//! Slow-function certificates: `β` with `β(x) < x/Γ` near 0.

use crate::error::{Error, Result};

use super::report::{CertReport, Verdict, Witness};

#[derive(Debug, Clone, PartialEq)]
pub struct SlowGrid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Default for SlowGrid {
    fn default() -> Self {
        SlowGrid {
            lo: 1e-12,
            hi: 1e-1,
            points: 221,
        }
    }
}

impl SlowGrid {
    pub fn values(&self) -> Result<Vec<f64>> {
        if !(self.lo > 0.0 && self.hi > self.lo && self.points >= 2) {
            return Err(Error::InvalidSpec(format!(
                "bad log grid [{}, {}] x {}",
                self.lo, self.hi, self.points
            )));
        }
        let (a, b) = (self.lo.ln(), self.hi.ln());
        let n = (self.points - 1) as f64;
        let mut xs: Vec<f64> = (0..self.points).map(|k| (a + (b - a) * k as f64 / n).exp()).collect();
        xs[0] = self.lo;
        xs[self.points - 1] = self.hi;
        Ok(xs)
    }
}

/// Checks `x/β(x) > Γ` on a log-spaced grid.
///
/// On success the report carries the constants `M = 2` and `τ = Γ/2` of the
/// slow-function estimate. A violation is witnessed at the smallest ratio.
pub fn certify_slow(beta: impl Fn(f64) -> f64, gamma: f64, grid: &SlowGrid) -> Result<CertReport> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::InvalidSpec(format!("gamma must be positive, got {gamma}")));
    }
    let xs = grid.values()?;
    let mut worst: Option<Witness> = None;
    let mut monotone = true;
    let mut prev = f64::NEG_INFINITY;
    for &x in &xs {
        let b = beta(x);
        if b < prev {
            monotone = false;
        }
        prev = b;
        // Test Γ·β(x) < x, i.e. lhs = Γβ(x), rhs = x; β = 0 passes trivially.
        let w = Witness::new(format!("x={x:e}"), gamma * b, x);
        let key = |w: &Witness| if w.lhs.is_nan() { f64::INFINITY } else { w.lhs / w.rhs };
        if worst.as_ref().is_none_or(|cur| key(&w) > key(cur)) {
            worst = Some(w);
        }
    }
    let worst = worst.expect("grid has at least two points");
    let ok = worst.lhs < worst.rhs;
    let mut r = CertReport::new("slow", if ok { Verdict::Certified } else { Verdict::Violated }, 0.0);
    r.meta("gamma", gamma);
    r.meta("min_ratio", worst.rhs / worst.lhs);
    r.meta("monotone_on_grid", monotone);
    if ok {
        r.meta("M", 2.0);
        r.meta("tau", gamma / 2.0);
    }
    r.witnesses.push(worst);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_is_slow() {
        let r = certify_slow(|x| x * x, 0.5, &SlowGrid::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Certified);
        assert_eq!(r.get_meta("tau"), Some("0.25"));
    }

    #[test]
    fn sqrt_is_not_slow_near_zero() {
        let r = certify_slow(f64::sqrt, 0.5, &SlowGrid::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Violated);
        let w = &r.witnesses[0];
        assert!(w.lhs > w.rhs);
        assert_eq!(w.label, "x=1e-12");
    }

    #[test]
    fn bad_inputs() {
        assert!(certify_slow(|x| x, 0.0, &SlowGrid::default()).is_err());
        assert!(certify_slow(
            |x| x,
            1.0,
            &SlowGrid {
                lo: 1.0,
                hi: 0.5,
                points: 3
            }
        )
        .is_err());
    }
}
