use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::GridFunction;

/// Evaluator of a scalar state functional, `(t, u) ↦ V(t, u)`.
pub type FunctionalFn = Arc<dyn Fn(f64, &GridFunction) -> f64 + Send + Sync>;
/// Discrete L² gradient of a functional.
pub type GradientFn = Arc<dyn Fn(f64, &GridFunction) -> GridFunction + Send + Sync>;

/// Exit tolerance for quadrature functionals, which are quadratically flat at `∂K`.
pub const QUAD_EXIT_TOL: f64 = 1e-8;
/// Exit tolerance for sup-based functionals.
pub const SUP_EXIT_TOL: f64 = 1e-6;

#[derive(Clone)]
pub enum FunctionalKind {
    /// `½∫(u−m)₋²`.
    QuadLower(GridFunction),
    /// `½∫(u−M)₊²`.
    QuadUpper(GridFunction),
    /// `‖(u−m)₋‖∞`.
    SupDistanceLower(GridFunction),
    /// `τ(u) − t`.
    Epigraph(Arc<dyn Fn(&GridFunction) -> f64 + Send + Sync>),
    Custom {
        name: String,
        eval: FunctionalFn,
        grad: Option<GradientFn>,
    },
}

impl fmt::Debug for FunctionalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionalKind::QuadLower(_) => f.write_str("QuadLower"),
            FunctionalKind::QuadUpper(_) => f.write_str("QuadUpper"),
            FunctionalKind::SupDistanceLower(_) => f.write_str("SupDistanceLower"),
            FunctionalKind::Epigraph(_) => f.write_str("Epigraph"),
            FunctionalKind::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

/// A functional `V` describing the constraint set `K = {V ≤ 0}`.
#[derive(Clone, Debug)]
pub struct ConstraintFunctional {
    kind: FunctionalKind,
}

fn neg_part(a: f64) -> f64 {
    (-a).max(0.0)
}

fn pos_part(a: f64) -> f64 {
    a.max(0.0)
}

fn check_obstacle(m: &GridFunction) -> Result<GridFunction> {
    m.validate()?;
    Ok(m.clone())
}

impl ConstraintFunctional {
    pub fn quad_lower(m: &GridFunction) -> Result<Self> {
        Ok(ConstraintFunctional {
            kind: FunctionalKind::QuadLower(check_obstacle(m)?),
        })
    }

    pub fn quad_upper(upper: &GridFunction) -> Result<Self> {
        Ok(ConstraintFunctional {
            kind: FunctionalKind::QuadUpper(check_obstacle(upper)?),
        })
    }

    pub fn sup_distance_lower(m: &GridFunction) -> Result<Self> {
        Ok(ConstraintFunctional {
            kind: FunctionalKind::SupDistanceLower(check_obstacle(m)?),
        })
    }

    pub fn epigraph(tau: impl Fn(&GridFunction) -> f64 + Send + Sync + 'static) -> Self {
        ConstraintFunctional {
            kind: FunctionalKind::Epigraph(Arc::new(tau)),
        }
    }

    pub fn custom(
        name: impl Into<String>,
        eval: impl Fn(f64, &GridFunction) -> f64 + Send + Sync + 'static,
        grad: Option<GradientFn>,
    ) -> Self {
        ConstraintFunctional {
            kind: FunctionalKind::Custom {
                name: name.into(),
                eval: Arc::new(eval),
                grad,
            },
        }
    }

    pub fn kind(&self) -> &FunctionalKind {
        &self.kind
    }

    pub fn name(&self) -> String {
        match &self.kind {
            FunctionalKind::QuadLower(_) => "quad_lower".into(),
            FunctionalKind::QuadUpper(_) => "quad_upper".into(),
            FunctionalKind::SupDistanceLower(_) => "sup_distance_lower".into(),
            FunctionalKind::Epigraph(_) => "epigraph".into(),
            FunctionalKind::Custom { name, .. } => name.clone(),
        }
    }

    /// Default threshold above which a monitored state counts as having left `K`.
    pub fn exit_tol(&self) -> f64 {
        match self.kind {
            FunctionalKind::SupDistanceLower(_) | FunctionalKind::Epigraph(_) => SUP_EXIT_TOL,
            _ => QUAD_EXIT_TOL,
        }
    }

    fn gap(&self, obstacle: &GridFunction, u: &GridFunction) -> Result<Vec<f64>> {
        if obstacle.grid() != u.grid() {
            return Err(Error::GeometryMismatch(format!(
                "obstacle on {:?}, state on {:?}",
                obstacle.grid(),
                u.grid()
            )));
        }
        Ok(u.values().iter().zip(obstacle.values()).map(|(a, b)| a - b).collect())
    }

    /// `V(t, u)`; `t` only matters for epigraph functionals.
    pub fn eval_at(&self, t: f64, u: &GridFunction) -> Result<f64> {
        match &self.kind {
            FunctionalKind::QuadLower(m) => {
                let w = u.weights();
                let d = self.gap(m, u)?;
                Ok(0.5 * w.iter().zip(&d).map(|(w, d)| w * neg_part(*d).powi(2)).sum::<f64>())
            }
            FunctionalKind::QuadUpper(upper) => {
                let w = u.weights();
                let d = self.gap(upper, u)?;
                Ok(0.5 * w.iter().zip(&d).map(|(w, d)| w * pos_part(*d).powi(2)).sum::<f64>())
            }
            FunctionalKind::SupDistanceLower(m) => {
                Ok(self.gap(m, u)?.iter().fold(0.0_f64, |acc, d| acc.max(neg_part(*d))))
            }
            FunctionalKind::Epigraph(tau) => Ok(tau(u) - t),
            FunctionalKind::Custom { eval, .. } => Ok(eval(t, u)),
        }
    }

    pub fn eval(&self, u: &GridFunction) -> Result<f64> {
        self.eval_at(0.0, u)
    }

    /// Discrete L² gradient with respect to the trapezoid inner product, where available.
    pub fn grad_at(&self, t: f64, u: &GridFunction) -> Result<Option<GridFunction>> {
        match &self.kind {
            FunctionalKind::QuadLower(m) => {
                let d = self.gap(m, u)?;
                Ok(Some(u.with_values(d.iter().map(|d| -neg_part(*d)).collect())))
            }
            FunctionalKind::QuadUpper(upper) => {
                let d = self.gap(upper, u)?;
                Ok(Some(u.with_values(d.iter().map(|d| pos_part(*d)).collect())))
            }
            FunctionalKind::SupDistanceLower(_) | FunctionalKind::Epigraph(_) => Ok(None),
            FunctionalKind::Custom { grad, .. } => Ok(grad.as_ref().map(|g| g(t, u))),
        }
    }

    pub fn grad(&self, u: &GridFunction) -> Result<Option<GridFunction>> {
        self.grad_at(0.0, u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Boundary, Grid, NormTag};

    fn line(vals: &[f64]) -> GridFunction {
        let g = Grid::interval(1.0, vals.len()).unwrap();
        GridFunction::new(g, vals.to_vec(), Boundary::None, NormTag::Sup).unwrap()
    }

    #[test]
    fn quad_lower_zero_iff_above() {
        let m = line(&[-1.0, -1.0, -1.0, -1.0, -1.0]);
        let v = ConstraintFunctional::quad_lower(&m).unwrap();
        assert_eq!(v.eval(&line(&[0.0, -1.0, 2.0, -0.5, 0.0])).unwrap(), 0.0);
        // Trapezoid weight of an interior node is h = 0.25.
        let val = v.eval(&line(&[0.0, -1.5, 0.0, 0.0, 0.0])).unwrap();
        assert!((val - 0.5 * 0.25 * 0.25).abs() < 1e-15);
    }

    #[test]
    fn gradient_matches_finite_difference() {
        let m = line(&[-1.0, -0.5, 0.0, -0.5, -1.0]);
        let upper = line(&[1.0, 0.5, 0.2, 0.5, 1.0]);
        let u = line(&[0.0, -0.9, 0.4, 0.3, 0.0]);
        let w = line(&[0.0, 0.3, -0.7, 0.2, 0.0]);
        for v in [
            ConstraintFunctional::quad_lower(&m).unwrap(),
            ConstraintFunctional::quad_upper(&upper).unwrap(),
        ] {
            let g = v.grad(&u).unwrap().unwrap();
            let h = 1e-7;
            let fd = (v.eval(&u.axpy(h, &w).unwrap()).unwrap() - v.eval(&u.axpy(-h, &w).unwrap()).unwrap()) / (2.0 * h);
            assert!((g.inner(&w).unwrap() - fd).abs() < 1e-8);
        }
    }

    #[test]
    fn sup_distance_and_epigraph() {
        let m = line(&[-1.0, -1.0, -1.0]);
        let d = ConstraintFunctional::sup_distance_lower(&m).unwrap();
        assert_eq!(d.eval(&line(&[0.0, -1.25, 0.0])).unwrap(), 0.25);
        assert!(d.grad(&m).unwrap().is_none());
        let e = ConstraintFunctional::epigraph(|u: &GridFunction| 1.0 + u.sup_norm());
        assert_eq!(e.eval_at(0.5, &line(&[0.0, 2.0, 0.0])).unwrap(), 2.5);
    }

    #[test]
    fn grid_mismatch_is_an_error() {
        let v = ConstraintFunctional::quad_lower(&line(&[0.0, 0.0, 0.0])).unwrap();
        assert!(v.eval(&line(&[0.0, 0.0, 0.0, 0.0])).is_err());
    }
}
