//! Age transport with nonlocal birth: `Au = u′`, `u(0) = ∫₀ᵃ β u dx`.
//!
//! The resolvent `u + λu′ = g` is an implicit upwind sweep in age. Writing the
//! sweep as `u = u(0)·e + G` (with `e` the homogeneous response to a unit
//! newborn density and `G` the response to `g` with no births) reduces the
//! birth law to the scalar equation `u(0)(1 − ⟨β,e⟩) = ⟨β,G⟩`.

use crate::error::{Error, Result};
use crate::grid::{Boundary, Grid, GridFunction, NormTag};

use super::{check_lambda, Resolvent, SolveStats};

/// Which space the operator is considered in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransportNorm {
    /// `C[0,a]` with the sup norm; m-accretive (`α = 0`).
    Sup,
    /// `L²(0,a)`; quasi m-accretive with `α = ½‖β‖²`.
    L2Shifted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransportBirthSpec {
    pub age_horizon: f64,
    pub nodes: usize,
    /// Birth weights at the grid nodes.
    pub beta: Vec<f64>,
    pub variant: TransportNorm,
}

#[derive(Debug, Clone)]
pub struct TransportBirth {
    spec: TransportBirthSpec,
    grid: Grid,
    h: f64,
    /// Trapezoid-weighted birth kernel, `wᵢβᵢ`.
    kernel: Vec<f64>,
    birth_mass: f64,
    alpha: f64,
}

impl TransportBirth {
    pub fn new(spec: TransportBirthSpec) -> Result<Self> {
        let grid = Grid::interval(spec.age_horizon, spec.nodes)?;
        if spec.beta.len() != spec.nodes {
            return Err(Error::InvalidSpec(format!(
                "birth weights have {} entries for {} nodes",
                spec.beta.len(),
                spec.nodes
            )));
        }
        if let Some(i) = spec.beta.iter().position(|b| !(b.is_finite() && *b >= 0.0)) {
            return Err(Error::InvalidSpec(format!(
                "birth weight at node {i} is {} (must be finite and >= 0)",
                spec.beta[i]
            )));
        }
        let weights = grid.weights();
        let kernel: Vec<f64> = weights.iter().zip(&spec.beta).map(|(w, b)| w * b).collect();
        let birth_mass: f64 = kernel.iter().sum();
        if birth_mass >= 1.0 {
            return Err(Error::InvalidSpec(format!(
                "birth condition fails: trapezoid integral of beta is {birth_mass} (must be < 1)"
            )));
        }
        let l2sq: f64 = weights.iter().zip(&spec.beta).map(|(w, b)| w * b * b).sum();
        let alpha = match spec.variant {
            TransportNorm::Sup => 0.0,
            TransportNorm::L2Shifted => 0.5 * l2sq,
        };
        let h = grid.spacing()[0];
        Ok(TransportBirth {
            spec,
            grid,
            h,
            kernel,
            birth_mass,
            alpha,
        })
    }

    pub fn spec(&self) -> &TransportBirthSpec {
        &self.spec
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Trapezoid `∫β`.
    pub fn birth_mass(&self) -> f64 {
        self.birth_mass
    }

    /// `½‖β‖²_{L²}`, the L² quasi-accretivity constant.
    pub fn l2_shift(&self) -> f64 {
        let w = self.grid.weights();
        0.5 * w.iter().zip(&self.spec.beta).map(|(w, b)| w * b * b).sum::<f64>()
    }

    pub fn norm_tag(&self) -> NormTag {
        match self.spec.variant {
            TransportNorm::Sup => NormTag::Sup,
            TransportNorm::L2Shifted => NormTag::L2,
        }
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction::from_fn(self.grid.clone(), Boundary::NonlocalBirth, self.norm_tag(), |x| f(x[0]))
    }

    /// `⟨β, u⟩` with trapezoid weights.
    pub fn births(&self, u: &[f64]) -> f64 {
        self.kernel.iter().zip(u).map(|(k, v)| k * v).sum()
    }

    fn homogeneous_response(&self, lambda: f64) -> Vec<f64> {
        let r = lambda / self.h;
        let mut e = vec![0.0; self.spec.nodes];
        e[0] = 1.0;
        for i in 1..e.len() {
            e[i] = r * e[i - 1] / (1.0 + r);
        }
        e
    }

    /// `1 − ⟨β, e_λ⟩`; bounded below by `1 − ∫β`.
    pub fn closure_denominator(&self, lambda: f64) -> f64 {
        1.0 - self.births(&self.homogeneous_response(lambda))
    }

    fn check_input(&self, g: &GridFunction) -> Result<()> {
        if g.grid() != &self.grid {
            return Err(Error::GeometryMismatch(format!(
                "transport operator on {:?}, state on {:?}",
                self.grid,
                g.grid()
            )));
        }
        Ok(())
    }
}

impl Resolvent for TransportBirth {
    fn resolve_traced(&self, lambda: f64, g: &GridFunction) -> Result<(GridFunction, SolveStats)> {
        check_lambda(self, lambda)?;
        self.check_input(g)?;
        if lambda == 0.0 {
            return Ok((g.clone(), SolveStats::default()));
        }
        let r = lambda / self.h;
        let gv = g.values();
        let e = self.homogeneous_response(lambda);
        let mut acc = vec![0.0; gv.len()];
        for i in 1..gv.len() {
            acc[i] = (gv[i] + r * acc[i - 1]) / (1.0 + r);
        }
        let denom = 1.0 - self.births(&e);
        debug_assert!(denom >= 1.0 - self.birth_mass - 1e-12);
        let newborn = self.births(&acc) / denom;
        let u: Vec<f64> = e.iter().zip(&acc).map(|(ei, ai)| newborn * ei + ai).collect();
        let out = GridFunction::new(g.grid().clone(), u, Boundary::NonlocalBirth, g.norm_tag())?;
        Ok((out, SolveStats::default()))
    }

    fn alpha(&self) -> f64 {
        self.alpha
    }

    fn in_domain(&self, x: &GridFunction) -> bool {
        if self.check_input(x).is_err() {
            return false;
        }
        let v = x.values();
        (v[0] - self.births(v)).abs() <= 1e-9 * (1.0 + x.sup_norm())
    }

    /// Backward differences; forward difference at age 0.
    fn apply(&self, x: &GridFunction) -> Option<GridFunction> {
        self.check_input(x).ok()?;
        let v = x.values();
        let mut d = vec![0.0; v.len()];
        d[0] = (v[1] - v[0]) / self.h;
        for i in 1..v.len() {
            d[i] = (v[i] - v[i - 1]) / self.h;
        }
        GridFunction::new(x.grid().clone(), d, x.boundary(), x.norm_tag()).ok()
    }

    fn native_norm(&self) -> NormTag {
        self.norm_tag()
    }

    fn name(&self) -> &'static str {
        "transport-birth"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(beta: f64, nodes: usize) -> TransportBirth {
        TransportBirth::new(TransportBirthSpec {
            age_horizon: 2.0,
            nodes,
            beta: vec![beta; nodes],
            variant: TransportNorm::Sup,
        })
        .unwrap()
    }

    #[test]
    fn birth_condition_enforced() {
        let r = TransportBirth::new(TransportBirthSpec {
            age_horizon: 2.0,
            nodes: 11,
            beta: vec![0.6; 11],
            variant: TransportNorm::Sup,
        });
        assert!(matches!(r, Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn negative_birth_weight_rejected() {
        let mut beta = vec![0.1; 11];
        beta[3] = -0.01;
        let r = TransportBirth::new(TransportBirthSpec {
            age_horizon: 2.0,
            nodes: 11,
            beta,
            variant: TransportNorm::Sup,
        });
        assert!(r.is_err());
    }

    #[test]
    fn zero_data_zero_solution() {
        let t = op(0.25, 21);
        let u = t.resolve(0.3, &t.sample(|_| 0.0)).unwrap();
        assert!(u.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn no_births_matches_discrete_exponential() {
        // u_i = 1 − (r/(1+r))^i solves the upwind recursion with u_0 = 0.
        let t = op(0.0, 41);
        let lambda = 0.2;
        let u = t.resolve(lambda, &t.sample(|_| 1.0)).unwrap();
        let r = lambda / 0.05;
        for (i, v) in u.values().iter().enumerate() {
            let exact = 1.0 - (r / (1.0 + r)).powi(i as i32);
            assert!((v - exact).abs() < 1e-14, "node {i}");
        }
    }

    #[test]
    fn closure_denominator_bounded_by_birth_mass() {
        let t = op(0.25, 21);
        for lambda in [1e-3, 0.1, 1.0, 100.0] {
            assert!(t.closure_denominator(lambda) >= 1.0 - t.birth_mass() - 1e-15);
        }
    }

    #[test]
    fn resolvent_output_satisfies_birth_law() {
        let t = op(0.25, 21);
        let u = t.resolve(0.1, &t.sample(|x| 1.0 + x.sin())).unwrap();
        assert!(t.in_domain(&u));
    }

    #[test]
    fn l2_variant_alpha() {
        let t = TransportBirth::new(TransportBirthSpec {
            age_horizon: 2.0,
            nodes: 21,
            beta: vec![0.25; 21],
            variant: TransportNorm::L2Shifted,
        })
        .unwrap();
        assert!((t.alpha() - 0.0625).abs() < 1e-14);
        assert!((t.lambda_max() - 16.0).abs() < 1e-12);
    }
}
