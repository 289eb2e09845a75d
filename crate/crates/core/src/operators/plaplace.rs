//! One-dimensional p-Laplacian `Au = −(|u′|^{p−2}u′)′` with Dirichlet data.
//!
//! Flux form on a uniform grid: with `Dᵢ = (uᵢ − uᵢ₋₁)/h` and `φ(s) = |s|^{p−2}s`,
//! `(Au)ᵢ = −(φ(Dᵢ₊₁) − φ(Dᵢ))/h`. The resolvent equation is solved by damped
//! Newton on the tridiagonal Jacobian, starting from `g`.

use crate::error::{Error, Result};
use crate::grid::{Boundary, Grid, GridFunction, NormTag};

use super::{check_lambda, tridiag, Resolvent, SolveStats};

/// Floor applied to `φ′` in the Jacobian so degenerate rows stay invertible.
const JACOBIAN_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    pub max_iter: usize,
    pub abs_tol: f64,
    pub damping: bool,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            max_iter: 100,
            abs_tol: 1e-11,
            damping: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PLaplaceSpec {
    pub p: f64,
    pub length: f64,
    /// Interior node count; the grid has `interior + 2` nodes.
    pub interior: usize,
    pub newton: NewtonOptions,
}

impl PLaplaceSpec {
    pub fn new(p: f64, length: f64, interior: usize) -> Self {
        PLaplaceSpec {
            p,
            length,
            interior,
            newton: NewtonOptions::default(),
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::interval(self.length, self.interior + 2)
    }
}

#[derive(Debug, Clone)]
pub struct PLaplace {
    spec: PLaplaceSpec,
    grid: Grid,
    h: f64,
}

#[inline]
fn phi(p: f64, s: f64) -> f64 {
    if p == 2.0 {
        s
    } else {
        s.abs().powf(p - 2.0) * s
    }
}

#[inline]
fn dphi(p: f64, s: f64) -> f64 {
    if p == 2.0 {
        1.0
    } else {
        ((p - 1.0) * s.abs().powf(p - 2.0)).max(JACOBIAN_FLOOR)
    }
}

impl PLaplace {
    pub fn new(spec: PLaplaceSpec) -> Result<Self> {
        if !(spec.p >= 2.0 && spec.p.is_finite()) {
            return Err(Error::InvalidSpec(format!("p must be >= 2, got {}", spec.p)));
        }
        if spec.interior < 3 {
            return Err(Error::InvalidSpec(format!(
                "need at least 3 interior nodes, got {}",
                spec.interior
            )));
        }
        if !(spec.newton.abs_tol > 0.0) {
            return Err(Error::InvalidSpec("Newton tolerance must be positive".into()));
        }
        let grid = spec.grid()?;
        let h = grid.spacing()[0];
        Ok(PLaplace { spec, grid, h })
    }

    pub fn spec(&self) -> &PLaplaceSpec {
        &self.spec
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn p(&self) -> f64 {
        self.spec.p
    }

    pub fn zeros(&self) -> GridFunction {
        GridFunction::zeros(self.grid.clone(), Boundary::DirichletZero, NormTag::Sup)
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction::from_fn(self.grid.clone(), Boundary::DirichletZero, NormTag::Sup, |x| f(x[0]))
    }

    /// `(−Δ_p u)ᵢ` at interior nodes of an arbitrary nodal vector (boundary
    /// values are taken from `u`, not forced to zero). Boundary entries are 0.
    pub fn neg_plaplacian(&self, u: &[f64]) -> Vec<f64> {
        let (p, h) = (self.spec.p, self.h);
        let n = u.len();
        let mut out = vec![0.0; n];
        for i in 1..n - 1 {
            let fwd = phi(p, (u[i + 1] - u[i]) / h);
            let bwd = phi(p, (u[i] - u[i - 1]) / h);
            out[i] = -(fwd - bwd) / h;
        }
        out
    }

    /// Discrete convex energy `Σ h(½(uᵢ−gᵢ)² + (λ/p)|Dᵢ|^p)` whose minimizer is
    /// `J_λ g`. The quadratic term runs over interior nodes, the gradient term
    /// over all cells.
    pub fn energy(&self, lambda: f64, u: &[f64], g: &[f64]) -> f64 {
        let (p, h) = (self.spec.p, self.h);
        let n = u.len();
        let quad: f64 = (1..n - 1).map(|i| 0.5 * (u[i] - g[i]).powi(2)).sum();
        let grad: f64 = (1..n).map(|i| ((u[i] - u[i - 1]) / h).abs().powf(p)).sum();
        h * (quad + lambda / p * grad)
    }

    fn residual(&self, lambda: f64, u: &[f64], g: &[f64]) -> Vec<f64> {
        let a = self.neg_plaplacian(u);
        let n = u.len();
        let mut r = vec![0.0; n];
        for i in 1..n - 1 {
            r[i] = u[i] + lambda * a[i] - g[i];
        }
        r
    }

    fn check_input(&self, g: &GridFunction) -> Result<()> {
        if g.grid() != &self.grid {
            return Err(Error::GeometryMismatch(format!(
                "p-Laplacian on {:?}, state on {:?}",
                self.grid,
                g.grid()
            )));
        }
        let v = g.values();
        for i in [0, v.len() - 1] {
            if v[i] != 0.0 {
                return Err(Error::DirichletViolation { node: i, value: v[i] });
            }
        }
        Ok(())
    }
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

impl Resolvent for PLaplace {
    fn resolve_traced(&self, lambda: f64, g: &GridFunction) -> Result<(GridFunction, SolveStats)> {
        check_lambda(self, lambda)?;
        self.check_input(g)?;
        if lambda == 0.0 {
            return Ok((g.clone(), SolveStats::default()));
        }
        let (p, h) = (self.spec.p, self.h);
        let opts = self.spec.newton;
        let gv = g.values();
        let n = gv.len();
        let m = n - 2;
        let mut u = gv.to_vec();
        let mut r = self.residual(lambda, &u, gv);
        let mut rnorm = sup(&r);
        let mut history = vec![rnorm];
        let c = lambda / (h * h);

        let mut iterations = 0;
        while rnorm > opts.abs_tol {
            if iterations == opts.max_iter {
                return Err(Error::NewtonDiverged {
                    iterations,
                    residual: rnorm,
                    history,
                });
            }
            iterations += 1;

            let mut sub = vec![0.0; m];
            let mut diag = vec![0.0; m];
            let mut sup_ = vec![0.0; m];
            let mut rhs = vec![0.0; m];
            for k in 0..m {
                let i = k + 1;
                let df = dphi(p, (u[i + 1] - u[i]) / h);
                let db = dphi(p, (u[i] - u[i - 1]) / h);
                sub[k] = -c * db;
                sup_[k] = -c * df;
                diag[k] = 1.0 + c * (df + db);
                rhs[k] = -r[i];
            }
            let delta = tridiag::solve(&sub, &diag, &sup_, &rhs);

            let mut step = 1.0;
            loop {
                let mut trial = u.clone();
                for k in 0..m {
                    trial[k + 1] += step * delta[k];
                }
                let tr = self.residual(lambda, &trial, gv);
                let tn = sup(&tr);
                if !opts.damping || tn < rnorm || step < 1e-10 {
                    u = trial;
                    r = tr;
                    rnorm = tn;
                    break;
                }
                step *= 0.5;
            }
            history.push(rnorm);
            if !rnorm.is_finite() {
                return Err(Error::NewtonDiverged {
                    iterations,
                    residual: rnorm,
                    history,
                });
            }
        }
        let out = GridFunction::new(g.grid().clone(), u, Boundary::DirichletZero, g.norm_tag())?;
        Ok((
            out,
            SolveStats {
                iterations,
                residual: rnorm,
            },
        ))
    }

    fn in_domain(&self, x: &GridFunction) -> bool {
        self.check_input(x).is_ok()
    }

    fn apply(&self, x: &GridFunction) -> Option<GridFunction> {
        self.check_input(x).ok()?;
        GridFunction::new(
            x.grid().clone(),
            self.neg_plaplacian(x.values()),
            Boundary::DirichletZero,
            x.norm_tag(),
        )
        .ok()
    }

    fn native_norm(&self) -> NormTag {
        NormTag::Sup
    }

    fn name(&self) -> &'static str {
        "p-laplace"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{Laplace, LaplaceSpec};

    #[test]
    fn zero_data_gives_zero_without_iterations() {
        let op = PLaplace::new(PLaplaceSpec::new(3.0, 1.0, 9)).unwrap();
        let (u, stats) = op.resolve_traced(0.2, &op.zeros()).unwrap();
        assert!(u.values().iter().all(|&v| v == 0.0));
        assert_eq!(stats.iterations, 0);
    }

    #[test]
    fn p_two_matches_linear_laplacian() {
        let op = PLaplace::new(PLaplaceSpec::new(2.0, 1.0, 19)).unwrap();
        let lin = Laplace::new(LaplaceSpec::interval(1.0, 21).unwrap()).unwrap();
        let g = op.sample(|x| (x * (1.0 - x)).sqrt() + (7.0 * x).sin() * x * (1.0 - x));
        let a = op.resolve(0.01, &g).unwrap();
        let b = lin.resolve(0.01, &g).unwrap();
        assert!(a.dist(&b).unwrap() < 1e-10);
    }

    #[test]
    fn rejects_p_below_two() {
        assert!(PLaplace::new(PLaplaceSpec::new(1.5, 1.0, 9)).is_err());
    }

    #[test]
    fn divergence_reports_history() {
        let mut spec = PLaplaceSpec::new(4.0, 1.0, 9);
        spec.newton.max_iter = 1;
        spec.newton.abs_tol = 1e-300;
        let op = PLaplace::new(spec).unwrap();
        let g = op.sample(|x| (3.0 * x).sin());
        match op.resolve(1.0, &g) {
            Err(Error::NewtonDiverged {
                iterations, history, ..
            }) => {
                assert_eq!(iterations, 1);
                assert_eq!(history.len(), 2);
            }
            other => panic!("expected divergence, got {other:?}"),
        }
    }
}
