use crate::error::{Error, Result};
use crate::grid::{Boundary, Grid, GridFunction, NormTag};

use super::{cg, check_lambda, tridiag, Resolvent, SolveStats};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LaplaceSolver {
    /// Tridiagonal elimination; 1D only.
    Thomas,
    ConjugateGradient {
        max_iter: usize,
        tol: f64,
    },
}

/// `Au = −Δ_h u` with homogeneous Dirichlet data, second-order centered
/// differences (3-point in 1D, 5-point in 2D).
#[derive(Debug, Clone, PartialEq)]
pub struct LaplaceSpec {
    pub grid: Grid,
    pub solver: LaplaceSolver,
    pub norm: NormTag,
}

impl LaplaceSpec {
    pub fn interval(length: f64, nodes: usize) -> Result<Self> {
        Ok(LaplaceSpec {
            grid: Grid::interval(length, nodes)?,
            solver: LaplaceSolver::Thomas,
            norm: NormTag::Sup,
        })
    }

    pub fn rectangle(lx: f64, ly: f64, nx: usize, ny: usize) -> Result<Self> {
        Ok(LaplaceSpec {
            grid: Grid::rectangle(lx, ly, nx, ny)?,
            solver: LaplaceSolver::ConjugateGradient {
                max_iter: 10 * nx * ny,
                tol: 1e-13,
            },
            norm: NormTag::Sup,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Laplace {
    spec: LaplaceSpec,
}

impl Laplace {
    pub fn new(spec: LaplaceSpec) -> Result<Self> {
        match (&spec.grid, spec.solver) {
            (Grid::Points { .. }, _) => return Err(Error::InvalidSpec("the Laplacian needs a spatial grid".into())),
            (Grid::Rectangle { .. }, LaplaceSolver::Thomas) => {
                return Err(Error::InvalidSpec("Thomas elimination is 1D only".into()))
            }
            (_, LaplaceSolver::ConjugateGradient { tol, .. }) if !(tol > 0.0) => {
                return Err(Error::InvalidSpec("CG tolerance must be positive".into()))
            }
            _ => {}
        }
        Ok(Laplace { spec })
    }

    pub fn spec(&self) -> &LaplaceSpec {
        &self.spec
    }

    pub fn grid(&self) -> &Grid {
        &self.spec.grid
    }

    /// Zero state in the operator's space.
    pub fn zeros(&self) -> GridFunction {
        GridFunction::zeros(self.spec.grid.clone(), Boundary::DirichletZero, self.spec.norm)
    }

    pub fn sample(&self, f: impl Fn([f64; 2]) -> f64) -> GridFunction {
        GridFunction::from_fn(self.spec.grid.clone(), Boundary::DirichletZero, self.spec.norm, f)
    }

    /// Discrete Dirichlet eigenvalue for mode `k` per axis.
    pub fn eigenvalue(&self, modes: [usize; 2]) -> f64 {
        let axis = |len: f64, n: usize, k: usize| {
            let h = len / (n - 1) as f64;
            2.0 / (h * h) * (1.0 - (k as f64 * std::f64::consts::PI * h / len).cos())
        };
        match self.spec.grid {
            Grid::Interval { length, nodes } => axis(length, nodes, modes[0]),
            Grid::Rectangle { lx, ly, nx, ny } => axis(lx, nx, modes[0]) + axis(ly, ny, modes[1]),
            Grid::Points { .. } => 0.0,
        }
    }

    /// Smallest eigenvalue of the discrete Dirichlet `−Δ_h`.
    pub fn first_eigenvalue(&self) -> f64 {
        self.eigenvalue([1, 1])
    }

    /// `(−Δ_h x)` on interior nodes, 0 on the boundary.
    pub(crate) fn neg_laplacian(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        match self.spec.grid {
            Grid::Interval { nodes, .. } => {
                let h = self.spec.grid.spacing()[0];
                let c = 1.0 / (h * h);
                for i in 1..nodes - 1 {
                    out[i] = c * (2.0 * x[i] - x[i - 1] - x[i + 1]);
                }
            }
            Grid::Rectangle { nx, ny, .. } => {
                let h = self.spec.grid.spacing();
                let (cx, cy) = (1.0 / (h[0] * h[0]), 1.0 / (h[1] * h[1]));
                for iy in 1..ny - 1 {
                    for ix in 1..nx - 1 {
                        let k = iy * nx + ix;
                        out[k] = cx * (2.0 * x[k] - x[k - 1] - x[k + 1]) + cy * (2.0 * x[k] - x[k - nx] - x[k + nx]);
                    }
                }
            }
            Grid::Points { .. } => unreachable!("validated at construction"),
        }
        out
    }

    fn check_input(&self, g: &GridFunction) -> Result<()> {
        if g.grid() != &self.spec.grid {
            return Err(Error::GeometryMismatch(format!(
                "laplace operator on {:?}, state on {:?}",
                self.spec.grid,
                g.grid()
            )));
        }
        for (i, &v) in g.values().iter().enumerate() {
            if self.spec.grid.is_boundary(i) && v != 0.0 {
                return Err(Error::DirichletViolation { node: i, value: v });
            }
        }
        Ok(())
    }

    fn output(&self, g: &GridFunction, values: Vec<f64>) -> Result<GridFunction> {
        GridFunction::new(g.grid().clone(), values, Boundary::DirichletZero, g.norm_tag())
    }

    fn resolve_1d(&self, lambda: f64, g: &[f64]) -> Vec<f64> {
        let n = g.len();
        let h = self.spec.grid.spacing()[0];
        let r = lambda / (h * h);
        let m = n - 2;
        let sub = vec![-r; m];
        let sup = vec![-r; m];
        let diag = vec![1.0 + 2.0 * r; m];
        let inner = tridiag::solve(&sub, &diag, &sup, &g[1..n - 1]);
        let mut u = vec![0.0; n];
        u[1..n - 1].copy_from_slice(&inner);
        u
    }

    fn resolve_cg(&self, lambda: f64, g: &[f64], max_iter: usize, tol: f64) -> Result<(Vec<f64>, SolveStats)> {
        let mut u = g.to_vec();
        let (it, res) = cg::solve(
            |v, out| {
                let lv = self.neg_laplacian(v);
                for i in 0..v.len() {
                    out[i] = if self.spec.grid.is_boundary(i) {
                        v[i]
                    } else {
                        v[i] + lambda * lv[i]
                    };
                }
            },
            g,
            &mut u,
            tol,
            max_iter,
        )?;
        for (i, v) in u.iter_mut().enumerate() {
            if self.spec.grid.is_boundary(i) {
                *v = 0.0;
            }
        }
        Ok((
            u,
            SolveStats {
                iterations: it,
                residual: res,
            },
        ))
    }
}

impl Resolvent for Laplace {
    fn resolve_traced(&self, lambda: f64, g: &GridFunction) -> Result<(GridFunction, SolveStats)> {
        check_lambda(self, lambda)?;
        self.check_input(g)?;
        if lambda == 0.0 {
            return Ok((g.clone(), SolveStats::default()));
        }
        let (values, stats) = match self.spec.solver {
            LaplaceSolver::Thomas => (self.resolve_1d(lambda, g.values()), SolveStats::default()),
            LaplaceSolver::ConjugateGradient { max_iter, tol } => self.resolve_cg(lambda, g.values(), max_iter, tol)?,
        };
        Ok((self.output(g, values)?, stats))
    }

    fn in_domain(&self, x: &GridFunction) -> bool {
        self.check_input(x).is_ok()
    }

    fn apply(&self, x: &GridFunction) -> Option<GridFunction> {
        self.check_input(x).ok()?;
        self.output(x, self.neg_laplacian(x.values())).ok()
    }

    fn native_norm(&self) -> NormTag {
        self.spec.norm
    }

    fn name(&self) -> &'static str {
        "laplace"
    }
}
