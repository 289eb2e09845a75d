//! Turns a parsed [`Scenario`] into operators, forcing and data on a grid.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::{Env, Expr};
use crate::grid::{Boundary, Grid, GridFunction, NormTag};
use crate::invariance::{Barrier, Problem};
use crate::map::Pointwise;
use crate::operators::{
    Laplace, LaplaceSpec, PLaplace, PLaplaceSpec, Resolvent, SolveStats, TransportBirth, TransportBirthSpec,
};

use super::config::{InitialData, ProblemKind, Scenario};

/// `A = −d·Δ_h + c·I`; with `d = 0` a pointwise linear map on a node set.
#[derive(Debug, Clone)]
pub struct LinearOperator {
    laplace: Option<Laplace>,
    diffusion: f64,
    rate: f64,
}

impl LinearOperator {
    pub fn new(laplace: Option<Laplace>, diffusion: f64, rate: f64) -> Result<Self> {
        if laplace.is_some() != (diffusion > 0.0) {
            return Err(Error::InvalidSpec(
                "diffusion needs a spatial grid and vice versa".into(),
            ));
        }
        Ok(LinearOperator {
            laplace,
            diffusion,
            rate,
        })
    }
}

impl Resolvent for LinearOperator {
    fn resolve_traced(&self, lambda: f64, g: &GridFunction) -> Result<(GridFunction, SolveStats)> {
        let d = 1.0 + lambda * self.rate;
        if !(lambda >= 0.0) || d <= 0.0 {
            return Err(Error::StepTooLarge {
                lambda,
                max: self.lambda_max(),
            });
        }
        let scaled = g.scale(1.0 / d);
        match &self.laplace {
            Some(lap) => lap.resolve_traced(lambda * self.diffusion / d, &scaled),
            None => Ok((scaled, SolveStats::default())),
        }
    }

    fn alpha(&self) -> f64 {
        (-self.rate).max(0.0)
    }

    fn in_domain(&self, x: &GridFunction) -> bool {
        self.laplace.as_ref().is_none_or(|l| l.in_domain(x))
    }

    fn apply(&self, x: &GridFunction) -> Option<GridFunction> {
        let cx = x.scale(self.rate);
        match &self.laplace {
            Some(l) => l.apply(x)?.scale(self.diffusion).add(&cx).ok(),
            None => Some(cx),
        }
    }

    fn native_norm(&self) -> NormTag {
        NormTag::Sup
    }

    fn name(&self) -> &'static str {
        "linear"
    }
}

#[derive(Debug, Clone)]
pub enum Operator {
    PLaplace(PLaplace),
    Laplace(Laplace),
    Transport(TransportBirth),
    Linear(LinearOperator),
}

impl Operator {
    pub fn as_resolvent(&self) -> Arc<dyn Resolvent> {
        match self {
            Operator::PLaplace(o) => Arc::new(o.clone()),
            Operator::Laplace(o) => Arc::new(o.clone()),
            Operator::Transport(o) => Arc::new(o.clone()),
            Operator::Linear(o) => Arc::new(o.clone()),
        }
    }
}

/// Scenario data evaluated on the grid.
pub struct Data {
    pub grid: Grid,
    /// Boundary tag of states in the operator's space.
    pub boundary: Boundary,
    pub f: Pointwise,
    pub lower: Option<GridFunction>,
    pub upper: Option<GridFunction>,
    pub beta: Option<Vec<f64>>,
    pub x0: GridFunction,
    pub barriers: Vec<Barrier>,
}

fn env(p: [f64; 2]) -> Env {
    Env {
        x: p[0],
        y: p[1],
        ..Env::default()
    }
}

fn sample(expr: &Expr, grid: &Grid, what: &str) -> Result<Vec<f64>> {
    (0..grid.len())
        .map(|i| {
            let v = expr
                .eval(&env(grid.coords(i)))
                .map_err(|e| Error::from(e).context(format!("evaluating {what}")))?;
            if !v.is_finite() {
                return Err(Error::InvalidSpec(format!("{what} is not finite at node {i}")));
            }
            Ok(v)
        })
        .collect()
}

/// Node function from `f(x, y, t, u)`; evaluation errors become NaN and are
/// caught by the finiteness checks of the stepper.
pub fn pointwise(expr: &Expr) -> Pointwise {
    let e = expr.clone();
    Pointwise::new(move |x, t, u| {
        e.eval(&Env {
            x: x[0],
            y: x[1],
            t,
            u,
            s: 0.0,
        })
        .unwrap_or(f64::NAN)
    })
}

pub fn grid_for(s: &Scenario) -> Result<Grid> {
    let o = &s.operator;
    match s.kind {
        ProblemKind::PLaplaceObstacle | ProblemKind::AgeStructured => Grid::interval(o.length, o.nodes),
        ProblemKind::ReactionDiffusion => match (o.width, o.ny) {
            (Some(w), Some(ny)) => Grid::rectangle(o.length, w, o.nodes, ny),
            _ => Grid::interval(o.length, o.nodes),
        },
        ProblemKind::Impulsive | ProblemKind::CustomLinear => {
            if o.nodes == 1 {
                Grid::points(1)
            } else {
                Grid::interval(o.length, o.nodes)
            }
        }
    }
}

fn boundary_for(s: &Scenario) -> Boundary {
    match s.kind {
        ProblemKind::AgeStructured => Boundary::NonlocalBirth,
        ProblemKind::Impulsive | ProblemKind::CustomLinear if s.operator.diffusion == 0.0 => Boundary::None,
        _ => Boundary::DirichletZero,
    }
}

pub fn build_data(s: &Scenario) -> Result<Data> {
    let grid = grid_for(s)?;
    let boundary = boundary_for(s);
    let raw = |e: &Option<Expr>, what: &str| -> Result<Option<GridFunction>> {
        e.as_ref()
            .map(|e| GridFunction::new(grid.clone(), sample(e, &grid, what)?, Boundary::None, NormTag::Sup))
            .transpose()
    };
    let lower = raw(&s.data.lower, "m")?;
    let upper = raw(&s.data.upper, "M")?;
    let beta = s.data.beta.as_ref().map(|b| sample(b, &grid, "beta")).transpose()?;
    let x0_values = match &s.data.x0 {
        InitialData::Expr(e) => sample(e, &grid, "x0")?,
        InitialData::Modes(modes) => {
            let (lx, ly) = match grid {
                Grid::Rectangle { lx, ly, .. } => (lx, ly),
                _ => (s.operator.length, 1.0),
            };
            let two_d = matches!(grid, Grid::Rectangle { .. });
            (0..grid.len())
                .map(|i| {
                    let p = grid.coords(i);
                    modes
                        .iter()
                        .map(|&(k, c)| {
                            let sx = (k as f64 * PI * p[0] / lx).sin();
                            c * if two_d {
                                sx * (k as f64 * PI * p[1] / ly).sin()
                            } else {
                                sx
                            }
                        })
                        .sum()
                })
                .collect()
        }
    };
    let x0 = GridFunction::from_fn(grid.clone(), boundary, NormTag::Sup, |_| 0.0);
    let x0 = x0
        .axpy(
            1.0,
            &GridFunction::new(grid.clone(), x0_values, Boundary::None, NormTag::Sup)?,
        )
        .map_err(|e| e.context("x0"))?;

    let barriers = s
        .barriers
        .iter()
        .map(|b| {
            let tau = b.tau.clone();
            let imp = pointwise(&b.impulse);
            Barrier::new(
                format!("barrier_{}", b.index),
                move |u: &GridFunction| {
                    tau.eval(&Env {
                        s: u.sup_norm(),
                        ..Env::default()
                    })
                    .unwrap_or(f64::NAN)
                },
                imp,
            )
        })
        .collect();
    Ok(Data {
        grid,
        boundary,
        f: pointwise(&s.data.f),
        lower,
        upper,
        beta,
        x0,
        barriers,
    })
}

pub fn transport_spec(s: &Scenario, beta: &[f64]) -> TransportBirthSpec {
    TransportBirthSpec {
        age_horizon: s.operator.length,
        nodes: s.operator.nodes,
        beta: beta.to_vec(),
        variant: s.operator.variant,
    }
}

pub fn build_operator(s: &Scenario, data: &Data) -> Result<Operator> {
    let o = &s.operator;
    Ok(match s.kind {
        ProblemKind::PLaplaceObstacle => {
            if o.nodes < 5 {
                return Err(Error::InvalidSpec("p-Laplace needs at least 5 nodes".into()));
            }
            Operator::PLaplace(PLaplace::new(PLaplaceSpec::new(o.p, o.length, o.nodes - 2))?)
        }
        ProblemKind::ReactionDiffusion => {
            let spec = match (o.width, o.ny) {
                (Some(w), Some(ny)) => LaplaceSpec::rectangle(o.length, w, o.nodes, ny)?,
                _ => LaplaceSpec::interval(o.length, o.nodes)?,
            };
            Operator::Laplace(Laplace::new(spec)?)
        }
        ProblemKind::AgeStructured => {
            let beta = data.beta.as_ref().expect("validated at parse time");
            Operator::Transport(TransportBirth::new(transport_spec(s, beta))?)
        }
        ProblemKind::Impulsive | ProblemKind::CustomLinear => {
            let lap = if o.diffusion > 0.0 {
                Some(Laplace::new(LaplaceSpec::interval(o.length, o.nodes)?)?)
            } else {
                None
            };
            Operator::Linear(LinearOperator::new(lap, o.diffusion, o.rate)?)
        }
    })
}

/// The structural-check view of a scenario, when one applies.
pub fn problem_for(s: &Scenario, data: &Data, op: Option<&Operator>, samples: Vec<GridFunction>) -> Option<Problem> {
    match (s.kind, op) {
        (ProblemKind::PLaplaceObstacle, Some(Operator::PLaplace(op))) => Some(Problem::PLaplaceObstacle {
            op: op.clone(),
            f: data.f.clone(),
            lower: data.lower.clone(),
            upper: data.upper.clone(),
        }),
        (ProblemKind::ReactionDiffusion, Some(Operator::Laplace(op))) => Some(Problem::ReactionDiffusion {
            op: op.clone(),
            f: data.f.clone(),
            lower: data.lower.clone(),
            upper: data.upper.clone(),
        }),
        (ProblemKind::AgeStructured, _) => Some(Problem::AgeStructured {
            spec: transport_spec(s, data.beta.as_ref()?),
            f: data.f.clone(),
            lower: data.lower.clone()?,
        }),
        (ProblemKind::Impulsive, Some(op)) => Some(Problem::Impulsive {
            op: op.as_resolvent(),
            f: Arc::new(data.f.clone()),
            barriers: data.barriers.clone(),
            samples,
        }),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_operator_matches_composition() {
        let lap = Laplace::new(LaplaceSpec::interval(1.0, 21).unwrap()).unwrap();
        let op = LinearOperator::new(Some(lap.clone()), 0.5, 2.0).unwrap();
        let g = lap.sample(|p| (PI * p[0]).sin());
        let u = op.resolve(0.1, &g).unwrap();
        // (I + λ(−dΔ + c))u = g, checked through apply.
        let back = u.axpy(0.1, &op.apply(&u).unwrap()).unwrap();
        assert!(back.dist(&g).unwrap() < 1e-12);
    }

    #[test]
    fn negative_rate_is_quasi_accretive() {
        let op = LinearOperator::new(None, 0.0, -2.0).unwrap();
        assert_eq!(op.alpha(), 2.0);
        assert!(op.resolve(0.6, &GridFunction::scalar(1.0, NormTag::Sup)).is_err());
    }
}
