//! Checks of the structural hypotheses on problem data.

use std::sync::Arc;

use crate::error::Result;
use crate::grid::{Grid, GridFunction};
use crate::map::{Pointwise, StateMap};
use crate::operators::{Laplace, PLaplace, Resolvent, TransportBirthSpec};

use super::derivative::{a_derivative, dyadic_schedule, DEFAULT_H0, DEFAULT_LEVELS};
use super::functional::ConstraintFunctional;
use super::impulsive::Barrier;
use super::report::{CertReport, Verdict, Witness};

/// Tolerance of nodewise sub/supersolution inequalities.
pub const NODE_TOL: f64 = 1e-9;
/// Probe offsets `|s| = 10⁻ᵏ`.
pub const PROBE_EXPONENTS: std::ops::RangeInclusive<i32> = 2..=6;
/// Margin used for strict inequalities.
const STRICT: f64 = 1e-12;

pub enum Problem {
    PLaplaceObstacle {
        op: PLaplace,
        f: Pointwise,
        lower: Option<GridFunction>,
        upper: Option<GridFunction>,
    },
    ReactionDiffusion {
        op: Laplace,
        f: Pointwise,
        lower: Option<GridFunction>,
        upper: Option<GridFunction>,
    },
    /// Raw birth data, so that an inadmissible `β` can be reported rather than rejected.
    AgeStructured {
        spec: TransportBirthSpec,
        f: Pointwise,
        lower: GridFunction,
    },
    Impulsive {
        op: Arc<dyn Resolvent>,
        f: Arc<dyn StateMap>,
        barriers: Vec<Barrier>,
        samples: Vec<GridFunction>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub verdict: Verdict,
    pub reports: Vec<CertReport>,
    /// Empirical one-sided Lipschitz constant at the lower obstacle.
    pub l_lower: Option<f64>,
    /// Same at the upper obstacle.
    pub l_upper: Option<f64>,
}

impl ConditionReport {
    fn new(reports: Vec<CertReport>) -> Self {
        let verdict = reports.iter().fold(Verdict::Certified, |v, r| v.combine(r.verdict));
        ConditionReport {
            verdict,
            reports,
            l_lower: None,
            l_upper: None,
        }
    }

    pub fn get(&self, check: &str) -> Option<&CertReport> {
        self.reports.iter().find(|r| r.check == check)
    }

    /// Larger of the two empirical constants, 0 if neither was probed.
    pub fn l_emp(&self) -> f64 {
        self.l_lower.unwrap_or(0.0).max(self.l_upper.unwrap_or(0.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Lower,
    Upper,
}

/// Result of probing `limsup (−(Aθ)(x) + f(x, θ(x)+s))/s` as `s → 0` from one side.
#[derive(Debug, Clone, PartialEq)]
pub struct LimsupProbe {
    pub report: CertReport,
    /// `max(0, max quotient)` over nodes and probe offsets.
    pub l_emp: f64,
    /// Max quotient over nodes for each probe exponent.
    pub per_level: Vec<f64>,
}

/// Probes the limsup condition at `nodes`. `a_theta` holds `(Aθ)ᵢ`.
///
/// A node counts as divergent when the quotient at the finest offset exceeds
/// `2·max(q_prev, 0) + 1`, which a bounded limsup cannot produce once the
/// quotients have settled.
pub fn limsup_probe(
    label: &str,
    grid: &Grid,
    theta: &[f64],
    a_theta: &[f64],
    f: &Pointwise,
    nodes: &[usize],
    side: Side,
) -> LimsupProbe {
    let sign = match side {
        Side::Lower => -1.0,
        Side::Upper => 1.0,
    };
    let levels: Vec<i32> = PROBE_EXPONENTS.collect();
    let mut per_level = vec![f64::NEG_INFINITY; levels.len()];
    let mut witnesses = Vec::new();
    let mut max_q = f64::NEG_INFINITY;
    for &i in nodes {
        let x = grid.coords(i);
        let q: Vec<f64> = levels
            .iter()
            .map(|&k| {
                let s = sign * 10f64.powi(-k);
                (-a_theta[i] + f.node(x, 0.0, theta[i] + s)) / s
            })
            .collect();
        for (lv, qk) in per_level.iter_mut().zip(&q) {
            *lv = lv.max(*qk);
        }
        max_q = q.iter().copied().fold(max_q, f64::max);
        let (last, prev) = (q[q.len() - 1], q[q.len() - 2]);
        witnesses.push(Witness::new(format!("probe node {i}"), last, 2.0 * prev.max(0.0) + 1.0).at_node(i));
    }
    let mut report = CertReport::from_samples(label, 0.0, witnesses);
    if report.verdict == Verdict::Certified {
        // The tightest sample is not informative for a divergence test.
        report.witnesses.clear();
    }
    let l_emp = if max_q.is_finite() {
        max_q.max(0.0)
    } else {
        f64::INFINITY
    };
    report.meta("L_emp", l_emp);
    LimsupProbe {
        report,
        l_emp,
        per_level,
    }
}

fn interior(grid: &Grid) -> Vec<usize> {
    (0..grid.len()).filter(|&i| !grid.is_boundary(i)).collect()
}

fn boundary_nodes(grid: &Grid) -> Vec<usize> {
    (0..grid.len()).filter(|&i| grid.is_boundary(i)).collect()
}

fn boundary_compat(grid: &Grid, lower: Option<&GridFunction>, upper: Option<&GridFunction>) -> CertReport {
    let mut w = Vec::new();
    for i in boundary_nodes(grid) {
        if let Some(m) = lower {
            w.push(Witness::new(format!("lower at boundary node {i}"), m.values()[i], 0.0).at_node(i));
        }
        if let Some(upper) = upper {
            w.push(Witness::new(format!("upper at boundary node {i}"), 0.0, upper.values()[i]).at_node(i));
        }
    }
    if let (Some(m), Some(upper)) = (lower, upper) {
        for i in 0..grid.len() {
            w.push(Witness::new(format!("ordering at node {i}"), m.values()[i], upper.values()[i]).at_node(i));
        }
    }
    CertReport::from_samples("boundary_compatibility", NODE_TOL, w)
}

fn nodewise(
    label: &str,
    grid: &Grid,
    theta: &[f64],
    a_theta: &[f64],
    f: &Pointwise,
    nodes: &[usize],
    side: Side,
) -> CertReport {
    let w = nodes
        .iter()
        .map(|&i| {
            let fi = f.node(grid.coords(i), 0.0, theta[i]);
            let (lhs, rhs) = match side {
                Side::Lower => (a_theta[i], fi),
                Side::Upper => (fi, a_theta[i]),
            };
            Witness::new(format!("node {i}"), lhs, rhs).at_node(i)
        })
        .collect();
    CertReport::from_samples(label, NODE_TOL, w)
}

fn check_obstacles(
    grid: &Grid,
    apply: impl Fn(&[f64]) -> Vec<f64>,
    f: &Pointwise,
    lower: Option<&GridFunction>,
    upper: Option<&GridFunction>,
    with_subsolution: bool,
) -> Result<ConditionReport> {
    for g in [lower, upper].into_iter().flatten() {
        if g.grid() != grid {
            return Err(crate::Error::GeometryMismatch(format!(
                "obstacle on {:?}, operator on {grid:?}",
                g.grid()
            )));
        }
    }
    let nodes = interior(grid);
    let mut reports = vec![boundary_compat(grid, lower, upper)];
    let mut l_lower = None;
    let mut l_upper = None;
    if let Some(m) = lower {
        let am = apply(m.values());
        if with_subsolution {
            reports.push(nodewise("subsolution", grid, m.values(), &am, f, &nodes, Side::Lower));
        }
        let p = limsup_probe("limsup_lower", grid, m.values(), &am, f, &nodes, Side::Lower);
        l_lower = Some(p.l_emp);
        reports.push(p.report);
    }
    if let Some(upper) = upper {
        let au = apply(upper.values());
        if with_subsolution {
            reports.push(nodewise(
                "supersolution",
                grid,
                upper.values(),
                &au,
                f,
                &nodes,
                Side::Upper,
            ));
        }
        let p = limsup_probe("limsup_upper", grid, upper.values(), &au, f, &nodes, Side::Upper);
        l_upper = Some(p.l_emp);
        reports.push(p.report);
    }
    let mut out = ConditionReport::new(reports);
    out.l_lower = l_lower;
    out.l_upper = l_upper;
    Ok(out)
}

fn backward_difference(grid: &Grid, v: &[f64]) -> Vec<f64> {
    let h = grid.spacing()[0];
    let mut d = vec![0.0; v.len()];
    d[0] = (v[1] - v[0]) / h;
    for i in 1..v.len() {
        d[i] = (v[i] - v[i - 1]) / h;
    }
    d
}

fn check_age(spec: &TransportBirthSpec, f: &Pointwise, m: &GridFunction) -> Result<ConditionReport> {
    let grid = Grid::interval(spec.age_horizon, spec.nodes)?;
    if m.grid() != &grid || spec.beta.len() != spec.nodes {
        return Err(crate::Error::GeometryMismatch(
            "birth data, obstacle and age grid differ".into(),
        ));
    }
    let weights = grid.weights();
    let mass: f64 = weights.iter().zip(&spec.beta).map(|(w, b)| w * b).sum();
    let mut reports = Vec::new();

    let mut birth = CertReport::from_samples(
        "birth_condition",
        0.0,
        vec![Witness::new("trapezoid integral of beta", mass, 1.0 - STRICT)],
    );
    birth.meta("integral", mass);
    reports.push(birth);

    let nonneg = spec
        .beta
        .iter()
        .enumerate()
        .map(|(i, b)| Witness::new(format!("beta node {i}"), -b, 0.0).at_node(i))
        .collect();
    reports.push(CertReport::from_samples("beta_nonnegative", 0.0, nonneg));

    let mv = m.values();
    let dm = backward_difference(&grid, mv);
    let all: Vec<usize> = (0..grid.len()).collect();
    reports.push(nodewise("age_subsolution", &grid, mv, &dm, f, &all, Side::Lower));

    let births: f64 = weights
        .iter()
        .zip(&spec.beta)
        .zip(mv)
        .map(|((w, b), v)| w * b * v)
        .sum();
    let sup = mv.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    reports.push(CertReport::from_samples(
        "birth_closure",
        0.0,
        vec![Witness::new(
            "|m(0) - <beta, m>|",
            (mv[0] - births).abs(),
            1e-9 * (1.0 + sup),
        )],
    ));

    let p = limsup_probe("limsup_lower", &grid, mv, &dm, f, &all, Side::Lower);
    let l = p.l_emp;
    reports.push(p.report);
    let mut out = ConditionReport::new(reports);
    out.l_lower = Some(l);
    Ok(out)
}

fn check_barriers(
    op: &dyn Resolvent,
    f: &dyn StateMap,
    barriers: &[Barrier],
    samples: &[GridFunction],
) -> Result<ConditionReport> {
    let mut t1 = Vec::new();
    let mut t2 = Vec::new();
    let mut d3 = Vec::new();
    let schedule = dyadic_schedule(DEFAULT_H0.min(0.5 * op.lambda_max()), DEFAULT_LEVELS);
    for (k, x) in samples.iter().enumerate() {
        for (j, b) in barriers.iter().enumerate() {
            let tj = (b.tau)(x);
            if j == 0 {
                t1.push(Witness::new(format!("sample {k}: -tau_1"), -tj, -STRICT));
            }
            if let Some(next) = barriers.get(j + 1) {
                t1.push(Witness::new(
                    format!("sample {k}: tau_{} < tau_{}", j + 1, j + 2),
                    tj,
                    (next.tau)(x) - STRICT,
                ));
            }
            let jumped = x.add(&b.impulse.eval(tj, x))?;
            t2.push(Witness::new(
                format!("sample {k}: tau_{0}(x+I_{0}(x)) <= tau_{0}(x)", j + 1),
                (b.tau)(&jumped),
                tj,
            ));
            if let Some(next) = barriers.get(j + 1) {
                t2.push(Witness::new(
                    format!("sample {k}: tau_{}(x) < tau_{}(x+I(x))", j + 1, j + 2),
                    tj,
                    (next.tau)(&jumped) - STRICT,
                ));
            }
            let tau = b.tau.clone();
            let v = ConstraintFunctional::custom(format!("tau_{}", j + 1), move |_, u: &GridFunction| tau(u), None);
            let d = a_derivative(op, &v, x, &f.eval(tj, x), &schedule)?;
            d3.push(Witness::new(
                format!("sample {k}: D_A tau_{}", j + 1),
                d.value,
                1.0 - STRICT,
            ));
        }
    }
    let mut r3 = CertReport::from_samples("barrier_derivative", 0.0, d3);
    r3.meta("schedule_h0", schedule[0]);
    Ok(ConditionReport::new(vec![
        CertReport::from_samples("barrier_order", 0.0, t1),
        CertReport::from_samples("barrier_jump", 0.0, t2),
        r3,
    ]))
}

/// Runs every structural check that applies to `problem`.
pub fn verify_problem_conditions(problem: &Problem) -> Result<ConditionReport> {
    match problem {
        Problem::PLaplaceObstacle { op, f, lower, upper } => check_obstacles(
            op.grid(),
            |v| op.neg_plaplacian(v),
            f,
            lower.as_ref(),
            upper.as_ref(),
            true,
        ),
        Problem::ReactionDiffusion { op, f, lower, upper } => check_obstacles(
            op.grid(),
            |v| op.neg_laplacian(v),
            f,
            lower.as_ref(),
            upper.as_ref(),
            false,
        ),
        Problem::AgeStructured { spec, f, lower } => check_age(spec, f, lower),
        Problem::Impulsive {
            op,
            f,
            barriers,
            samples,
        } => check_barriers(op.as_ref(), f.as_ref(), barriers, samples),
    }
}
