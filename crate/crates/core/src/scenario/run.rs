use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::grid::{Boundary, GridFunction};
use crate::invariance::{
    check_pointwise_condition, monitor_with_tol, perturbation_family, simulate_impulsive, verify_problem_conditions,
    CertReport, ConditionReport, ConstraintFunctional, ImpulsiveOptions, MonitorReport, OmegaFunction, Region,
    SampleOptions, Verdict, POINTWISE_TOL,
};
use crate::semigroup::{solve_integral, IntegralOptions, Trajectory};

use super::build::{build_data, build_operator, problem_for, Data, Operator};
use super::config::{MonitorKind, OmegaChoice, ProblemKind, Scenario};
use super::emit::{emit_csv, emit_svg, Series};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    /// Where CSV/SVG files go; nothing is written without it.
    pub out_dir: Option<PathBuf>,
    /// Emit SVG plots even if the scenario does not ask for them.
    pub svg: bool,
    /// Overrides the sampling seed of the scenario.
    pub seed: Option<u64>,
    /// Overrides the step count of the scenario.
    pub steps: Option<usize>,
    /// Skip the time march; structural and pointwise checks only.
    pub conditions_only: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImpulsiveSummary {
    pub hit_counts: Vec<usize>,
    /// `(barrier index, time)` of each jump, 0-based barrier index.
    pub jumps: Vec<(usize, f64)>,
    pub report: CertReport,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub name: String,
    pub kind: ProblemKind,
    pub conditions: Option<ConditionReport>,
    pub pointwise: Vec<CertReport>,
    /// One entry per monitored functional, labelled `lower`/`upper`.
    pub monitors: Vec<(String, MonitorReport)>,
    /// `min (u − m)` over all recorded states and nodes.
    pub min_gap_lower: Option<f64>,
    /// `max (u − M)` over all recorded states and nodes.
    pub max_gap_upper: Option<f64>,
    pub impulsive: Option<ImpulsiveSummary>,
    pub trajectory: Option<Trajectory>,
    pub notes: Vec<String>,
    pub files: Vec<PathBuf>,
}

impl RunReport {
    fn new(s: &Scenario) -> Self {
        RunReport {
            name: s.name.clone(),
            kind: s.kind,
            conditions: None,
            pointwise: Vec::new(),
            monitors: Vec::new(),
            min_gap_lower: None,
            max_gap_upper: None,
            impulsive: None,
            trajectory: None,
            notes: Vec::new(),
            files: Vec::new(),
        }
    }

    pub fn first_exit(&self) -> Option<(&str, f64, f64)> {
        self.monitors
            .iter()
            .find_map(|(label, m)| m.first_exit.map(|(t, v)| (label.as_str(), t, v)))
    }

    /// All checks certified, no monitor exit, every barrier hit at most once.
    pub fn passed(&self) -> bool {
        self.conditions.as_ref().is_none_or(|c| c.verdict == Verdict::Certified)
            && self.pointwise.iter().all(|r| r.verdict == Verdict::Certified)
            && self.first_exit().is_none()
            && self
                .impulsive
                .as_ref()
                .is_none_or(|i| i.report.verdict == Verdict::Certified)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "scenario {} ({})", self.name, self.kind.name());
        if let Some(c) = &self.conditions {
            let _ = writeln!(s, "  conditions: {}", c.verdict);
            for r in &c.reports {
                let _ = writeln!(s, "    {}", r.to_string().replace('\n', "\n    "));
            }
        }
        for r in &self.pointwise {
            let _ = writeln!(s, "  {}", r.to_string().replace('\n', "\n  "));
        }
        for (label, m) in &self.monitors {
            match m.first_exit {
                Some((t, v)) => {
                    let _ = writeln!(s, "  monitor {label}: first exit at t={t} (V={v:e} > {:e})", m.exit_tol);
                }
                None => {
                    let _ = writeln!(s, "  monitor {label}: no exit (max V={:e})", m.max_v);
                }
            }
        }
        if let Some(g) = self.min_gap_lower {
            let _ = writeln!(s, "  min(u-m) = {g:e}");
        }
        if let Some(g) = self.max_gap_upper {
            let _ = writeln!(s, "  max(u-M) = {g:e}");
        }
        if let Some(i) = &self.impulsive {
            let _ = writeln!(s, "  hit_counts = {:?}", i.hit_counts);
            for (j, t) in &i.jumps {
                let _ = writeln!(s, "    jump on barrier {} at t={t}", j + 1);
            }
        }
        for n in &self.notes {
            let _ = writeln!(s, "  note: {n}");
        }
        for f in &self.files {
            let _ = writeln!(s, "  wrote {}", f.display());
        }
        let _ = writeln!(s, "  result: {}", if self.passed() { "PASS" } else { "FAIL" });
        s
    }
}

fn omega_for(
    s: &Scenario,
    op: &Operator,
    cond: Option<&ConditionReport>,
    side_l: Option<f64>,
) -> Result<Option<(OmegaFunction, String)>> {
    Ok(Some(match &s.checker.omega {
        OmegaChoice::Linear(c) => (OmegaFunction::linear(*c)?, "configured".into()),
        OmegaChoice::Power { c, a } => (OmegaFunction::power(*c, *a)?, "configured".into()),
        OmegaChoice::XLog => (OmegaFunction::xlog(), "configured".into()),
        OmegaChoice::Custom(e) => (OmegaFunction::custom(e.clone())?, "configured".into()),
        OmegaChoice::Auto => {
            let Some(l) = side_l.or_else(|| cond.map(|c| c.l_emp())) else {
                return Ok(None);
            };
            match op {
                Operator::PLaplace(_) => (OmegaFunction::linear(l)?, format!("C = L_emp = {l}")),
                Operator::Laplace(lap) => {
                    let l1 = lap.first_eigenvalue();
                    (
                        OmegaFunction::linear(l - 2.0 * l1)?,
                        format!("C = L_emp - 2*lambda_1 = {l} - 2*{l1}"),
                    )
                }
                Operator::Transport(t) => {
                    let half = t.l2_shift();
                    (
                        OmegaFunction::linear(half + l)?,
                        format!("C = |beta|^2/2 + L_emp = {half} + {l}"),
                    )
                }
                Operator::Linear(_) => return Ok(None),
            }
        }
    }))
}

/// Base state on `∂K` in the operator's space.
fn boundary_state(obstacle: &GridFunction, data: &Data) -> Result<GridFunction> {
    let zero = GridFunction::from_fn(data.grid.clone(), data.boundary, obstacle.norm_tag(), |_| 0.0);
    let base = zero.add(obstacle)?;
    if data.boundary == Boundary::NonlocalBirth {
        return base.with_boundary(Boundary::NonlocalBirth);
    }
    Ok(base)
}

fn sup_gap(obstacle: &GridFunction, lower: bool) -> ConstraintFunctional {
    let m = obstacle.clone();
    ConstraintFunctional::custom(
        if lower {
            "sup_distance_lower"
        } else {
            "sup_distance_upper"
        },
        move |_, u: &GridFunction| {
            u.values()
                .iter()
                .zip(m.values())
                .map(|(a, b)| if lower { (b - a).max(0.0) } else { (a - b).max(0.0) })
                .fold(0.0, f64::max)
        },
        None,
    )
}

fn extreme_gap(traj: &Trajectory, obstacle: &GridFunction, lower: bool) -> f64 {
    let mut best = if lower { f64::INFINITY } else { f64::NEG_INFINITY };
    for u in traj.states() {
        for (a, b) in u.values().iter().zip(obstacle.values()) {
            let d = a - b;
            best = if lower { best.min(d) } else { best.max(d) };
        }
    }
    best
}

fn write_outputs(
    s: &Scenario,
    opts: &RunOptions,
    report: &mut RunReport,
    series: &Series,
    jumps: Option<&Series>,
) -> Result<()> {
    let Some(dir) = &opts.out_dir else { return Ok(()) };
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(e).context(dir.display().to_string()))?;
    let path = |suffix: &str| -> PathBuf { Path::new(dir).join(format!("{}_{suffix}", s.output.prefix)) };
    if s.output.csv {
        let p = path("series.csv");
        emit_csv(series, &p).map_err(|e| e.context(p.display().to_string()))?;
        report.files.push(p);
        if let Some(j) = jumps {
            if !j.is_empty() {
                let p = path("jumps.csv");
                emit_csv(j, &p).map_err(|e| e.context(p.display().to_string()))?;
                report.files.push(p);
            }
        }
    }
    if s.output.svg || opts.svg {
        for name in &series.names {
            if !(name.starts_with("V_") || name == "norm") {
                continue;
            }
            let p = path(&format!("{name}.svg"));
            emit_svg(series, name, &format!("{} {}", s.name, name), &p)
                .map_err(|e| e.context(p.display().to_string()))?;
            report.files.push(p);
        }
    }
    Ok(())
}

/// Structural checks, pointwise tangency on the δ-family, the time march
/// with monitors, and file output.
pub fn run(s: &Scenario, opts: &RunOptions) -> Result<RunReport> {
    run_inner(s, opts).map_err(|e| e.context(format!("scenario {}", s.name)))
}

fn run_inner(s: &Scenario, opts: &RunOptions) -> Result<RunReport> {
    let mut report = RunReport::new(s);
    let steps = opts.steps.unwrap_or(s.steps);
    if steps == 0 {
        return Err(Error::InvalidSpec("steps must be >= 1".into()));
    }
    let data = build_data(s)?;
    let op = match build_operator(s, &data) {
        Ok(op) => Some(op),
        // Inadmissible birth data is a failed condition, reported below.
        Err(Error::InvalidSpec(msg)) if s.kind == ProblemKind::AgeStructured => {
            report.notes.push(format!("operator not constructed: {msg}"));
            None
        }
        Err(e) => return Err(e),
    };
    let integral = IntegralOptions::default();

    let samples = match (&op, s.kind) {
        (Some(op), ProblemKind::Impulsive) => {
            let plain = solve_integral(op.as_resolvent().as_ref(), &data.f, &data.x0, s.t_end, steps, &integral)?;
            let stride = (steps / 10).max(1);
            plain.states().iter().step_by(stride).cloned().collect()
        }
        _ => Vec::new(),
    };
    if let Some(problem) = problem_for(s, &data, op.as_ref(), samples) {
        report.conditions = Some(verify_problem_conditions(&problem)?);
    }
    let Some(op) = op else {
        return Ok(report);
    };
    let resolvent = op.as_resolvent();

    let sample_opts = SampleOptions {
        deltas: s.checker.deltas.clone(),
        random_bumps: s.checker.random_bumps,
        seed: opts.seed.unwrap_or(s.checker.seed),
    };
    let birth = match &op {
        Operator::Transport(t) => Some(t),
        _ => None,
    };
    let cond = report.conditions.clone();
    for (obstacle, lower) in [(&data.lower, true), (&data.upper, false)] {
        let Some(obstacle) = obstacle else { continue };
        let side_l = cond.as_ref().and_then(|c| if lower { c.l_lower } else { c.l_upper });
        let Some((omega, why)) = omega_for(s, &op, cond.as_ref(), side_l)? else {
            report.notes.push(
                "pointwise check skipped: no constructive constant for this operator; set [checker] omega".into(),
            );
            continue;
        };
        let v = if lower {
            ConstraintFunctional::quad_lower(obstacle)?
        } else {
            ConstraintFunctional::quad_upper(obstacle)?
        };
        let base = boundary_state(obstacle, &data)?;
        let fam = perturbation_family(&base, if lower { -1.0 } else { 1.0 }, &sample_opts, birth);
        let mut r = check_pointwise_condition(
            resolvent.as_ref(),
            &data.f,
            &v,
            &omega,
            &fam,
            Region::OutsideK,
            0.0,
            POINTWISE_TOL,
        )?;
        r.check = format!("pointwise_{}", if lower { "lower" } else { "upper" });
        r.meta("constant", why);
        report.pointwise.push(r);
    }
    if opts.conditions_only {
        return Ok(report);
    }

    let mut jumps_series = None;
    let traj = if s.kind == ProblemKind::Impulsive {
        let run = simulate_impulsive(
            resolvent.as_ref(),
            &data.f,
            &data.barriers,
            &data.x0,
            s.t_end,
            steps,
            &ImpulsiveOptions {
                integral,
                ..ImpulsiveOptions::default()
            },
        )?;
        let mut js = Series::new(run.jumps.iter().map(|j| j.time).collect());
        js.push("barrier", run.jumps.iter().map(|j| (j.barrier + 1) as f64).collect())?;
        js.push("v_after", run.jumps.iter().map(|j| j.v_after).collect())?;
        jumps_series = Some(js);
        report.impulsive = Some(ImpulsiveSummary {
            hit_counts: run.hit_counts.clone(),
            jumps: run.jumps.iter().map(|j| (j.barrier, j.time)).collect(),
            report: run.report(),
        });
        run.trajectory
    } else {
        solve_integral(resolvent.as_ref(), &data.f, &data.x0, s.t_end, steps, &integral)?
    };

    let mut series = Series::new(traj.times().to_vec());
    series.push("norm", traj.states().iter().map(|u| u.sup_norm()).collect())?;
    for (obstacle, lower) in [(&data.lower, true), (&data.upper, false)] {
        let Some(obstacle) = obstacle else { continue };
        let label = if lower { "lower" } else { "upper" };
        let v = match (s.checker.monitor, lower) {
            (MonitorKind::Quad, true) => ConstraintFunctional::quad_lower(obstacle)?,
            (MonitorKind::Quad, false) => ConstraintFunctional::quad_upper(obstacle)?,
            (MonitorKind::Sup, l) => sup_gap(obstacle, l),
        };
        let tol = s.checker.exit_tol.unwrap_or(match s.checker.monitor {
            MonitorKind::Quad => crate::invariance::QUAD_EXIT_TOL,
            MonitorKind::Sup => crate::invariance::SUP_EXIT_TOL,
        });
        let m = monitor_with_tol(&traj, &v, tol)?;
        series.push(format!("V_{label}"), m.v_series.clone())?;
        report.monitors.push((label.to_string(), m));
        let gap = extreme_gap(&traj, obstacle, lower);
        if lower {
            report.min_gap_lower = Some(gap);
        } else {
            report.max_gap_upper = Some(gap);
        }
    }
    for b in &data.barriers {
        series.push(
            format!("V_{}", b.name),
            traj.times()
                .iter()
                .zip(traj.states())
                .map(|(t, u)| b.v(*t, u))
                .collect(),
        )?;
    }
    write_outputs(s, opts, &mut report, &series, jumps_series.as_ref())?;
    report.trajectory = Some(traj);
    Ok(report)
}
