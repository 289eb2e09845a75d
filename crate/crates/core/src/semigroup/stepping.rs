use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::map::{AlphaShifted, StateMap};
use crate::operators::{Resolvent, Shifted};

pub const DEFAULT_BLOW_UP_CEILING: f64 = 1e8;

/// One implicit Euler step: the `u` with `u + hAu ∋ u_prev + h·v`.
pub fn implicit_euler_step(
    op: &dyn Resolvent,
    h: f64,
    u_prev: &GridFunction,
    v: &GridFunction,
) -> Result<GridFunction> {
    op.resolve(h, &u_prev.axpy(h, v)?)
}

/// `J_{t/n}ⁿ x`. Returns `x` unchanged for `t = 0`.
pub fn crandall_liggett(op: &dyn Resolvent, x: &GridFunction, t: f64, n: usize) -> Result<GridFunction> {
    if t == 0.0 {
        return Ok(x.clone());
    }
    if n == 0 || !(t > 0.0) {
        return Err(Error::InvalidSpec(format!(
            "need t >= 0 and n >= 1, got t = {t}, n = {n}"
        )));
    }
    let lambda = t / n as f64;
    let mut u = x.clone();
    for _ in 0..n {
        u = op.resolve(lambda, &u)?;
    }
    Ok(u)
}

/// Fixed-point refinement of the semi-implicit step.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Picard {
    #[default]
    Off,
    On {
        max_iter: usize,
        tol: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralOptions {
    pub picard: Picard,
    /// Abort once the state norm exceeds this value.
    pub ceiling: f64,
}

impl Default for IntegralOptions {
    fn default() -> Self {
        IntegralOptions {
            picard: Picard::Off,
            ceiling: DEFAULT_BLOW_UP_CEILING,
        }
    }
}

/// Solver diagnostics for one time step.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepMeta {
    /// Inner (Newton/CG) iterations of the last resolvent call.
    pub inner_iterations: usize,
    pub inner_residual: f64,
    pub picard_iterations: usize,
    /// Picard did not converge; the semi-implicit value was kept.
    pub picard_fallback: bool,
}

/// Time-stamped states with the forcing sampled along the path.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<GridFunction>,
    forcings: Vec<GridFunction>,
    step_meta: Vec<StepMeta>,
}

impl Trajectory {
    /// Checked constructor. `step_meta` has one entry per step, i.e. one fewer
    /// than `times`.
    pub fn from_parts(
        times: Vec<f64>,
        states: Vec<GridFunction>,
        forcings: Vec<GridFunction>,
        step_meta: Vec<StepMeta>,
    ) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::EmptySeries);
        }
        if times[0] != 0.0 {
            return Err(Error::InvalidSpec(format!(
                "trajectory must start at t = 0, got {}",
                times[0]
            )));
        }
        if let Some(w) = times.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidSpec(format!("times not strictly increasing at {}", w[1])));
        }
        if states.len() != times.len() || forcings.len() != times.len() || step_meta.len() + 1 != times.len() {
            return Err(Error::InvalidSpec(format!(
                "length mismatch: {} times, {} states, {} forcings, {} steps",
                times.len(),
                states.len(),
                forcings.len(),
                step_meta.len()
            )));
        }
        for s in states.iter().chain(&forcings) {
            s.validate()?;
            s.ensure_same_grid(&states[0])?;
        }
        Ok(Trajectory {
            times,
            states,
            forcings,
            step_meta,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[GridFunction] {
        &self.states
    }

    pub fn forcings(&self) -> &[GridFunction] {
        &self.forcings
    }

    pub fn step_meta(&self) -> &[StepMeta] {
        &self.step_meta
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &GridFunction {
        self.states.last().expect("trajectory is nonempty")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory is nonempty")
    }

    /// Steps where Picard iteration fell back to the semi-implicit value.
    pub fn picard_fallbacks(&self) -> usize {
        self.step_meta.iter().filter(|m| m.picard_fallback).count()
    }
}

/// The step map shared by [`solve_integral`] and the impulsive simulator.
///
/// A quasi-accretive `A` is stepped as `B = A + αI` with forcing `αu + f(u)`.
pub(crate) struct Stepper<'a> {
    op: Shifted<'a>,
    forcing: AlphaShifted<'a>,
    f: &'a dyn StateMap,
    picard: Picard,
}

impl<'a> Stepper<'a> {
    pub(crate) fn new(op: &'a dyn Resolvent, f: &'a dyn StateMap, picard: Picard) -> Self {
        let alpha = op.alpha();
        Stepper {
            op: Shifted::new(op),
            forcing: AlphaShifted { alpha, inner: f },
            f,
            picard,
        }
    }

    pub(crate) fn forcing(&self, t: f64, u: &GridFunction) -> GridFunction {
        self.f.eval(t, u)
    }

    /// Advances from `(t_prev, u_prev)` by `h`.
    pub(crate) fn step(&self, t_prev: f64, u_prev: &GridFunction, h: f64) -> Result<(GridFunction, StepMeta)> {
        let g = self.forcing.eval(t_prev, u_prev);
        let (mut u, stats) = self.op.resolve_traced(h, &u_prev.axpy(h, &g)?)?;
        let mut meta = StepMeta {
            inner_iterations: stats.iterations,
            inner_residual: stats.residual,
            ..StepMeta::default()
        };
        if let Picard::On { max_iter, tol } = self.picard {
            let t = t_prev + h;
            let semi = u.clone();
            let mut converged = false;
            for j in 0..max_iter {
                let g = self.forcing.eval(t, &u);
                let (next, stats) = self.op.resolve_traced(h, &u_prev.axpy(h, &g)?)?;
                let d = next.sub(&u)?.sup_norm();
                u = next;
                meta.picard_iterations = j + 1;
                meta.inner_iterations = stats.iterations;
                meta.inner_residual = stats.residual;
                if d < tol {
                    converged = true;
                    break;
                }
            }
            if !converged {
                u = semi;
                meta.picard_fallback = true;
            }
        }
        u.validate()?;
        Ok((u, meta))
    }
}

pub(crate) fn check_ceiling(t: f64, u: &GridFunction, ceiling: f64) -> Result<()> {
    let norm = u.norm();
    if !(norm <= ceiling) {
        return Err(Error::BlowUp { time: t, norm, ceiling });
    }
    Ok(())
}

/// Semi-implicit march `u_k = J_h(u_{k−1} + h·f(t_{k−1}, u_{k−1}))` on a
/// uniform grid of `steps` steps over `[0, T]`.
pub fn solve_integral(
    op: &dyn Resolvent,
    f: &dyn StateMap,
    x0: &GridFunction,
    t_end: f64,
    steps: usize,
    opts: &IntegralOptions,
) -> Result<Trajectory> {
    if !(t_end > 0.0 && t_end.is_finite()) || steps == 0 {
        return Err(Error::InvalidSpec(format!(
            "need T > 0 and steps >= 1, got T = {t_end}, steps = {steps}"
        )));
    }
    x0.validate()?;
    let stepper = Stepper::new(op, f, opts.picard);
    let h = t_end / steps as f64;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut forcings = Vec::with_capacity(steps + 1);
    let mut meta = Vec::with_capacity(steps);
    times.push(0.0);
    forcings.push(stepper.forcing(0.0, x0));
    states.push(x0.clone());
    for k in 1..=steps {
        let t_prev = times[k - 1];
        let t = t_end * k as f64 / steps as f64;
        let (u, m) = stepper.step(t_prev, &states[k - 1], h)?;
        check_ceiling(t, &u, opts.ceiling)?;
        forcings.push(stepper.forcing(t, &u));
        states.push(u);
        times.push(t);
        meta.push(m);
    }
    Trajectory::from_parts(times, states, forcings, meta)
}
