//! Impulsive evolution with state-dependent barriers `t = τ_j(u)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::map::StateMap;
use crate::operators::Resolvent;
use crate::semigroup::{IntegralOptions, StepMeta, Stepper, Trajectory};

use super::report::{CertReport, Witness};

pub type TauFn = Arc<dyn Fn(&GridFunction) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct Barrier {
    pub name: String,
    pub tau: TauFn,
    pub impulse: Arc<dyn StateMap>,
}

impl Barrier {
    pub fn new(
        name: impl Into<String>,
        tau: impl Fn(&GridFunction) -> f64 + Send + Sync + 'static,
        impulse: impl StateMap + 'static,
    ) -> Self {
        Barrier {
            name: name.into(),
            tau: Arc::new(tau),
            impulse: Arc::new(impulse),
        }
    }

    /// `V(t, u) = τ(u) − t`; the barrier is ahead while this is positive.
    pub fn v(&self, t: f64, u: &GridFunction) -> f64 {
        (self.tau)(u) - t
    }
}

impl fmt::Debug for Barrier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Barrier({})", self.name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpulsiveOptions {
    pub integral: IntegralOptions,
    pub max_bisections: usize,
}

impl Default for ImpulsiveOptions {
    fn default() -> Self {
        ImpulsiveOptions {
            integral: IntegralOptions::default(),
            max_bisections: 40,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Jump {
    pub barrier: usize,
    pub time: f64,
    /// Width of the final bisection bracket, in time units.
    pub bracket: f64,
    pub pre_state: GridFunction,
    pub post_state: GridFunction,
    /// `V_j(t, u⁺)`; the jump must land in the epigraph, so this is `≤ 0`.
    pub v_after: f64,
}

#[derive(Debug, Clone)]
pub struct ImpulsiveRun {
    /// States at the uniform grid times; jumps happen between grid points.
    pub trajectory: Trajectory,
    pub jumps: Vec<Jump>,
    pub hit_counts: Vec<usize>,
    /// Largest `V_j` at grid times after the first hit of barrier `j`.
    pub max_v_after_hit: Vec<Option<f64>>,
    /// Grid times at which a hit barrier was found ahead of the state again.
    pub epigraph_exits: Vec<(usize, f64)>,
}

impl ImpulsiveRun {
    pub fn at_most_once(&self) -> bool {
        self.hit_counts.iter().all(|&c| c <= 1)
    }

    /// Hit counts against 1 and post-jump epigraph membership.
    pub fn report(&self) -> CertReport {
        let mut w: Vec<Witness> = self
            .hit_counts
            .iter()
            .enumerate()
            .map(|(j, &c)| Witness::new(format!("hits on barrier {}", j + 1), c as f64, 1.0))
            .collect();
        for jump in &self.jumps {
            w.push(Witness::new(
                format!("V after jump on barrier {} at t={}", jump.barrier + 1, jump.time),
                jump.v_after,
                0.0,
            ));
        }
        for (j, m) in self.max_v_after_hit.iter().enumerate() {
            if let Some(m) = m {
                // Strictly negative afterwards.
                w.push(Witness::new(
                    format!("max V of barrier {} after hit", j + 1),
                    *m,
                    -f64::MIN_POSITIVE,
                ));
            }
        }
        let mut r = CertReport::from_samples("impulsive_barriers", 0.0, w);
        r.meta("hit_counts", format!("{:?}", self.hit_counts));
        r
    }
}

struct Event {
    barrier: usize,
    theta: f64,
    state: GridFunction,
    meta: StepMeta,
}

/// Marches `u̇ ∈ −Au + f(u)` with the same step map as
/// [`crate::semigroup::solve_integral`], applying `u⁺ = u + I_j(u)` whenever
/// `τ_j(u) − t` changes sign. Event times are located by bisection on the
/// fraction of the current step.
pub fn simulate_impulsive(
    op: &dyn Resolvent,
    f: &dyn StateMap,
    barriers: &[Barrier],
    x0: &GridFunction,
    t_end: f64,
    steps: usize,
    opts: &ImpulsiveOptions,
) -> Result<ImpulsiveRun> {
    if !(t_end > 0.0 && t_end.is_finite()) || steps == 0 {
        return Err(Error::InvalidSpec(format!(
            "need T > 0 and steps >= 1, got T = {t_end}, steps = {steps}"
        )));
    }
    x0.validate()?;
    let stepper = Stepper::new(op, f, opts.integral.picard);
    let h = t_end / steps as f64;
    let nb = barriers.len();
    let mut armed: Vec<bool> = barriers.iter().map(|b| b.v(0.0, x0) > 0.0).collect();
    let mut hit_counts = vec![0usize; nb];
    let mut last_hit: Vec<Option<f64>> = vec![None; nb];
    let mut max_after: Vec<Option<f64>> = vec![None; nb];
    let mut exits = Vec::new();
    let mut jumps = Vec::new();

    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut forcings = Vec::with_capacity(steps + 1);
    let mut metas = Vec::with_capacity(steps);
    times.push(0.0);
    forcings.push(stepper.forcing(0.0, x0));
    states.push(x0.clone());

    for k in 1..=steps {
        let t_grid = t_end * k as f64 / steps as f64;
        let mut t_cur = times[k - 1];
        let mut u_cur: GridFunction = states[k - 1].clone();
        let mut frac = 1.0;
        let mut meta: StepMeta;
        loop {
            let rem = frac * h;
            let (u_end, m_end) = stepper.step(t_cur, &u_cur, rem)?;
            let mut event: Option<Event> = None;
            for (j, b) in barriers.iter().enumerate() {
                if !armed[j] {
                    continue;
                }
                if b.v(t_cur, &u_cur) <= 0.0 {
                    event = Some(Event {
                        barrier: j,
                        theta: 0.0,
                        state: u_cur.clone(),
                        meta: StepMeta::default(),
                    });
                    break;
                }
                if b.v(t_cur + rem, &u_end) > 0.0 {
                    continue;
                }
                let (mut lo, mut hi) = (0.0, 1.0);
                let mut hit = (u_end.clone(), m_end);
                for _ in 0..opts.max_bisections {
                    let mid = 0.5 * (lo + hi);
                    let (u_mid, m_mid) = stepper.step(t_cur, &u_cur, mid * rem)?;
                    if b.v(t_cur + mid * rem, &u_mid) > 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                        hit = (u_mid, m_mid);
                    }
                }
                if event.as_ref().is_none_or(|e| hi < e.theta) {
                    event = Some(Event {
                        barrier: j,
                        theta: hi,
                        state: hit.0,
                        meta: hit.1,
                    });
                }
            }
            let Some(e) = event else {
                u_cur = u_end;
                meta = m_end;
                break;
            };
            let b = &barriers[e.barrier];
            let t_e = t_cur + e.theta * rem;
            let jump = b.impulse.eval(t_e, &e.state);
            let post = e.state.add(&jump)?;
            post.validate()?;
            armed[e.barrier] = false;
            hit_counts[e.barrier] += 1;
            last_hit[e.barrier] = Some(t_e);
            jumps.push(Jump {
                barrier: e.barrier,
                time: t_e,
                bracket: rem * 0.5f64.powi(opts.max_bisections as i32),
                pre_state: e.state,
                v_after: b.v(t_e, &post),
                post_state: post.clone(),
            });
            meta = e.meta;
            t_cur = t_e;
            u_cur = post;
            frac *= 1.0 - e.theta;
            if frac <= 0.0 || t_cur >= t_grid {
                break;
            }
        }
        crate::semigroup::check_ceiling(t_grid, &u_cur, opts.integral.ceiling)?;
        for (j, b) in barriers.iter().enumerate() {
            let Some(th) = last_hit[j] else { continue };
            if t_grid <= th {
                continue;
            }
            let v = b.v(t_grid, &u_cur);
            max_after[j] = Some(max_after[j].map_or(v, |m: f64| m.max(v)));
            if !armed[j] && v > 0.0 {
                armed[j] = true;
                exits.push((j, t_grid));
            }
        }
        forcings.push(stepper.forcing(t_grid, &u_cur));
        states.push(u_cur);
        times.push(t_grid);
        metas.push(meta);
    }
    Ok(ImpulsiveRun {
        trajectory: Trajectory::from_parts(times, states, forcings, metas)?,
        jumps,
        hit_counts,
        max_v_after_hit: max_after,
        epigraph_exits: exits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::NormTag;
    use crate::map::ZeroMap;
    use crate::operators::ZeroOperator;
    use crate::semigroup::solve_integral;

    #[test]
    fn constant_barrier_hit_once() {
        let op = ZeroOperator { norm: NormTag::Sup };
        let b = Barrier::new(
            "one",
            |_: &GridFunction| 1.0,
            |_: f64, u: &GridFunction| u.map(|v| v + 1.0),
        );
        let steps = 64;
        let h = 2.0 / steps as f64;
        let x0 = GridFunction::scalar(0.0, NormTag::Sup);
        let run = simulate_impulsive(&op, &ZeroMap, &[b], &x0, 2.0, steps, &ImpulsiveOptions::default()).unwrap();
        assert_eq!(run.hit_counts, vec![1]);
        assert!((run.jumps[0].time - 1.0).abs() <= h);
        assert_eq!(run.trajectory.final_state().values()[0], 1.0);
        assert!(run.max_v_after_hit[0].unwrap() < 0.0);
        assert!(run.report().is_certified());
    }

    #[test]
    fn no_barriers_matches_solve_integral() {
        let op = crate::operators::ScaledIdentity {
            rate: 0.7,
            norm: NormTag::Sup,
        };
        let f = crate::map::Pointwise::new(|_, t, u| (t + u).sin());
        let x0 = GridFunction::vector(vec![0.3, -1.0, 2.0], NormTag::Sup).unwrap();
        let run = simulate_impulsive(&op, &f, &[], &x0, 1.3, 37, &ImpulsiveOptions::default()).unwrap();
        let plain = solve_integral(&op, &f, &x0, 1.3, 37, &IntegralOptions::default()).unwrap();
        assert_eq!(run.trajectory.times(), plain.times());
        assert_eq!(run.trajectory.states(), plain.states());
        assert!(run.jumps.is_empty());
    }

    #[test]
    fn returning_barrier_is_reported_not_fatal() {
        // τ(u) = 1 + u with impulse +2 pushes the barrier ahead again; it is hit twice.
        let op = ZeroOperator { norm: NormTag::Sup };
        let b = Barrier::new(
            "back",
            |u: &GridFunction| 1.0 + u.values()[0],
            |_: f64, u: &GridFunction| u.map(|_| 2.0),
        );
        let x0 = GridFunction::scalar(0.0, NormTag::Sup);
        let run = simulate_impulsive(&op, &ZeroMap, &[b], &x0, 5.0, 100, &ImpulsiveOptions::default()).unwrap();
        assert!(!run.at_most_once());
        assert!(!run.epigraph_exits.is_empty());
        let r = run.report();
        assert_eq!(r.verdict, super::super::report::Verdict::Violated);
    }
}
