use crate::error::{Error, Result};
use crate::grid::{Boundary, Grid, GridFunction, NormTag};
use crate::map::StateMap;
use crate::operators::PLaplaceSpec;
use crate::semigroup::{StepMeta, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExplicitOptions {
    /// Fine cells per coarse cell; at least 4.
    pub refine: usize,
    /// Number of equally spaced output times after `t = 0`.
    pub outputs: usize,
    /// Abort once the stable step falls below this.
    pub min_step: f64,
}

impl Default for ExplicitOptions {
    fn default() -> Self {
        ExplicitOptions {
            refine: 4,
            outputs: 10,
            min_step: 1e-10,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExplicitRun {
    /// States restricted to the coarse grid of `spec`. `step_meta` counts
    /// explicit substeps per output interval in `inner_iterations`.
    pub trajectory: Trajectory,
    /// Set when the stability restriction forced the step below `min_step`;
    /// the trajectory then ends at the last completed output time.
    pub aborted_at: Option<f64>,
}

fn phi(p: f64, s: f64) -> f64 {
    s.abs().powf(p - 2.0) * s
}

/// Forward-Euler flux-form march of `u̇ = Δ_p u + f(u)` on a grid `refine`
/// times finer than `spec.grid()`, restricted back to the coarse nodes.
///
/// The step obeys `h_t ≤ h_x² / (2(p−1)·max|Du|^{p−2} + 1)`, recomputed every step.
pub fn fine_explicit_plaplace(
    spec: &PLaplaceSpec,
    f: &dyn StateMap,
    x0: impl Fn(f64) -> f64,
    t_end: f64,
    opts: &ExplicitOptions,
) -> Result<ExplicitRun> {
    if opts.refine < 4 {
        return Err(Error::InvalidSpec(format!(
            "refinement must be at least 4, got {}",
            opts.refine
        )));
    }
    if !(t_end > 0.0) || opts.outputs == 0 {
        return Err(Error::InvalidSpec("need T > 0 and at least one output".into()));
    }
    let p = spec.p;
    let coarse = spec.grid()?;
    let coarse_cells = spec.interior + 1;
    let fine = Grid::interval(spec.length, opts.refine * coarse_cells + 1)?;
    let hx = fine.spacing()[0];
    let n = fine.len();

    let mut u = GridFunction::from_fn(fine.clone(), Boundary::DirichletZero, NormTag::Sup, |x| x0(x[0]));
    let restrict = |u: &GridFunction| -> Result<GridFunction> {
        let v = (0..coarse.len()).map(|i| u.values()[i * opts.refine]).collect();
        GridFunction::new(coarse.clone(), v, Boundary::DirichletZero, NormTag::Sup)
    };

    let mut t = 0.0;
    let mut times = vec![0.0];
    let mut snapshot = restrict(&u)?;
    let mut states = vec![snapshot.clone()];
    let mut forcings = vec![f.eval(0.0, &snapshot)];
    let mut meta = Vec::new();
    let mut aborted_at = None;

    'outer: for j in 1..=opts.outputs {
        let target = t_end * j as f64 / opts.outputs as f64;
        let mut substeps = 0;
        while t < target {
            let v = u.values();
            let max_slope = (1..n).fold(0.0_f64, |m, i| m.max(((v[i] - v[i - 1]) / hx).abs()));
            let stable = hx * hx / (2.0 * (p - 1.0) * max_slope.powf(p - 2.0) + 1.0);
            if stable < opts.min_step {
                aborted_at = Some(t);
                break 'outer;
            }
            let dt = stable.min(target - t);
            let fu = f.eval(t, &u);
            let fv = fu.values();
            let mut next = v.to_vec();
            for i in 1..n - 1 {
                let flux = (phi(p, (v[i + 1] - v[i]) / hx) - phi(p, (v[i] - v[i - 1]) / hx)) / hx;
                next[i] = v[i] + dt * (flux + fv[i]);
            }
            u = GridFunction::new(fine.clone(), next, Boundary::DirichletZero, NormTag::Sup)?;
            t = if target - t <= stable { target } else { t + dt };
            substeps += 1;
        }
        snapshot = restrict(&u)?;
        forcings.push(f.eval(t, &snapshot));
        states.push(snapshot.clone());
        times.push(target);
        meta.push(StepMeta {
            inner_iterations: substeps,
            ..StepMeta::default()
        });
    }
    Ok(ExplicitRun {
        trajectory: Trajectory::from_parts(times, states, forcings, meta)?,
        aborted_at,
    })
}
