//! Pointwise tangency test `⟨∇V(x), −Ax + f(x)⟩ ≤ ω(·)` on sampled states.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::grid::{Grid, GridFunction};
use crate::map::StateMap;
use crate::operators::{Resolvent, TransportBirth};

use super::functional::ConstraintFunctional;
use super::omega::OmegaFunction;
use super::report::{CertReport, Witness};

pub const POINTWISE_TOL: f64 = 1e-8;
/// `V(x)` must exceed this for a sample to count as strictly outside/inside.
pub const REGION_MARGIN: f64 = 1e-14;

/// Where in state space the condition is imposed, and on which argument of `ω`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// `V(x) > 0`, right-hand side `ω(V(x))`.
    OutsideK,
    /// `V(x) < 0`, right-hand side `ω(−V(x))`.
    InsideK0,
    /// Any sample, right-hand side `ω(|V(x)|)`.
    NearBoundary,
}

impl Region {
    fn accepts(self, v: f64) -> bool {
        match self {
            Region::OutsideK => v > REGION_MARGIN,
            Region::InsideK0 => v < -REGION_MARGIN,
            Region::NearBoundary => v.is_finite(),
        }
    }

    fn omega_arg(self, v: f64) -> f64 {
        match self {
            Region::OutsideK => v,
            Region::InsideK0 => -v,
            Region::NearBoundary => v.abs(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Sample {
    pub label: String,
    pub state: GridFunction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleOptions {
    pub deltas: Vec<f64>,
    pub random_bumps: usize,
    pub seed: u64,
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions {
            deltas: vec![1e-1, 1e-2, 1e-3, 1e-4],
            random_bumps: 2,
            seed: 0,
        }
    }
}

fn normalized(grid: &Grid, i: usize) -> [f64; 2] {
    let c = grid.coords(i);
    match *grid {
        Grid::Interval { length, .. } => [c[0] / length, 0.5],
        Grid::Rectangle { lx, ly, .. } => [c[0] / lx, c[1] / ly],
        Grid::Points { n } => [if n > 1 { i as f64 / (n - 1) as f64 } else { 0.5 }, 0.5],
    }
}

/// Nonnegative bump profiles supported away from boundary nodes.
pub fn bump_profiles(grid: &Grid, random: usize, seed: u64) -> Vec<(String, Vec<f64>)> {
    let n = grid.len();
    let interior: Vec<usize> = (0..n).filter(|&i| !grid.is_boundary(i)).collect();
    if interior.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let is_1d_like = !matches!(grid, Grid::Rectangle { .. });
    let mut single = vec![0.0; n];
    single[interior[interior.len() / 2]] = 1.0;
    out.push(("single".to_string(), single));
    if interior.len() > 1 {
        let mut edge = vec![0.0; n];
        edge[interior[0]] = 1.0;
        out.push(("single-edge".to_string(), edge));
    }
    let plateau: Vec<f64> = (0..n)
        .map(|i| {
            if grid.is_boundary(i) {
                return 0.0;
            }
            let p = normalized(grid, i);
            let inside = |s: f64| (0.25..=0.75).contains(&s);
            if inside(p[0]) && (is_1d_like || inside(p[1])) {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    if plateau.iter().any(|&v| v > 0.0) {
        out.push(("plateau".to_string(), plateau));
    }
    let smooth: Vec<f64> = (0..n)
        .map(|i| {
            if grid.is_boundary(i) {
                return 0.0;
            }
            let p = normalized(grid, i);
            let s = |a: f64| (std::f64::consts::PI * a).sin().max(0.0);
            if is_1d_like {
                s(p[0])
            } else {
                s(p[0]) * s(p[1])
            }
        })
        .collect();
    if smooth.iter().any(|&v| v > 0.0) {
        out.push(("smooth".to_string(), smooth));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..random {
        let r: Vec<f64> = (0..n)
            .map(|i| if grid.is_boundary(i) { 0.0 } else { rng.gen::<f64>() })
            .collect();
        out.push((format!("random{k}"), r));
    }
    out
}

/// States `base + direction·δ·bump` over bump profiles and amplitudes `δ`.
///
/// With a birth operator, node 0 of each bump is reset so the perturbed state
/// keeps the birth law `u(0) = ⟨β, u⟩` whenever `base` does.
pub fn perturbation_family(
    base: &GridFunction,
    direction: f64,
    opts: &SampleOptions,
    birth: Option<&TransportBirth>,
) -> Vec<Sample> {
    let grid = base.grid();
    let mut profiles = bump_profiles(grid, opts.random_bumps, opts.seed);
    if let Some(op) = birth {
        let k0 = op.births(&unit(grid.len(), 0));
        for (_, b) in profiles.iter_mut() {
            b[0] = 0.0;
            b[0] = op.births(b) / (1.0 - k0);
        }
    }
    let mut out = Vec::new();
    for (name, b) in &profiles {
        for &d in &opts.deltas {
            let values: Vec<f64> = base
                .values()
                .iter()
                .zip(b)
                .map(|(z, b)| z + direction * d * b)
                .collect();
            out.push(Sample {
                label: format!("{name} delta={d:e}"),
                state: base.with_values(values),
            });
        }
    }
    out
}

fn unit(n: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = 1.0;
    e
}

/// Checks `⟨∇V(x), −Ax + f(t,x)⟩ ≤ ω(arg) + tol` on every sample in `region`.
///
/// Inconclusive when `V` has no gradient, `A` cannot be applied, or no sample
/// lies in the region.
#[allow(clippy::too_many_arguments)]
pub fn check_pointwise_condition(
    op: &dyn Resolvent,
    f: &dyn StateMap,
    v_fn: &ConstraintFunctional,
    omega: &OmegaFunction,
    samples: &[Sample],
    region: Region,
    t: f64,
    tol: f64,
) -> Result<CertReport> {
    let check = format!("pointwise[{}]", v_fn.name());
    let mut tested = Vec::new();
    let mut rejected = 0usize;
    for s in samples {
        let v = v_fn.eval_at(t, &s.state)?;
        if !region.accepts(v) {
            rejected += 1;
            continue;
        }
        let Some(grad) = v_fn.grad_at(t, &s.state)? else {
            return Ok(CertReport::inconclusive(check, "functional has no gradient"));
        };
        if !op.in_domain(&s.state) {
            rejected += 1;
            continue;
        }
        let Some(ax) = op.apply(&s.state) else {
            return Ok(CertReport::inconclusive(
                check,
                format!("{} cannot be applied directly", op.name()),
            ));
        };
        let drift = f.eval(t, &s.state).axpy(-1.0, &ax)?;
        let lhs = grad.inner(&drift)?;
        let rhs = omega.eval(region.omega_arg(v))?;
        tested.push(Witness::new(s.label.clone(), lhs, rhs));
    }
    let mut r = if tested.is_empty() {
        CertReport::inconclusive(check, "no sample in region")
    } else {
        CertReport::from_samples(check, tol, tested)
    };
    r.meta("region", format!("{region:?}"));
    r.meta("omega", omega);
    r.meta("rejected", rejected);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::super::report::Verdict;
    use super::*;
    use crate::grid::{Boundary, NormTag};
    use crate::map::Pointwise;
    use crate::operators::{Laplace, LaplaceSpec};

    #[test]
    fn bumps_vanish_on_boundary() {
        let g = Grid::rectangle(1.0, 1.0, 7, 7).unwrap();
        for (name, b) in bump_profiles(&g, 1, 3) {
            for (i, v) in b.iter().enumerate() {
                if g.is_boundary(i) {
                    assert_eq!(*v, 0.0, "{name}");
                }
            }
            assert!(b.iter().any(|&v| v > 0.0), "{name}");
        }
    }

    #[test]
    fn heat_with_subsolution_obstacle_passes() {
        // m = −1 − 0.1 sin(πx) has Δm ≥ 0 and f(m) ≥ 0 for f = u − u³.
        let op = Laplace::new(LaplaceSpec::interval(1.0, 21).unwrap()).unwrap();
        let profile = |p: [f64; 2]| -1.0 - 0.1 * (std::f64::consts::PI * p[0]).sin();
        let m = GridFunction::from_fn(op.grid().clone(), Boundary::None, NormTag::Sup, profile);
        let v = ConstraintFunctional::quad_lower(&m).unwrap();
        let samples = perturbation_family(&op.sample(profile), -1.0, &SampleOptions::default(), None);
        let f = Pointwise::new(|_, _, u| u - u * u * u);
        let omega = OmegaFunction::linear(0.0).unwrap();
        let r = check_pointwise_condition(&op, &f, &v, &omega, &samples, Region::OutsideK, 0.0, POINTWISE_TOL).unwrap();
        assert_eq!(r.verdict, Verdict::Certified, "{r}");
        assert_eq!(r.get_meta("rejected"), Some("0"));
    }

    #[test]
    fn reversed_inequality_is_violated() {
        // Pushing down with f = −50 breaks the obstacle from below.
        let op = Laplace::new(LaplaceSpec::interval(1.0, 21).unwrap()).unwrap();
        let profile = |_: [f64; 2]| -1.0;
        let m = GridFunction::from_fn(op.grid().clone(), Boundary::None, NormTag::Sup, profile);
        let v = ConstraintFunctional::quad_lower(&m).unwrap();
        let samples = perturbation_family(&op.sample(profile), -1.0, &SampleOptions::default(), None);
        let f = Pointwise::new(|_, _, _| -50.0);
        let omega = OmegaFunction::linear(1.0).unwrap();
        let r = check_pointwise_condition(&op, &f, &v, &omega, &samples, Region::OutsideK, 0.0, POINTWISE_TOL).unwrap();
        assert_eq!(r.verdict, Verdict::Violated);
        assert!(r.witnesses.iter().all(|w| w.lhs > w.rhs + r.tolerance));
    }

    #[test]
    fn birth_closure_is_kept() {
        let op = TransportBirth::new(crate::operators::TransportBirthSpec {
            age_horizon: 2.0,
            nodes: 21,
            beta: vec![0.25; 21],
            variant: crate::operators::TransportNorm::Sup,
        })
        .unwrap();
        let base = op.sample(|_| 0.0);
        for s in perturbation_family(&base, -1.0, &SampleOptions::default(), Some(&op)) {
            assert!(op.in_domain(&s.state), "{}", s.label);
        }
    }
}
