//! Solver-versus-oracle cross-checks behind `accretive validate`.

use std::f64::consts::PI;

use accretive::map::{Pointwise, ZeroMap};
use accretive::operators::{Laplace, LaplaceSpec, PLaplace, PLaplaceSpec, ScaledIdentity};
use accretive::oracles::{
    fine_explicit_plaplace, heat_spectral, perron_max_solution, rk4_scalar, ExplicitOptions, PerronOptions,
};
use accretive::semigroup::{crandall_liggett, solve_integral, IntegralOptions};
use accretive::{GridFunction, NormTag, Result};

struct Check {
    name: &'static str,
    error: f64,
    tol: f64,
}

fn heat() -> Result<Check> {
    let op = Laplace::new(LaplaceSpec::interval(1.0, 201)?)?;
    let x0 = op.sample(|p| (PI * p[0]).sin());
    let u = crandall_liggett(&op, &x0, 0.1, 1024)?;
    let exact = heat_spectral(&[(1, 1.0)], 1.0, 0.1, op.grid())?;
    Ok(Check {
        name: "heat resolvent vs spectral solution",
        error: u.dist(&exact)?,
        tol: 5e-3,
    })
}

fn plaplace() -> Result<Check> {
    let spec = PLaplaceSpec::new(3.0, 1.0, 19);
    let op = PLaplace::new(spec.clone())?;
    let x0 = |x: f64| (PI * x).sin();
    let f = Pointwise::new(|_, _, u| u - u * u * u);
    let implicit = solve_integral(&op, &f, &op.sample(x0), 0.1, 2000, &IntegralOptions::default())?;
    let explicit = fine_explicit_plaplace(&spec, &f, x0, 0.1, &ExplicitOptions::default())?;
    Ok(Check {
        name: "p-Laplace implicit vs fine explicit",
        error: implicit.final_state().dist(explicit.trajectory.final_state())?,
        tol: 1e-2,
    })
}

fn scalar_linear() -> Result<Check> {
    let op = ScaledIdentity {
        rate: 1.0,
        norm: NormTag::Sup,
    };
    let x0 = GridFunction::scalar(2.0, NormTag::Sup);
    let u = solve_integral(&op, &ZeroMap, &x0, 1.0, 4000, &IntegralOptions::default())?;
    let r = rk4_scalar(|y| -y, 2.0, 1.0, 1000);
    Ok(Check {
        name: "scalar resolvent march vs RK4",
        error: (u.final_state().values()[0] - r.last()).abs(),
        tol: 1e-3,
    })
}

fn perron() -> Result<Check> {
    let s = perron_max_solution(|x| 2.0 * x.max(0.0).sqrt(), 0.0, 1.0, &PerronOptions::default())?;
    Ok(Check {
        name: "maximal solution of x' = 2 sqrt(x) vs t^2",
        error: (s.limit.last() - 1.0).abs(),
        tol: 1e-4,
    })
}

pub fn run_all(quiet: bool) -> u8 {
    let checks: [fn() -> Result<Check>; 4] = [heat, plaplace, scalar_linear, perron];
    let mut code = 0;
    for c in checks {
        match c() {
            Ok(c) => {
                let ok = c.error <= c.tol;
                if !ok {
                    code = code.max(super::EXIT_FAIL);
                }
                if !quiet || !ok {
                    println!(
                        "{} {}: error {:e} (tol {:e})",
                        if ok { "PASS" } else { "FAIL" },
                        c.name,
                        c.error,
                        c.tol
                    );
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                code = code.max(super::error_code(&e));
            }
        }
    }
    code
}
