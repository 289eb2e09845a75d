#![allow(clippy::needless_range_loop)]

//! Resolvents against brute-force references built from scratch here.

use accretive::operators::{
    Laplace, LaplaceSpec, PLaplace, PLaplaceSpec, TransportBirth, TransportBirthSpec, TransportNorm,
};
use accretive::semigroup::implicit_euler_step;
use accretive::{Boundary, Grid, GridFunction, NormTag, Resolvent};

/// Gaussian elimination with partial pivoting.
fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let m = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= m * a[c][k];
            }
            b[r] -= m * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

#[test]
fn laplace_step_on_hat_matches_dense_solve() {
    let (n_int, h, step) = (5, 1.0 / 6.0, 0.05);
    let op = Laplace::new(LaplaceSpec::interval(1.0, n_int + 2).unwrap()).unwrap();
    let hat = |x: f64| (1.0 - (x - 0.5).abs() / 0.5).max(0.0);
    let u_prev = op.sample(|p| hat(p[0]));
    let v = op.zeros();
    let u = implicit_euler_step(&op, step, &u_prev, &v).unwrap();

    let c = step / (h * h);
    let a: Vec<Vec<f64>> = (0..n_int)
        .map(|i| {
            (0..n_int)
                .map(|j| match i.abs_diff(j) {
                    0 => 1.0 + 2.0 * c,
                    1 => -c,
                    _ => 0.0,
                })
                .collect()
        })
        .collect();
    let b: Vec<f64> = (1..=n_int).map(|i| hat(i as f64 * h)).collect();
    let want = dense_solve(a, b);
    assert_eq!(u.values()[0], 0.0);
    assert_eq!(u.values()[n_int + 1], 0.0);
    for i in 0..n_int {
        assert!(
            (u.values()[i + 1] - want[i]).abs() < 1e-13,
            "node {}: {} vs {}",
            i + 1,
            u.values()[i + 1],
            want[i]
        );
    }
}

fn phi(p: f64, s: f64) -> f64 {
    s.abs().powf(p - 2.0) * s
}

/// Coordinate descent on `Σ h(½(uᵢ−gᵢ)² + (λ/p)|Duᵢ|ᵖ)`; each coordinate
/// minimized by bisection on the (monotone) partial derivative.
fn plaplace_energy_oracle(p: f64, h: f64, lambda: f64, g: &[f64]) -> Vec<f64> {
    let n = g.len();
    let mut u = g.to_vec();
    for _ in 0..100_000 {
        let mut change = 0.0_f64;
        for i in 1..n - 1 {
            let d = |x: f64| (x - g[i]) + lambda / h * (phi(p, (x - u[i - 1]) / h) - phi(p, (u[i + 1] - x) / h));
            let (mut lo, mut hi) = (-10.0, 10.0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if d(mid) > 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let new = 0.5 * (lo + hi);
            change = change.max((new - u[i]).abs());
            u[i] = new;
        }
        if change < 1e-14 {
            break;
        }
    }
    u
}

#[test]
fn plaplace_resolvent_matches_energy_minimizer() {
    let (p, n_int, lambda) = (3.0, 5, 0.1);
    let op = PLaplace::new(PLaplaceSpec::new(p, 1.0, n_int)).unwrap();
    let mut gv = vec![0.0; n_int + 2];
    gv[3] = 1.0;
    let g = GridFunction::new(op.grid().clone(), gv.clone(), Boundary::DirichletZero, NormTag::Sup).unwrap();
    let u = op.resolve(lambda, &g).unwrap();
    let want = plaplace_energy_oracle(p, 1.0 / (n_int + 1) as f64, lambda, &gv);
    for i in 0..n_int + 2 {
        assert!(
            (u.values()[i] - want[i]).abs() < 1e-9,
            "node {i}: {} vs {}",
            u.values()[i],
            want[i]
        );
    }
    // Both minimize the same strictly convex energy.
    assert!(op.energy(lambda, u.values(), &gv) <= op.energy(lambda, &want, &gv) + 1e-10);
}

#[test]
fn transport_resolvent_matches_dense_solve() {
    let (horizon, nodes, lambda) = (2.0, 11, 0.3);
    let op = TransportBirth::new(TransportBirthSpec {
        age_horizon: horizon,
        nodes,
        beta: vec![0.25; nodes],
        variant: TransportNorm::Sup,
    })
    .unwrap();
    let g = op.sample(|_| 1.0);
    let u = op.resolve(lambda, &g).unwrap();

    // Row 0: u₀ − Σ wᵢβᵢuᵢ = 0. Rows i ≥ 1: uᵢ + λ(uᵢ − uᵢ₋₁)/h = gᵢ.
    let h = horizon / (nodes - 1) as f64;
    let w = Grid::interval(horizon, nodes).unwrap().weights();
    let r = lambda / h;
    let mut a = vec![vec![0.0; nodes]; nodes];
    let mut b = vec![1.0; nodes];
    for j in 0..nodes {
        a[0][j] = -w[j] * 0.25;
    }
    a[0][0] += 1.0;
    b[0] = 0.0;
    for i in 1..nodes {
        a[i][i] = 1.0 + r;
        a[i][i - 1] = -r;
    }
    let want = dense_solve(a, b);
    for i in 0..nodes {
        assert!(
            (u.values()[i] - want[i]).abs() < 1e-13,
            "node {i}: {} vs {}",
            u.values()[i],
            want[i]
        );
    }
}
