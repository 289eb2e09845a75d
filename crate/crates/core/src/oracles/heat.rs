use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::{Boundary, Grid, GridFunction, NormTag};

/// `(π/l)²`, the first Dirichlet eigenvalue of `−d²/dx²` on `(0, l)`.
pub fn heat_first_eigenvalue(length: f64) -> f64 {
    (PI / length).powi(2)
}

/// `Σ c_k e^{−(kπ/l)² t} sin(kπx/l)` sampled on a 1D grid.
pub fn heat_spectral(modes: &[(usize, f64)], length: f64, t: f64, grid: &Grid) -> Result<GridFunction> {
    match grid {
        Grid::Interval { length: gl, .. } if (gl - length).abs() <= 1e-12 * length => {}
        _ => {
            return Err(Error::GeometryMismatch(format!(
                "heat oracle needs an interval of length {length}, got {grid:?}"
            )))
        }
    }
    Ok(GridFunction::from_fn(
        grid.clone(),
        Boundary::DirichletZero,
        NormTag::Sup,
        |p| {
            modes
                .iter()
                .map(|&(k, c)| {
                    let w = k as f64 * PI / length;
                    c * (-w * w * t).exp() * (w * p[0]).sin()
                })
                .sum()
        },
    ))
}
