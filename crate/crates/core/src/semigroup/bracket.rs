use crate::error::Result;
use crate::grid::{GridFunction, NormTag};

/// Ties within this distance of `‖x‖∞` count as attaining the sup norm.
const ATTAIN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

/// The semi-inner products `[x, y]₊` and `[x, y]₋`, the right and left
/// derivatives of `h ↦ ‖x + hy‖` at `h = 0`.
pub fn bracket(x: &GridFunction, y: &GridFunction, side: Side) -> Result<f64> {
    x.ensure_compatible(y)?;
    let sign = match side {
        Side::Plus => 1.0,
        Side::Minus => -1.0,
    };
    match x.norm_tag() {
        NormTag::L2 => {
            let nx = x.l2_norm();
            if nx == 0.0 {
                return Ok(sign * y.l2_norm());
            }
            Ok(x.inner(y)? / nx)
        }
        NormTag::Sup => {
            let nx = x.sup_norm();
            if nx == 0.0 {
                return Ok(sign * y.sup_norm());
            }
            let candidates = x
                .values()
                .iter()
                .zip(y.values())
                .filter(|(xi, _)| xi.abs() >= nx - ATTAIN_TOL)
                .map(|(xi, yi)| xi.signum() * yi);
            Ok(match side {
                Side::Plus => candidates.fold(f64::NEG_INFINITY, f64::max),
                Side::Minus => candidates.fold(f64::INFINITY, f64::min),
            })
        }
    }
}
