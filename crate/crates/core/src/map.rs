//! Forcing terms `f` of `u̇ ∈ −Au + f(u)`.

use std::sync::Arc;

use crate::grid::{Boundary, GridFunction};

/// A (possibly time-dependent) map between states on the same grid.
pub trait StateMap: Send + Sync {
    fn eval(&self, t: f64, u: &GridFunction) -> GridFunction;
}

impl<F> StateMap for F
where
    F: Fn(f64, &GridFunction) -> GridFunction + Send + Sync,
{
    fn eval(&self, t: f64, u: &GridFunction) -> GridFunction {
        self(t, u)
    }
}

/// The map `f ≡ 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroMap;

impl StateMap for ZeroMap {
    fn eval(&self, _t: f64, u: &GridFunction) -> GridFunction {
        u.map(|_| 0.0)
    }
}

/// Scalar node function `f(coords, t, u)`.
pub type NodeFn = Arc<dyn Fn([f64; 2], f64, f64) -> f64 + Send + Sync>;

/// Nemytskii operator `F(u)(x) = f(x, u(x))`.
///
/// Dirichlet boundary nodes are left at zero so that `u + h·F(u)` stays in
/// the Dirichlet space.
#[derive(Clone)]
pub struct Pointwise {
    f: NodeFn,
}

impl Pointwise {
    pub fn new(f: impl Fn([f64; 2], f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Pointwise { f: Arc::new(f) }
    }

    pub fn from_node_fn(f: NodeFn) -> Self {
        Pointwise { f }
    }

    pub fn node(&self, x: [f64; 2], t: f64, u: f64) -> f64 {
        (self.f)(x, t, u)
    }

    pub fn node_fn(&self) -> NodeFn {
        self.f.clone()
    }

    /// `f` shifted by a constant, `f(x,u) + c`.
    pub fn shifted(&self, c: f64) -> Self {
        let f = self.f.clone();
        Pointwise::new(move |x, t, u| f(x, t, u) + c)
    }
}

impl std::fmt::Debug for Pointwise {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("Pointwise(..)")
    }
}

impl StateMap for Pointwise {
    fn eval(&self, t: f64, u: &GridFunction) -> GridFunction {
        let dirichlet = u.boundary() == Boundary::DirichletZero;
        let grid = u.grid();
        let values = u
            .values()
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                if dirichlet && grid.is_boundary(i) {
                    0.0
                } else {
                    (self.f)(grid.coords(i), t, v)
                }
            })
            .collect();
        u.with_values(values)
    }
}

/// `u ↦ α·u + f(u)`, the forcing that accompanies the shifted operator `A + αI`.
pub struct AlphaShifted<'a> {
    pub alpha: f64,
    pub inner: &'a dyn StateMap,
}

impl StateMap for AlphaShifted<'_> {
    fn eval(&self, t: f64, u: &GridFunction) -> GridFunction {
        let fu = self.inner.eval(t, u);
        fu.axpy(self.alpha, u).expect("forcing preserves the grid")
    }
}
