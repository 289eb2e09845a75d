//! Time-augmented operator `𝐀(t, u) = (0, Au)` on `ℝ × X` with norm `|t| + ‖x‖`.

use std::sync::Arc;

use crate::error::Result;
use crate::grid::GridFunction;

use super::Resolvent;

/// A point `(t, x)` of the augmented space.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedState {
    pub clock: f64,
    pub state: GridFunction,
}

impl AugmentedState {
    pub fn new(clock: f64, state: GridFunction) -> Self {
        AugmentedState { clock, state }
    }

    pub fn norm(&self) -> f64 {
        self.clock.abs() + self.state.norm()
    }

    pub fn dist(&self, other: &AugmentedState) -> Result<f64> {
        Ok((self.clock - other.clock).abs() + self.state.dist(&other.state)?)
    }
}

/// Wraps an inner operator; the clock component passes through the resolvent.
#[derive(Clone)]
pub struct TimeAugmented {
    inner: Arc<dyn Resolvent>,
}

impl TimeAugmented {
    pub fn new(inner: Arc<dyn Resolvent>) -> Self {
        TimeAugmented { inner }
    }

    pub fn inner(&self) -> &dyn Resolvent {
        self.inner.as_ref()
    }

    pub fn resolve(&self, lambda: f64, x: &AugmentedState) -> Result<AugmentedState> {
        Ok(AugmentedState {
            clock: x.clock,
            state: self.inner.resolve(lambda, &x.state)?,
        })
    }
}
