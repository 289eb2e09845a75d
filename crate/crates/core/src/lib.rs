//! Resolvent-based integral solutions of `u̇ ∈ −Au + f(u)` for m-accretive
//! `A`, with empirical checks of flow invariance for constraint sets.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod expr;
pub mod grid;
pub mod invariance;
pub mod map;
pub mod operators;
pub mod oracles;
pub mod scenario;
pub mod semigroup;

pub use error::{Error, Result};
pub use grid::{Boundary, Grid, GridFunction, NormTag};
pub use map::{Pointwise, StateMap, ZeroMap};
pub use operators::{Resolvent, SolveStats};
