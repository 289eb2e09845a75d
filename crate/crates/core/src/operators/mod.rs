//! Operators presented through their resolvents `J_λ = (I + λA)⁻¹`.

mod augmented;
mod cg;
mod laplace;
mod plaplace;
mod transport;
pub mod tridiag;

pub use augmented::{AugmentedState, TimeAugmented};
pub use laplace::{Laplace, LaplaceSolver, LaplaceSpec};
pub use plaplace::{NewtonOptions, PLaplace, PLaplaceSpec};
pub use transport::{TransportBirth, TransportBirthSpec, TransportNorm};

use crate::error::{Error, Result};
use crate::grid::{GridFunction, NormTag};

/// Diagnostics of one resolvent evaluation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SolveStats {
    /// Inner iterations (Newton or CG); 0 for direct solves.
    pub iterations: usize,
    /// Final residual of the inner solve in the sup norm; 0 for direct solves.
    pub residual: f64,
}

/// A quasi m-accretive operator accessed through its resolvent.
///
/// Implementors must make `resolve(λ, ·)` `(1−λα)⁻¹`-Lipschitz in the native
/// norm for every admissible `λ`.
pub trait Resolvent: Send + Sync {
    /// Solves `u + λAu ∋ g`, returning `u` and solver diagnostics.
    fn resolve_traced(&self, lambda: f64, g: &GridFunction) -> Result<(GridFunction, SolveStats)>;

    fn resolve(&self, lambda: f64, g: &GridFunction) -> Result<GridFunction> {
        self.resolve_traced(lambda, g).map(|(u, _)| u)
    }

    /// Quasi-accretivity constant: `A + αI` is m-accretive.
    fn alpha(&self) -> f64 {
        0.0
    }

    /// Largest admissible step; `λα < 1` must hold.
    fn lambda_max(&self) -> f64 {
        let a = self.alpha();
        if a > 0.0 {
            1.0 / a
        } else {
            f64::INFINITY
        }
    }

    fn in_domain(&self, x: &GridFunction) -> bool;

    /// Direct evaluation of `Ax` where it is single-valued and cheap.
    fn apply(&self, _x: &GridFunction) -> Option<GridFunction> {
        None
    }

    /// Norm in which the operator is (quasi) m-accretive.
    fn native_norm(&self) -> NormTag;

    fn name(&self) -> &'static str;
}

pub(crate) fn check_lambda(op: &dyn Resolvent, lambda: f64) -> Result<()> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidSpec(format!("step must be nonnegative, got {lambda}")));
    }
    let max = op.lambda_max();
    if lambda * op.alpha() >= 1.0 || lambda > max {
        return Err(Error::StepTooLarge { lambda, max });
    }
    Ok(())
}

/// `A = 0`; the resolvent is the identity.
#[derive(Debug, Clone, Copy)]
pub struct ZeroOperator {
    pub norm: NormTag,
}

impl Resolvent for ZeroOperator {
    fn resolve_traced(&self, _lambda: f64, g: &GridFunction) -> Result<(GridFunction, SolveStats)> {
        Ok((g.clone(), SolveStats::default()))
    }

    fn in_domain(&self, _x: &GridFunction) -> bool {
        true
    }

    fn apply(&self, x: &GridFunction) -> Option<GridFunction> {
        Some(x.map(|_| 0.0))
    }

    fn native_norm(&self) -> NormTag {
        self.norm
    }

    fn name(&self) -> &'static str {
        "zero"
    }
}

/// `Au = c·u`; `(−c)₊`-accretive in any norm.
#[derive(Debug, Clone, Copy)]
pub struct ScaledIdentity {
    pub rate: f64,
    pub norm: NormTag,
}

impl Resolvent for ScaledIdentity {
    fn resolve_traced(&self, lambda: f64, g: &GridFunction) -> Result<(GridFunction, SolveStats)> {
        check_lambda(self, lambda)?;
        let d = 1.0 + lambda * self.rate;
        Ok((g.scale(1.0 / d), SolveStats::default()))
    }

    fn alpha(&self) -> f64 {
        (-self.rate).max(0.0)
    }

    fn in_domain(&self, _x: &GridFunction) -> bool {
        true
    }

    fn apply(&self, x: &GridFunction) -> Option<GridFunction> {
        Some(x.scale(self.rate))
    }

    fn native_norm(&self) -> NormTag {
        self.norm
    }

    fn name(&self) -> &'static str {
        "scaled-identity"
    }
}

/// The m-accretive shift `B = A + αI` of an α-m-accretive `A`.
///
/// `J^B_λ g = J^A_μ(g / (1+λα))` with `μ = λ / (1+λα)`.
pub struct Shifted<'a> {
    pub inner: &'a dyn Resolvent,
    pub alpha: f64,
}

impl<'a> Shifted<'a> {
    pub fn new(inner: &'a dyn Resolvent) -> Self {
        Shifted {
            inner,
            alpha: inner.alpha(),
        }
    }
}

impl Resolvent for Shifted<'_> {
    fn resolve_traced(&self, lambda: f64, g: &GridFunction) -> Result<(GridFunction, SolveStats)> {
        let d = 1.0 + lambda * self.alpha;
        if d <= 0.0 {
            return Err(Error::StepTooLarge {
                lambda,
                max: if self.alpha < 0.0 {
                    -1.0 / self.alpha
                } else {
                    f64::INFINITY
                },
            });
        }
        self.inner.resolve_traced(lambda / d, &g.scale(1.0 / d))
    }

    fn alpha(&self) -> f64 {
        0.0
    }

    fn in_domain(&self, x: &GridFunction) -> bool {
        self.inner.in_domain(x)
    }

    fn apply(&self, x: &GridFunction) -> Option<GridFunction> {
        let ax = self.inner.apply(x)?;
        ax.axpy(self.alpha, x).ok()
    }

    fn native_norm(&self) -> NormTag {
        self.inner.native_norm()
    }

    fn name(&self) -> &'static str {
        self.inner.name()
    }
}

/// Yosida approximation `A_λ x = (x − J_λ x) / λ`.
pub fn yosida(op: &dyn Resolvent, lambda: f64, x: &GridFunction) -> Result<GridFunction> {
    if lambda <= 0.0 {
        return Err(Error::InvalidSpec(format!(
            "Yosida parameter must be positive, got {lambda}"
        )));
    }
    check_lambda(op, lambda)?;
    let j = op.resolve(lambda, x)?;
    Ok(x.sub(&j)?.scale(1.0 / lambda))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_resolvent_closed_form() {
        let op = ScaledIdentity {
            rate: 1.0,
            norm: NormTag::Sup,
        };
        let u = op.resolve(0.5, &GridFunction::scalar(1.0, NormTag::Sup)).unwrap();
        assert!((u.values()[0] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn yosida_scalar_matches_a_of_resolvent() {
        let op = ScaledIdentity {
            rate: 1.0,
            norm: NormTag::Sup,
        };
        let y = yosida(&op, 0.5, &GridFunction::scalar(1.0, NormTag::Sup)).unwrap();
        assert!((y.values()[0] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn yosida_of_zero_operator_vanishes() {
        let op = ZeroOperator { norm: NormTag::L2 };
        let x = GridFunction::vector(vec![1.0, -2.0], NormTag::L2).unwrap();
        assert_eq!(yosida(&op, 0.3, &x).unwrap().values(), &[0.0, 0.0]);
    }

    #[test]
    fn quasi_accretive_step_limit() {
        let op = ScaledIdentity {
            rate: -2.0,
            norm: NormTag::Sup,
        };
        assert_eq!(op.alpha(), 2.0);
        assert!(matches!(
            op.resolve(0.6, &GridFunction::scalar(1.0, NormTag::Sup)),
            Err(Error::StepTooLarge { .. })
        ));
        assert!(op.resolve(0.4, &GridFunction::scalar(1.0, NormTag::Sup)).is_ok());
    }

    #[test]
    fn shifted_resolvent_equals_original() {
        // B = A + αI with A = -2I, α = 2 is the zero operator.
        let a = ScaledIdentity {
            rate: -2.0,
            norm: NormTag::Sup,
        };
        let b = Shifted::new(&a);
        let g = GridFunction::scalar(3.0, NormTag::Sup);
        assert!((b.resolve(10.0, &g).unwrap().values()[0] - 3.0).abs() < 1e-12);
    }
}
