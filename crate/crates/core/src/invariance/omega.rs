use std::fmt;

use crate::error::{Error, Result};
use crate::expr::{Env, Expr, Var};

#[derive(Debug, Clone, PartialEq)]
pub enum OmegaForm {
    /// `C·x`. A negative `C` is allowed as a bound but is not a uniqueness function.
    Linear(f64),
    /// `c·x^a` with `a ≥ 1`.
    Power { c: f64, a: f64 },
    /// `x·ln(1 + x)`.
    XLog,
    /// Expression in the variable `x`.
    Custom(Expr),
}

/// Comparison function `ω` on `[0, ∞)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaFunction {
    form: OmegaForm,
    monotone: bool,
}

impl OmegaFunction {
    pub fn linear(c: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "linear omega needs a finite constant, got {c}"
            )));
        }
        Ok(OmegaFunction {
            form: OmegaForm::Linear(c),
            monotone: c >= 0.0,
        })
    }

    pub fn power(c: f64, a: f64) -> Result<Self> {
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::InvalidSpec(format!("power omega needs c >= 0, got {c}")));
        }
        if !(a.is_finite() && a >= 1.0) {
            return Err(Error::InvalidSpec(format!("power omega needs exponent >= 1, got {a}")));
        }
        Ok(OmegaFunction {
            form: OmegaForm::Power { c, a },
            monotone: true,
        })
    }

    pub fn xlog() -> Self {
        OmegaFunction {
            form: OmegaForm::XLog,
            monotone: true,
        }
    }

    /// Custom `ω(x)`; must vanish at 0. Monotonicity is sampled on `[0, 1]`.
    pub fn custom(expr: Expr) -> Result<Self> {
        if let Some(v) = expr.variables().into_iter().find(|v| *v != Var::X) {
            return Err(Error::InvalidSpec(format!(
                "omega may only depend on x, found {}",
                v.name()
            )));
        }
        let at = |x: f64| expr.eval(&Env { x, ..Env::default() });
        let zero = at(0.0)?;
        if zero != 0.0 {
            return Err(Error::InvalidSpec(format!("omega(0) must be 0, got {zero}")));
        }
        let mut monotone = true;
        let mut prev = zero;
        for k in 1..=100 {
            let v = at(k as f64 / 100.0)?;
            if v < prev {
                monotone = false;
            }
            prev = v;
        }
        Ok(OmegaFunction {
            form: OmegaForm::Custom(expr),
            monotone,
        })
    }

    pub fn form(&self) -> &OmegaForm {
        &self.form
    }

    pub fn is_monotone(&self) -> bool {
        self.monotone
    }

    /// Whether `ω` is a candidate uniqueness function (nonnegative and nondecreasing).
    pub fn is_uniqueness_candidate(&self) -> bool {
        match self.form {
            OmegaForm::Linear(c) => c >= 0.0,
            _ => self.monotone,
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        Ok(match &self.form {
            OmegaForm::Linear(c) => c * x,
            OmegaForm::Power { c, a } => c * x.max(0.0).powf(*a),
            OmegaForm::XLog => x * x.ln_1p(),
            OmegaForm::Custom(e) => e.eval(&Env { x, ..Env::default() })?,
        })
    }

    /// `eval`, with evaluation errors mapped to NaN.
    pub fn value(&self, x: f64) -> f64 {
        self.eval(x).unwrap_or(f64::NAN)
    }
}

impl fmt::Display for OmegaFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.form {
            OmegaForm::Linear(c) => write!(f, "{c}*x"),
            OmegaForm::Power { c, a } => write!(f, "{c}*x^{a}"),
            OmegaForm::XLog => f.write_str("x*ln(1+x)"),
            OmegaForm::Custom(e) => write!(f, "{e}"),
        }
    }
}
