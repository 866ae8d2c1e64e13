//! Registered library of the arbitrary functions q(y) and m(y).
//!
//! The governing equations leave both free; a closed registry keeps CLI
//! descriptors serializable while still providing analytic jets.

use crate::jet::{cx, Jet, JetOrder, Var};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "name", rename_all = "snake_case")]
#[derive(Default)]
pub enum NamedFn {
    #[default]
    Zero,
    Identity,
    Poly { coeffs: Vec<f64> },
    Sin { a: f64 },
    Exp { a: f64 },
}

impl NamedFn {
    pub fn zero() -> Self {
        NamedFn::Zero
    }

    pub fn identity() -> Self {
        NamedFn::Identity
    }

    /// Applies the function through a jet argument.
    pub fn apply(&self, y: &Jet) -> Jet {
        match self {
            NamedFn::Zero => Jet::zero(y.order()),
            NamedFn::Identity => y.clone(),
            NamedFn::Poly { coeffs } => {
                let mut acc = Jet::zero(y.order());
                for c in coeffs.iter().rev() {
                    acc = acc.mul(y).add(&Jet::constant_re(*c, y.order()));
                }
                acc
            }
            NamedFn::Sin { a } => y.scale(cx(*a, 0.0)).sin(),
            NamedFn::Exp { a } => y.scale(cx(*a, 0.0)).exp(),
        }
    }

    pub fn eval(&self, y: f64) -> f64 {
        self.apply(&Jet::constant_re(y, JetOrder::SCALAR)).value().re
    }

    /// First derivative at a real point.
    pub fn deriv(&self, y: f64) -> f64 {
        let yj = Jet::var_re(Var::Y, y, JetOrder::new(0, 1, 0));
        self.apply(&yj).partial(0, 1, 0).unwrap().re
    }
}
