//! Superfield values and fields: pairs (theta0, theta1) representing
//! `F = theta0 + theta * theta1`, with the expansion variable theta kept
//! out of the Grassmann coefficients. A fermionic superfield carries
//! `Phi = xi + theta u` with odd xi and even u.

use crate::error::{Error, Result};
use crate::grassmann::{GeneratorSet, GrassmannElement};
use crate::jet::{cx, Cx, Jet, JetOrder, Var};
use std::sync::Arc;

pub type Point = [f64; 3];

#[derive(Clone, Debug)]
pub struct SuperValue {
    pub theta0: GrassmannElement,
    pub theta1: GrassmannElement,
}

impl SuperValue {
    pub fn new(theta0: GrassmannElement, theta1: GrassmannElement) -> Result<Self> {
        if theta0.gens() != theta1.gens() {
            return Err(Error::GeneratorSetMismatch);
        }
        Ok(SuperValue { theta0, theta1 })
    }

    pub fn zero(gens: Arc<GeneratorSet>) -> Self {
        SuperValue {
            theta0: GrassmannElement::zero(gens.clone()),
            theta1: GrassmannElement::zero(gens),
        }
    }

    /// Embeds a classical (even, Grassmann-free) jet as `f + theta * 0`.
    pub fn classical(gens: Arc<GeneratorSet>, f: Jet) -> Self {
        SuperValue {
            theta0: GrassmannElement::scalar(gens.clone(), f),
            theta1: GrassmannElement::zero(gens),
        }
    }

    pub fn gens(&self) -> &Arc<GeneratorSet> {
        self.theta0.gens()
    }

    /// Overall parity of the superfield value (theta counts as odd).
    /// The zero value reports even.
    pub fn parity(&self) -> Result<u8> {
        if !self.theta0.is_zero() {
            let p0 = self.theta0.parity()?;
            if !self.theta1.is_zero() && self.theta1.parity()? != (p0 + 1) % 2 {
                return Err(Error::ParityUndefined);
            }
            Ok(p0)
        } else if !self.theta1.is_zero() {
            Ok((self.theta1.parity()? + 1) % 2)
        } else {
            Ok(0)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(SuperValue {
            theta0: self.theta0.add(&other.theta0)?,
            theta1: self.theta1.add(&other.theta1)?,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(cx(-1.0, 0.0))
    }

    pub fn scale(&self, s: Cx) -> Self {
        SuperValue {
            theta0: self.theta0.scale(s),
            theta1: self.theta1.scale(s),
        }
    }

    pub fn scale_jet(&self, s: &Jet) -> Self {
        SuperValue {
            theta0: self.theta0.scale_jet(s),
            theta1: self.theta1.scale_jet(s),
        }
    }

    /// Graded product: (A + th B)(C + th D) = AC + th(BC + (-1)^p(A) AD).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let sign = if self.theta0.parity()? == 0 { 1.0 } else { -1.0 };
        let ac = self.theta0.mul(&other.theta0)?;
        let bc = self.theta1.mul(&other.theta0)?;
        let ad = self.theta0.mul(&other.theta1)?.scale(cx(sign, 0.0));
        Ok(SuperValue {
            theta0: ac,
            theta1: bc.add(&ad)?,
        })
    }

    /// Left multiplication by a homogeneous Grassmann constant:
    /// c(A + th B) = cA + th (-1)^p(c) cB.
    pub fn leftmul(&self, c: &GrassmannElement) -> Result<Self> {
        let sign = if c.parity()? == 0 { 1.0 } else { -1.0 };
        Ok(SuperValue {
            theta0: c.mul(&self.theta0)?,
            theta1: c.mul(&self.theta1)?.scale(cx(sign, 0.0)),
        })
    }

    /// Supercovariant derivative: D_x(A + th B) = B + th A_x, and the
    /// analogue in y; iterating gives D^2 = d/dx (resp. d/dy).
    pub fn cov(&self, which: Var) -> Result<Self> {
        match which {
            Var::X | Var::Y => Ok(SuperValue {
                theta0: self.theta1.clone(),
                theta1: self.theta0.deriv(which)?,
            }),
            Var::T => Err(Error::InvariantViolation(
                "no supercovariant derivative in t".into(),
            )),
        }
    }

    pub fn deriv(&self, which: Var) -> Result<Self> {
        Ok(SuperValue {
            theta0: self.theta0.deriv(which)?,
            theta1: self.theta1.deriv(which)?,
        })
    }

    pub fn partial(&self, i: usize, j: usize, k: usize) -> Result<Self> {
        Ok(SuperValue {
            theta0: self.theta0.partial(i, j, k)?,
            theta1: self.theta1.partial(i, j, k)?,
        })
    }

    pub fn max_norm(&self) -> f64 {
        self.theta0.max_norm().max(self.theta1.max_norm())
    }

    pub fn max_value_norm(&self) -> f64 {
        self.theta0.max_value_norm().max(self.theta1.max_value_norm())
    }

    pub fn is_zero(&self) -> bool {
        self.theta0.is_zero() && self.theta1.is_zero()
    }
}

type FieldClosure = dyn Fn(Point, JetOrder) -> Result<SuperValue> + Send + Sync;

/// A superfield as a function of the base point, evaluated to jets of a
/// requested order.
#[derive(Clone)]
pub struct Superfield {
    gens: Arc<GeneratorSet>,
    f: Arc<FieldClosure>,
}

impl Superfield {
    pub fn new(
        gens: Arc<GeneratorSet>,
        f: impl Fn(Point, JetOrder) -> Result<SuperValue> + Send + Sync + 'static,
    ) -> Self {
        Superfield { gens, f: Arc::new(f) }
    }

    /// Lifts a classical field u(x,y,t) to the even part of a fermionic
    /// superfield with zero odd part: Phi = 0 + theta u.
    pub fn from_classical_even(
        gens: Arc<GeneratorSet>,
        u: impl Fn(Point, JetOrder) -> Result<Jet> + Send + Sync + 'static,
    ) -> Self {
        let g2 = gens.clone();
        Superfield::new(gens, move |p, ord| {
            let jet = u(p, ord)?;
            Ok(SuperValue {
                theta0: GrassmannElement::zero(g2.clone()),
                theta1: GrassmannElement::scalar(g2.clone(), jet),
            })
        })
    }

    /// A classical tau embedded as a bosonic superfield: f + theta * 0.
    pub fn from_classical_body(
        gens: Arc<GeneratorSet>,
        f: impl Fn(Point, JetOrder) -> Result<Jet> + Send + Sync + 'static,
    ) -> Self {
        let g2 = gens.clone();
        Superfield::new(gens, move |p, ord| Ok(SuperValue::classical(g2.clone(), f(p, ord)?)))
    }

    pub fn constant_one(gens: Arc<GeneratorSet>) -> Self {
        let g2 = gens.clone();
        Superfield::new(gens, move |_, ord| {
            Ok(SuperValue::classical(
                g2.clone(),
                Jet::constant(cx(1.0, 0.0), ord),
            ))
        })
    }

    pub fn gens(&self) -> &Arc<GeneratorSet> {
        &self.gens
    }

    pub fn eval(&self, p: Point, order: JetOrder) -> Result<SuperValue> {
        (self.f)(p, order)
    }
}
