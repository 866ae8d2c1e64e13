//! Truncated multivariate Taylor jets in the base variables (x, y, t).
//!
//! A jet stores the scaled mixed partials `∂_x^i ∂_y^j ∂_t^k f / (i! j! k!)`
//! of a function at a point, densely indexed up to a fixed order per
//! variable. Arithmetic is truncation-closed, so composite expressions
//! carry exact derivatives of the represented function.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Denominator magnitudes below this signal proximity to a singularity.
pub const DIV_FLOOR: f64 = 1e-12;

pub type Cx = Complex64;

pub fn cx(re: f64, im: f64) -> Cx {
    Complex64::new(re, im)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct JetOrder {
    pub ox: usize,
    pub oy: usize,
    pub ot: usize,
}

impl JetOrder {
    /// One allocation size fits every residual in this crate: BLMP needs
    /// (3,1,1) and the KdV-form checks need four z-derivatives.
    pub const DEFAULT: JetOrder = JetOrder { ox: 4, oy: 2, ot: 2 };

    pub const SCALAR: JetOrder = JetOrder { ox: 0, oy: 0, ot: 0 };

    pub fn new(ox: usize, oy: usize, ot: usize) -> Self {
        JetOrder { ox, oy, ot }
    }

    /// Number of stored coefficients; always at least one.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        (self.ox + 1) * (self.oy + 1) * (self.ot + 1)
    }

    pub fn min(&self, other: &JetOrder) -> JetOrder {
        JetOrder {
            ox: self.ox.min(other.ox),
            oy: self.oy.min(other.oy),
            ot: self.ot.min(other.ot),
        }
    }

    /// Maximum total degree representable; bounds the nilpotency index of
    /// a jet with zero constant term.
    pub fn total(&self) -> usize {
        self.ox + self.oy + self.ot
    }
}

#[derive(Clone, Copy, Debug)]
pub enum Var {
    X,
    Y,
    T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    order: JetOrder,
    c: Vec<Cx>,
}

impl Jet {
    pub fn order(&self) -> JetOrder {
        self.order
    }

    fn idx(order: &JetOrder, i: usize, j: usize, k: usize) -> usize {
        (i * (order.oy + 1) + j) * (order.ot + 1) + k
    }

    pub fn zero(order: JetOrder) -> Jet {
        Jet {
            order,
            c: vec![Cx::default(); order.len()],
        }
    }

    pub fn constant(value: Cx, order: JetOrder) -> Jet {
        let mut j = Jet::zero(order);
        j.c[0] = value;
        j
    }

    pub fn constant_re(value: f64, order: JetOrder) -> Jet {
        Jet::constant(cx(value, 0.0), order)
    }

    /// Jet of a coordinate function: constant term plus a unit first-order
    /// coefficient in the chosen variable.
    pub fn var(which: Var, value: Cx, order: JetOrder) -> Jet {
        let mut j = Jet::constant(value, order);
        let (i, jy, k) = match which {
            Var::X => (1, 0, 0),
            Var::Y => (0, 1, 0),
            Var::T => (0, 0, 1),
        };
        if i <= order.ox && jy <= order.oy && k <= order.ot {
            j.c[Self::idx(&order, i, jy, k)] = cx(1.0, 0.0);
        }
        j
    }

    pub fn var_re(which: Var, value: f64, order: JetOrder) -> Jet {
        Jet::var(which, cx(value, 0.0), order)
    }

    pub fn coeff(&self, i: usize, j: usize, k: usize) -> Cx {
        if i > self.order.ox || j > self.order.oy || k > self.order.ot {
            Cx::default()
        } else {
            self.c[Self::idx(&self.order, i, j, k)]
        }
    }

    pub fn coeff_mut(&mut self, i: usize, j: usize, k: usize) -> &mut Cx {
        let o = self.order;
        &mut self.c[Self::idx(&o, i, j, k)]
    }

    pub fn value(&self) -> Cx {
        self.c[0]
    }

    /// `∂_x^i ∂_y^j ∂_t^k` of the represented function at the point.
    pub fn partial(&self, i: usize, j: usize, k: usize) -> Result<Cx> {
        if i > self.order.ox || j > self.order.oy || k > self.order.ot {
            return Err(Error::OrderExceeded(
                i,
                j,
                k,
                self.order.ox,
                self.order.oy,
                self.order.ot,
            ));
        }
        Ok(self.c[Self::idx(&self.order, i, j, k)] * factorial(i) * factorial(j) * factorial(k))
    }

    pub fn truncate(&self, order: JetOrder) -> Jet {
        let order = order.min(&self.order);
        let mut out = Jet::zero(order);
        for i in 0..=order.ox {
            for j in 0..=order.oy {
                for k in 0..=order.ot {
                    out.c[Self::idx(&order, i, j, k)] = self.coeff(i, j, k);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Jet) -> Jet {
        let order = self.order.min(&other.order);
        let mut out = Jet::zero(order);
        for i in 0..=order.ox {
            for j in 0..=order.oy {
                for k in 0..=order.ot {
                    out.c[Self::idx(&order, i, j, k)] = self.coeff(i, j, k) + other.coeff(i, j, k);
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &Jet) -> Jet {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Jet {
        self.scale(cx(-1.0, 0.0))
    }

    pub fn scale(&self, s: Cx) -> Jet {
        let mut out = self.clone();
        for c in &mut out.c {
            *c *= s;
        }
        out
    }

    /// Cauchy product truncated to the componentwise minimum order.
    pub fn mul(&self, other: &Jet) -> Jet {
        let order = self.order.min(&other.order);
        let mut out = Jet::zero(order);
        for i1 in 0..=order.ox {
            for j1 in 0..=order.oy {
                for k1 in 0..=order.ot {
                    let a = self.coeff(i1, j1, k1);
                    if a == Cx::default() {
                        continue;
                    }
                    for i2 in 0..=(order.ox - i1) {
                        for j2 in 0..=(order.oy - j1) {
                            for k2 in 0..=(order.ot - k1) {
                                let b = other.coeff(i2, j2, k2);
                                if b == Cx::default() {
                                    continue;
                                }
                                out.c[Self::idx(&order, i1 + i2, j1 + j2, k1 + k2)] += a * b;
                            }
                        }
                    }
                }
            }
        }
        out
    }

    pub fn div(&self, other: &Jet) -> Result<Jet> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn recip(&self) -> Result<Jet> {
        let a0 = self.value();
        if a0.norm() <= DIV_FLOOR {
            return Err(Error::DivisionNearSingularity(a0.norm()));
        }
        // c_{n+1} = c_n (r - n) / ((n + 1) a0) with r = -1
        let d = self.order.total();
        let mut coeffs = Vec::with_capacity(d + 1);
        let mut c = a0.inv();
        coeffs.push(c);
        for n in 0..d {
            c = c * cx(-1.0 - n as f64, 0.0) / (cx(n as f64 + 1.0, 0.0) * a0);
            coeffs.push(c);
        }
        Ok(self.compose(&coeffs))
    }

    /// Composes the univariate series `sum c_n (a - a0)^n` through this jet.
    /// `coeffs[n]` must be `f^{(n)}(a0)/n!` for the function being applied.
    pub fn compose(&self, coeffs: &[Cx]) -> Jet {
        let mut tilde = self.clone();
        tilde.c[0] = Cx::default();
        let mut out = Jet::constant(*coeffs.last().unwrap(), self.order);
        for n in (0..coeffs.len() - 1).rev() {
            out = out.mul(&tilde);
            out.c[0] += coeffs[n];
        }
        out
    }

    fn univariate_len(&self) -> usize {
        self.order.total() + 1
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        let mut coeffs = vec![Cx::default(); self.univariate_len()];
        let mut f = cx(1.0, 0.0);
        for (n, c) in coeffs.iter_mut().enumerate() {
            if n > 0 {
                f /= n as f64;
            }
            *c = e * f;
        }
        self.compose(&coeffs)
    }

    fn branch_check(&self, what: &'static str) -> Result<Cx> {
        let a0 = self.value();
        if a0.norm() <= DIV_FLOOR {
            return Err(Error::DivisionNearSingularity(a0.norm()));
        }
        // Principal branch; the cut is the closed negative real axis.
        if a0.im == 0.0 && a0.re < 0.0 {
            return Err(Error::BranchCutViolation(a0, what));
        }
        Ok(a0)
    }

    pub fn ln(&self) -> Result<Jet> {
        let a0 = self.branch_check("log")?;
        let mut coeffs = vec![Cx::default(); self.univariate_len()];
        coeffs[0] = a0.ln();
        let mut p = cx(1.0, 0.0);
        for (n, c) in coeffs.iter_mut().enumerate().skip(1) {
            p /= a0;
            let sign = if n % 2 == 0 { -1.0 } else { 1.0 };
            *c = p * sign / n as f64;
        }
        Ok(self.compose(&coeffs))
    }

    pub fn sqrt(&self) -> Result<Jet> {
        self.branch_check("sqrt")?;
        self.powf(0.5)
    }

    /// Principal-branch power with real exponent.
    pub fn powf(&self, r: f64) -> Result<Jet> {
        let a0 = if r.fract() == 0.0 && r < 0.0 {
            let a0 = self.value();
            if a0.norm() <= DIV_FLOOR {
                return Err(Error::DivisionNearSingularity(a0.norm()));
            }
            a0
        } else if r.fract() == 0.0 {
            self.value()
        } else {
            self.branch_check("pow")?
        };
        let d = self.order.total();
        let mut coeffs = Vec::with_capacity(d + 1);
        if a0.norm() <= DIV_FLOOR {
            // non-negative integer power of a nilpotent-plus-zero jet
            let mut out = Jet::constant(cx(1.0, 0.0), self.order);
            for _ in 0..(r as usize) {
                out = out.mul(self);
            }
            return Ok(out);
        }
        let mut c = a0.powf(r);
        coeffs.push(c);
        for n in 0..d {
            c = c * cx(r - n as f64, 0.0) / (cx(n as f64 + 1.0, 0.0) * a0);
            coeffs.push(c);
        }
        Ok(self.compose(&coeffs))
    }

    pub fn sin(&self) -> Jet {
        let (s, c0) = (self.value().sin(), self.value().cos());
        self.compose(&cycle_coeffs(self.univariate_len(), [s, c0, -s, -c0]))
    }

    pub fn cos(&self) -> Jet {
        let (s, c0) = (self.value().sin(), self.value().cos());
        self.compose(&cycle_coeffs(self.univariate_len(), [c0, -s, -c0, s]))
    }

    pub fn sinh(&self) -> Jet {
        let (s, c0) = (self.value().sinh(), self.value().cosh());
        self.compose(&cycle_coeffs(self.univariate_len(), [s, c0, s, c0]))
    }

    pub fn cosh(&self) -> Jet {
        let (s, c0) = (self.value().sinh(), self.value().cosh());
        self.compose(&cycle_coeffs(self.univariate_len(), [c0, s, c0, s]))
    }

    /// Univariate coefficients from the Riccati recurrence T' = 1 - T^2.
    fn riccati(&self, t0: Cx) -> Jet {
        let d = self.univariate_len();
        let mut t = Vec::with_capacity(d);
        t.push(t0);
        for n in 0..d - 1 {
            let mut conv = Cx::default();
            for k in 0..=n {
                conv += t[k] * t[n - k];
            }
            let delta = if n == 0 { cx(1.0, 0.0) } else { Cx::default() };
            t.push((delta - conv) / (n as f64 + 1.0));
        }
        self.compose(&t)
    }

    pub fn tanh(&self) -> Result<Jet> {
        let ch = self.value().cosh();
        if ch.norm() <= DIV_FLOOR {
            return Err(Error::DivisionNearSingularity(ch.norm()));
        }
        Ok(self.riccati(self.value().tanh()))
    }

    pub fn coth(&self) -> Result<Jet> {
        let sh = self.value().sinh();
        if sh.norm() <= DIV_FLOOR {
            return Err(Error::DivisionNearSingularity(sh.norm()));
        }
        Ok(self.riccati(self.value().cosh() / sh))
    }

    pub fn tan(&self) -> Result<Jet> {
        // tan = sin/cos through the ring; keeps the error path uniform.
        self.sin().div(&self.cos())
    }

    /// Derivative in one base variable; the result has one order less in
    /// that variable.
    pub fn deriv(&self, which: Var) -> Result<Jet> {
        let o = self.order;
        let new_order = match which {
            Var::X if o.ox == 0 => return Err(Error::OrderExceeded(1, 0, 0, 0, o.oy, o.ot)),
            Var::Y if o.oy == 0 => return Err(Error::OrderExceeded(0, 1, 0, o.ox, 0, o.ot)),
            Var::T if o.ot == 0 => return Err(Error::OrderExceeded(0, 0, 1, o.ox, o.oy, 0)),
            Var::X => JetOrder::new(o.ox - 1, o.oy, o.ot),
            Var::Y => JetOrder::new(o.ox, o.oy - 1, o.ot),
            Var::T => JetOrder::new(o.ox, o.oy, o.ot - 1),
        };
        let mut out = Jet::zero(new_order);
        for i in 0..=new_order.ox {
            for j in 0..=new_order.oy {
                for k in 0..=new_order.ot {
                    let (si, sj, sk, f) = match which {
                        Var::X => (i + 1, j, k, (i + 1) as f64),
                        Var::Y => (i, j + 1, k, (j + 1) as f64),
                        Var::T => (i, j, k + 1, (k + 1) as f64),
                    };
                    out.c[Self::idx(&new_order, i, j, k)] = self.coeff(si, sj, sk) * f;
                }
            }
        }
        Ok(out)
    }

    pub fn max_coeff_norm(&self) -> f64 {
        self.c.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|c| *c == Cx::default())
    }
}

fn cycle_coeffs(len: usize, cycle: [Cx; 4]) -> Vec<Cx> {
    let mut coeffs = Vec::with_capacity(len);
    let mut f = 1.0;
    for n in 0..len {
        if n > 0 {
            f /= n as f64;
        }
        coeffs.push(cycle[n % 4] * f);
    }
    coeffs
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}
