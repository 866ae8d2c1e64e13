//! Classical and super Hirota derivatives evaluated through jets.
//!
//! The classical operator is expanded by Leibniz:
//! D_x^lx D_y^ly D_t^lt (f.g) = sum over splittings of signed binomial
//! products of partials. Super factors S_x, S_y act on superfield values
//! as supercovariant differences with the Koszul sign.

use crate::error::{Error, Result};
use crate::jet::{cx, Cx, Jet, Var};
use crate::superfield::SuperValue;

#[derive(Clone, Copy, Debug, Default)]
pub struct HirotaOrder {
    pub lx: usize,
    pub ly: usize,
    pub lt: usize,
    pub kx: u8,
    pub ky: u8,
}

impl HirotaOrder {
    pub fn classical(lx: usize, ly: usize, lt: usize) -> Self {
        HirotaOrder { lx, ly, lt, kx: 0, ky: 0 }
    }

    pub fn with_super(mut self, kx: u8, ky: u8) -> Self {
        self.kx = kx;
        self.ky = ky;
        self
    }

    pub fn total(&self) -> usize {
        self.lx + self.ly + self.lt + self.kx as usize + self.ky as usize
    }
}

fn binom(n: usize, k: usize) -> f64 {
    let mut b = 1.0;
    for i in 0..k {
        b = b * (n - i) as f64 / (i + 1) as f64;
    }
    b
}

/// Classical Hirota derivative on a pair of jets at a common point.
pub fn hirota_apply(order: &HirotaOrder, f: &Jet, g: &Jet) -> Result<Cx> {
    if order.kx != 0 || order.ky != 0 {
        return Err(Error::InvariantViolation(
            "hirota_apply takes classical orders only; use super_hirota_apply".into(),
        ));
    }
    let (lx, ly, lt) = (order.lx, order.ly, order.lt);
    let mut acc = Cx::default();
    for i in 0..=lx {
        for j in 0..=ly {
            for m in 0..=lt {
                let sign = if (lx - i + ly - j + lt - m) % 2 == 0 { 1.0 } else { -1.0 };
                let c = binom(lx, i) * binom(ly, j) * binom(lt, m) * sign;
                acc += f.partial(i, j, m)? * g.partial(lx - i, ly - j, lt - m)? * c;
            }
        }
    }
    Ok(acc)
}

/// Super Hirota derivative S_x^kx S_y^ky D_x^lx D_y^ly D_t^lt on a pair of
/// superfield values. Super factors are expanded first (they need the
/// jets), classical factors by the binomial splitting at the end; the two
/// stages act on disjoint slots and commute.
pub fn super_hirota_apply(
    order: &HirotaOrder,
    f: &SuperValue,
    g: &SuperValue,
) -> Result<SuperValue> {
    let gens = f.gens().clone();
    if g.gens() != &gens {
        return Err(Error::GeneratorSetMismatch);
    }
    let mut pairs: Vec<(f64, SuperValue, SuperValue)> = vec![(1.0, f.clone(), g.clone())];
    // rightmost factor first: S_y, then S_x
    for which in [(order.ky, Var::Y), (order.kx, Var::X)] {
        if which.0 == 0 {
            continue;
        }
        let mut next = Vec::with_capacity(pairs.len() * 2);
        for (s, a, b) in pairs {
            let koszul = if a.parity()? == 0 { 1.0 } else { -1.0 };
            next.push((s, a.cov(which.1)?, b.clone()));
            next.push((-s * koszul, a, b.cov(which.1)?));
        }
        pairs = next;
    }
    let (lx, ly, lt) = (order.lx, order.ly, order.lt);
    let mut acc = SuperValue::zero(gens);
    for (s, a, b) in pairs {
        for i in 0..=lx {
            for j in 0..=ly {
                for m in 0..=lt {
                    let sign = if (lx - i + ly - j + lt - m) % 2 == 0 { 1.0 } else { -1.0 };
                    let c = binom(lx, i) * binom(ly, j) * binom(lt, m) * sign * s;
                    let pa = a.partial(i, j, m)?;
                    let pb = b.partial(lx - i, ly - j, lt - m)?;
                    acc = acc.add(&pa.mul(&pb)?.scale(cx(c, 0.0)))?;
                }
            }
        }
    }
    Ok(acc)
}
