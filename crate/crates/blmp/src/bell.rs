//! Super Bell polynomials, super binary Bell polynomials and
//! P-polynomials over graded derivative symbols, with exact integer
//! coefficients and a graded evaluation into the Grassmann algebra.
//!
//! Generation builds `e^{-A} D_x^{kx} D_y^{ky} dx^{lx} dy^{ly} dt^{lt} e^A`
//! by structural induction: one derivation applied at a time to a
//! normal-form polynomial.

use crate::error::{Error, Result};
use crate::grassmann::GrassmannElement;
use crate::jet::cx;
use std::collections::BTreeMap;
use std::fmt;

pub const ORDER_CAP: usize = 6;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Host {
    A,
    V,
    W,
}

/// A derivative of the superfield host: classical orders (sx, sy, st) and
/// supercovariant orders nx, ny in {0,1}, for the canonical operator word
/// `D_x^{nx} D_y^{ny} dx^{sx} dy^{sy} dt^{st}`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct DerivSymbol {
    pub host: Host,
    pub sx: u8,
    pub sy: u8,
    pub st: u8,
    pub nx: u8,
    pub ny: u8,
}

impl DerivSymbol {
    pub fn new(host: Host, sx: u8, sy: u8, st: u8, nx: u8, ny: u8) -> Self {
        DerivSymbol { host, sx, sy, st, nx, ny }
    }

    pub fn a(sx: u8, sy: u8, st: u8, nx: u8, ny: u8) -> Self {
        Self::new(Host::A, sx, sy, st, nx, ny)
    }

    /// Grassmann parity; the host superfield is bosonic, so only the
    /// supercovariant derivatives flip it.
    pub fn parity(&self) -> u8 {
        (self.nx + self.ny) % 2
    }

    pub fn is_odd(&self) -> bool {
        self.parity() == 1
    }

    /// Parity of the total derivative count; drives the binary v/w split.
    pub fn weight_odd(&self) -> bool {
        (self.sx + self.sy + self.st + self.nx + self.ny) % 2 == 1
    }

    fn with_host(mut self, host: Host) -> Self {
        self.host = host;
        self
    }
}

impl fmt::Display for DerivSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let host = match self.host {
            Host::A => "A",
            Host::V => "v",
            Host::W => "w",
        };
        let mut base = String::from(host);
        if self.sx + self.sy + self.st > 0 {
            base.push('_');
            for _ in 0..self.sx {
                base.push('x');
            }
            for _ in 0..self.sy {
                base.push('y');
            }
            for _ in 0..self.st {
                base.push('t');
            }
        }
        match (self.nx, self.ny) {
            (0, 0) => write!(f, "{base}"),
            (1, 0) => write!(f, "Dx({base})"),
            (0, 1) => write!(f, "Dy({base})"),
            _ => write!(f, "DxDy({base})"),
        }
    }
}

type Term = Vec<DerivSymbol>;

/// Canonical sorted form of a product of symbols. Returns the sign from
/// interleave-sorting the odd symbols, or None when a repeated odd symbol
/// kills the term.
fn canonicalize(mut syms: Term) -> Option<(Term, i64)> {
    let odds: Vec<DerivSymbol> = syms.iter().copied().filter(DerivSymbol::is_odd).collect();
    let mut inversions = 0usize;
    for i in 0..odds.len() {
        for j in i + 1..odds.len() {
            if odds[i] == odds[j] {
                return None;
            }
            if odds[i] > odds[j] {
                inversions += 1;
            }
        }
    }
    syms.sort();
    let sign = if inversions.is_multiple_of(2) { 1 } else { -1 };
    Some((syms, sign))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BellPolynomial {
    terms: BTreeMap<Term, i64>,
}

impl BellPolynomial {
    pub fn zero() -> Self {
        BellPolynomial { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        let mut p = Self::zero();
        p.terms.insert(vec![], 1);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, syms: Term, coeff: i64) {
        if coeff == 0 {
            return;
        }
        if let Some((canon, sign)) = canonicalize(syms) {
            let c = self.terms.entry(canon.clone()).or_insert(0);
            *c += coeff * sign;
            if *c == 0 {
                self.terms.remove(&canon);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Term, i64)> {
        self.terms.iter().map(|(t, c)| (t, *c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, term: &[DerivSymbol]) -> i64 {
        canonicalize(term.to_vec())
            .map(|(t, s)| self.terms.get(&t).copied().unwrap_or(0) * s)
            .unwrap_or(0)
    }

}

#[derive(Clone, Copy, Debug)]
enum Derivation {
    Px,
    Py,
    Pt,
    Dx,
    Dy,
}

impl Derivation {
    fn is_odd(&self) -> bool {
        matches!(self, Derivation::Dx | Derivation::Dy)
    }

    /// The symbol contributed by d(e^A) / e^A.
    fn prefactor(&self) -> DerivSymbol {
        match self {
            Derivation::Px => DerivSymbol::a(1, 0, 0, 0, 0),
            Derivation::Py => DerivSymbol::a(0, 1, 0, 0, 0),
            Derivation::Pt => DerivSymbol::a(0, 0, 1, 0, 0),
            Derivation::Dx => DerivSymbol::a(0, 0, 0, 1, 0),
            Derivation::Dy => DerivSymbol::a(0, 0, 0, 0, 1),
        }
    }
}

/// Applies a derivation to a single symbol, normalizing the operator word
/// back to `D_x^{nx} D_y^{ny} d^s` via D^2 = d and the anticommutator
/// D_x D_y + D_y D_x = dx + dy.
fn symbol_deriv(d: Derivation, s: DerivSymbol) -> Vec<(i64, DerivSymbol)> {
    let mut out = vec![];
    match d {
        Derivation::Px => out.push((1, DerivSymbol { sx: s.sx + 1, ..s })),
        Derivation::Py => out.push((1, DerivSymbol { sy: s.sy + 1, ..s })),
        Derivation::Pt => out.push((1, DerivSymbol { st: s.st + 1, ..s })),
        Derivation::Dx => {
            if s.nx == 0 {
                out.push((1, DerivSymbol { nx: 1, ..s }));
            } else {
                out.push((1, DerivSymbol { sx: s.sx + 1, nx: 0, ..s }));
            }
        }
        Derivation::Dy => {
            if s.nx == 0 {
                if s.ny == 0 {
                    out.push((1, DerivSymbol { ny: 1, ..s }));
                } else {
                    out.push((1, DerivSymbol { sy: s.sy + 1, ny: 0, ..s }));
                }
            } else if s.ny == 0 {
                // D_y D_x W = (dx + dy) W - D_x D_y W
                out.push((1, DerivSymbol { sx: s.sx + 1, nx: 0, ..s }));
                out.push((1, DerivSymbol { sy: s.sy + 1, nx: 0, ..s }));
                out.push((-1, DerivSymbol { nx: 1, ny: 1, ..s }));
            } else {
                // D_y D_x D_y W = (dx + dy) D_y W - D_x dy W
                out.push((1, DerivSymbol { sx: s.sx + 1, nx: 0, ny: 1, ..s }));
                out.push((1, DerivSymbol { sy: s.sy + 1, nx: 0, ny: 1, ..s }));
                out.push((-1, DerivSymbol { sy: s.sy + 1, nx: 1, ny: 0, ..s }));
            }
        }
    }
    out
}

/// One derivation applied to the normal form of `e^{-A} Op e^A`:
/// `P' = (dA) P + d(P)` with the graded Leibniz rule inside terms.
fn apply_derivation(d: Derivation, p: &BellPolynomial) -> BellPolynomial {
    let mut out = BellPolynomial::zero();
    let pre = d.prefactor();
    for (term, coeff) in p.terms() {
        // prefactor term, multiplied on the left
        let mut with_pre = Vec::with_capacity(term.len() + 1);
        with_pre.push(pre);
        with_pre.extend_from_slice(term);
        out.add_term(with_pre, coeff);
        // graded Leibniz across the term
        let mut prefix_parity = 0u8;
        for (i, s) in term.iter().enumerate() {
            let sign = if d.is_odd() && prefix_parity == 1 { -1 } else { 1 };
            for (c, ds) in symbol_deriv(d, *s) {
                let mut new_term = term.clone();
                new_term[i] = ds;
                out.add_term(new_term, coeff * c * sign);
            }
            prefix_parity = (prefix_parity + s.parity()) % 2;
        }
    }
    out
}

/// The super Bell polynomial Y_{(lx x, ly y, lt t),(kx,ky)}(A).
pub fn bell_generate(lx: usize, ly: usize, lt: usize, kx: u8, ky: u8) -> Result<BellPolynomial> {
    let total = lx + ly + lt + kx as usize + ky as usize;
    if total > ORDER_CAP {
        return Err(Error::OrderCapExceeded(total, ORDER_CAP));
    }
    let mut p = BellPolynomial::one();
    for _ in 0..lt {
        p = apply_derivation(Derivation::Pt, &p);
    }
    for _ in 0..ly {
        p = apply_derivation(Derivation::Py, &p);
    }
    for _ in 0..lx {
        p = apply_derivation(Derivation::Px, &p);
    }
    for _ in 0..ky {
        p = apply_derivation(Derivation::Dy, &p);
    }
    for _ in 0..kx {
        p = apply_derivation(Derivation::Dx, &p);
    }
    Ok(p)
}

/// Binary substitution: every A-hosted symbol re-hosted to v when its
/// parity is odd and to w when even.
pub fn bell_binary(p: &BellPolynomial) -> BellPolynomial {
    let mut out = BellPolynomial::zero();
    for (term, coeff) in p.terms() {
        let new_term: Term = term
            .iter()
            .map(|s| {
                if s.host != Host::A {
                    *s
                } else if s.weight_odd() {
                    s.with_host(Host::V)
                } else {
                    s.with_host(Host::W)
                }
            })
            .collect();
        out.add_term(new_term, coeff);
    }
    out
}

/// The P-polynomial: binary polynomial at v = 0 (every term containing a
/// v-hosted symbol drops). Identically zero when the total order is odd.
pub fn bell_p_polynomial(lx: usize, ly: usize, lt: usize, kx: u8, ky: u8) -> Result<BellPolynomial> {
    let b = bell_binary(&bell_generate(lx, ly, lt, kx, ky)?);
    let mut out = BellPolynomial::zero();
    for (term, coeff) in b.terms() {
        if term.iter().all(|s| s.host != Host::V) {
            out.add_term(term.clone(), coeff);
        }
    }
    Ok(out)
}

/// Signed graded evaluation of a polynomial against a symbol table.
pub fn bell_evaluate(
    p: &BellPolynomial,
    table: &BTreeMap<DerivSymbol, GrassmannElement>,
) -> Result<GrassmannElement> {
    let gens = table
        .values()
        .next()
        .map(|e| e.gens().clone())
        .ok_or_else(|| Error::MissingSymbol("empty table".into()))?;
    let mut acc = GrassmannElement::zero(gens.clone());
    for (term, coeff) in p.terms() {
        let mut prod = GrassmannElement::scalar_c(gens.clone(), cx(1.0, 0.0));
        for s in term {
            let v = table
                .get(s)
                .ok_or_else(|| Error::MissingSymbol(s.to_string()))?;
            if !v.is_zero() && v.parity()? != s.parity() {
                return Err(Error::ParityMismatch(format!(
                    "symbol {s} expects parity {}",
                    s.parity()
                )));
            }
            prod = prod.mul(v)?;
        }
        acc = acc.add(&prod.scale(cx(coeff as f64, 0.0)))?;
    }
    Ok(acc)
}

impl fmt::Display for BellPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        // descending term order matches the customary display
        // (highest single derivative first)
        for (term, coeff) in self.terms.iter().rev() {
            let mag = coeff.abs();
            if first {
                if *coeff < 0 {
                    write!(f, "-")?;
                }
                first = false;
            } else if *coeff < 0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = vec![];
            if mag != 1 || term.is_empty() {
                factors.push(mag.to_string());
            }
            let mut i = 0;
            while i < term.len() {
                let mut run = 1;
                while i + run < term.len() && term[i + run] == term[i] {
                    run += 1;
                }
                if run == 1 {
                    factors.push(term[i].to_string());
                } else {
                    factors.push(format!("{}^{}", term[i], run));
                }
                i += run;
            }
            write!(f, "{}", factors.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_bell_polynomial_is_a_x() {
        let p = bell_generate(1, 0, 0, 0, 0).unwrap();
        assert_eq!(p.num_terms(), 1);
        assert_eq!(p.coeff(&[DerivSymbol::a(1, 0, 0, 0, 0)]), 1);
        assert_eq!(p.to_string(), "A_x");
    }

    #[test]
    fn zeroth_is_one() {
        let p = bell_generate(0, 0, 0, 0, 0).unwrap();
        assert_eq!(p.to_string(), "1");
    }

    #[test]
    fn third_order_classical() {
        // Y_{(3x,0,0),(0,0)} = A_xxx + 3 A_x A_xx + A_x^3
        let p = bell_generate(3, 0, 0, 0, 0).unwrap();
        let ax = DerivSymbol::a(1, 0, 0, 0, 0);
        let axx = DerivSymbol::a(2, 0, 0, 0, 0);
        let axxx = DerivSymbol::a(3, 0, 0, 0, 0);
        assert_eq!(p.num_terms(), 3);
        assert_eq!(p.coeff(&[axxx]), 1);
        assert_eq!(p.coeff(&[ax, axx]), 3);
        assert_eq!(p.coeff(&[ax, ax, ax]), 1);
        assert_eq!(p.to_string(), "A_xxx + 3 A_x A_xx + A_x^3");
    }

    #[test]
    fn binary_of_third_order() {
        // v_xxx + 3 v_x w_xx + v_x^3
        let b = bell_binary(&bell_generate(3, 0, 0, 0, 0).unwrap());
        let vx = DerivSymbol::new(Host::V, 1, 0, 0, 0, 0);
        let wxx = DerivSymbol::new(Host::W, 2, 0, 0, 0, 0);
        let vxxx = DerivSymbol::new(Host::V, 3, 0, 0, 0, 0);
        assert_eq!(b.coeff(&[vxxx]), 1);
        assert_eq!(b.coeff(&[vx, wxx]), 3);
        assert_eq!(b.coeff(&[vx, vx, vx]), 1);
    }

    #[test]
    fn binary_of_first_and_second_order() {
        let b1 = bell_binary(&bell_generate(1, 0, 0, 0, 0).unwrap());
        assert_eq!(b1.coeff(&[DerivSymbol::new(Host::V, 1, 0, 0, 0, 0)]), 1);
        let b2 = bell_binary(&bell_generate(2, 0, 0, 0, 0).unwrap());
        let vx = DerivSymbol::new(Host::V, 1, 0, 0, 0, 0);
        let wxx = DerivSymbol::new(Host::W, 2, 0, 0, 0, 0);
        assert_eq!(b2.coeff(&[wxx]), 1);
        assert_eq!(b2.coeff(&[vx, vx]), 1);
        assert_eq!(b2.num_terms(), 2);
    }

    #[test]
    fn p_polynomials_from_the_bilinearization() {
        // P_{(0,0,t),(0,1)} = Dy(w_t)
        let p = bell_p_polynomial(0, 0, 1, 0, 1).unwrap();
        assert_eq!(p.num_terms(), 1);
        assert_eq!(p.coeff(&[DerivSymbol::new(Host::W, 0, 0, 1, 0, 1)]), 1);
        // P_{(3x,0,0),(0,1)} = Dy(w_xxx) + 3 w_xx Dy(w_x)
        let p = bell_p_polynomial(3, 0, 0, 0, 1).unwrap();
        let dy_wxxx = DerivSymbol::new(Host::W, 3, 0, 0, 0, 1);
        let wxx = DerivSymbol::new(Host::W, 2, 0, 0, 0, 0);
        let dy_wx = DerivSymbol::new(Host::W, 1, 0, 0, 0, 1);
        assert_eq!(p.num_terms(), 2);
        assert_eq!(p.coeff(&[dy_wxxx]), 1);
        assert_eq!(p.coeff(&[wxx, dy_wx]), 3);
    }

    #[test]
    fn odd_total_order_p_vanishes() {
        for (lx, ly, lt, kx, ky) in [
            (1, 0, 0, 0, 0),
            (0, 0, 1, 0, 0),
            (2, 1, 0, 0, 0),
            (1, 0, 0, 1, 1),
            (2, 0, 0, 1, 0),
            (0, 1, 1, 0, 1),
        ] {
            let p = bell_p_polynomial(lx, ly, lt, kx, ky).unwrap();
            assert!(p.is_zero(), "P({lx},{ly},{lt},{kx},{ky}) = {p}");
        }
    }

    #[test]
    fn classical_bell_triangle_oracle() {
        // Independent oracle: the complete Bell recurrence
        // Y_{n+1} = sum_k C(n,k) Y_{n-k} * A_{(k+1)x}.
        fn binom_i(n: usize, k: usize) -> i64 {
            let mut b: i64 = 1;
            for i in 0..k {
                b = b * (n - i) as i64 / (i + 1) as i64;
            }
            b
        }
        let mut ys: Vec<BellPolynomial> = vec![BellPolynomial::one()];
        for n in 0..5usize {
            let mut next = BellPolynomial::zero();
            for k in 0..=n {
                let prev = &ys[n - k];
                let sym = DerivSymbol::a((k + 1) as u8, 0, 0, 0, 0);
                for (term, c) in prev.terms() {
                    let mut t = term.clone();
                    t.push(sym);
                    next.add_term(t, c * binom_i(n, k));
                }
            }
            ys.push(next);
        }
        for (n, y) in ys.iter().enumerate() {
            let generated = bell_generate(n, 0, 0, 0, 0).unwrap();
            assert_eq!(&generated, y, "order {n}");
        }
    }

    #[test]
    fn odd_symbol_square_drops() {
        let mut p = BellPolynomial::zero();
        let odd = DerivSymbol::a(0, 0, 0, 1, 0); // Dx(A), fermionic
        p.add_term(vec![odd, odd], 5);
        assert!(p.is_zero());
    }

    #[test]
    fn odd_swap_changes_sign() {
        let s1 = DerivSymbol::a(0, 0, 0, 1, 0); // Dx(A)
        let s2 = DerivSymbol::a(0, 0, 0, 0, 1); // Dy(A)
        let mut p = BellPolynomial::zero();
        p.add_term(vec![s2, s1], 1);
        assert_eq!(p.coeff(&[s1, s2]), -1);
    }

    #[test]
    fn order_cap_enforced() {
        assert!(matches!(
            bell_generate(5, 1, 1, 0, 0),
            Err(Error::OrderCapExceeded(7, _))
        ));
    }

    #[test]
    fn evaluate_powers() {
        use crate::grassmann::GeneratorSet;
        use crate::jet::{Jet, JetOrder};
        let gens = GeneratorSet::new(vec!["theta"]).unwrap();
        let ax = DerivSymbol::a(2, 0, 0, 0, 0); // even symbol
        let mut p = BellPolynomial::zero();
        p.add_term(vec![ax, ax, ax], 1);
        let mut table = BTreeMap::new();
        table.insert(
            ax,
            GrassmannElement::scalar(gens, Jet::constant_re(2.0, JetOrder::SCALAR)),
        );
        let v = bell_evaluate(&p, &table).unwrap();
        assert_eq!(v.body(JetOrder::SCALAR).value(), cx(8.0, 0.0));
    }
}
