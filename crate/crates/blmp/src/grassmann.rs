//! Finite Grassmann algebra over jet coefficients.
//!
//! Elements are sums of generator subsets (bitsets over an ordered
//! generator list) with jet-valued coefficients. The generator ordering is
//! fixed for the lifetime of a computation and defines the canonical sign
//! convention; products of overlapping subsets vanish by nilpotency.

use crate::error::{Error, Result};
use crate::jet::{cx, Cx, Jet, JetOrder, Var};
use std::collections::BTreeMap;
use std::sync::Arc;

pub const GENERATOR_CAPACITY: usize = 16;

#[derive(Debug, PartialEq, Eq)]
pub struct GeneratorSet {
    names: Vec<String>,
}

impl GeneratorSet {
    pub fn new<S: Into<String>>(names: Vec<S>) -> Result<Arc<GeneratorSet>> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.len() > GENERATOR_CAPACITY {
            return Err(Error::GeneratorCapacity(names.len()));
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::DuplicateGenerator(n.clone()));
            }
        }
        Ok(Arc::new(GeneratorSet { names }))
    }

    pub fn empty() -> Arc<GeneratorSet> {
        Arc::new(GeneratorSet { names: vec![] })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Renders a subset mask as a product of generator labels.
    pub fn mask_label(&self, mask: u16) -> String {
        if mask == 0 {
            return "1".to_string();
        }
        let mut parts = vec![];
        for (i, n) in self.names.iter().enumerate() {
            if mask & (1 << i) != 0 {
                parts.push(n.clone());
            }
        }
        parts.join("*")
    }
}

/// Sign of moving every generator of `m2` left past the generators of `m1`
/// to interleave-sort the concatenation `m1 ++ m2`.
fn reorder_sign(m1: u16, m2: u16) -> f64 {
    let mut transpositions = 0u32;
    let mut j = m2;
    while j != 0 {
        let bit = j.trailing_zeros();
        // generators of m1 strictly above `bit` must be hopped over
        transpositions += (m1 >> (bit + 1)).count_ones();
        j &= j - 1;
    }
    if transpositions.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

#[derive(Clone, Debug)]
pub struct GrassmannElement {
    gens: Arc<GeneratorSet>,
    terms: BTreeMap<u16, Jet>,
}

impl GrassmannElement {
    pub fn zero(gens: Arc<GeneratorSet>) -> Self {
        GrassmannElement {
            gens,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(gens: Arc<GeneratorSet>, coeff: Jet) -> Self {
        let mut e = Self::zero(gens);
        if !coeff.is_zero() {
            e.terms.insert(0, coeff);
        }
        e
    }

    pub fn scalar_c(gens: Arc<GeneratorSet>, v: Cx) -> Self {
        Self::scalar(gens, Jet::constant(v, JetOrder::SCALAR))
    }

    /// A single generator scaled by a jet coefficient.
    pub fn generator(gens: Arc<GeneratorSet>, index: usize, coeff: Jet) -> Self {
        let mut e = Self::zero(gens);
        e.terms.insert(1 << index, coeff);
        e
    }

    pub fn from_terms(gens: Arc<GeneratorSet>, terms: Vec<(u16, Jet)>) -> Self {
        let mut e = Self::zero(gens);
        for (m, j) in terms {
            e.accumulate(m, j);
        }
        e
    }

    pub fn gens(&self) -> &Arc<GeneratorSet> {
        &self.gens
    }

    pub fn terms(&self) -> impl Iterator<Item = (u16, &Jet)> {
        self.terms.iter().map(|(m, j)| (*m, j))
    }

    pub fn coeff(&self, mask: u16) -> Option<&Jet> {
        self.terms.get(&mask)
    }

    /// Coefficient of the empty subset.
    pub fn body(&self, order: JetOrder) -> Jet {
        self.terms
            .get(&0)
            .cloned()
            .unwrap_or_else(|| Jet::zero(order))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(Jet::is_zero)
    }

    fn accumulate(&mut self, mask: u16, jet: Jet) {
        if jet.is_zero() {
            return;
        }
        match self.terms.get_mut(&mask) {
            Some(existing) => *existing = existing.add(&jet),
            None => {
                self.terms.insert(mask, jet);
            }
        }
    }

    fn check_gens(&self, other: &Self) -> Result<()> {
        if self.gens == other.gens {
            Ok(())
        } else {
            Err(Error::GeneratorSetMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_gens(other)?;
        let mut out = self.clone();
        for (m, j) in &other.terms {
            out.accumulate(*m, j.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(cx(-1.0, 0.0))
    }

    pub fn scale(&self, s: Cx) -> Self {
        let mut out = self.clone();
        for j in out.terms.values_mut() {
            *j = j.scale(s);
        }
        out
    }

    pub fn scale_jet(&self, s: &Jet) -> Self {
        let mut out = Self::zero(self.gens.clone());
        for (m, j) in &self.terms {
            out.accumulate(*m, j.mul(s));
        }
        out
    }

    /// Signed, nilpotent exterior product; coefficients multiply in the
    /// jet ring.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_gens(other)?;
        let mut out = Self::zero(self.gens.clone());
        for (m1, j1) in &self.terms {
            for (m2, j2) in &other.terms {
                if m1 & m2 != 0 {
                    continue;
                }
                let sign = reorder_sign(*m1, *m2);
                out.accumulate(m1 | m2, j1.mul(j2).scale(cx(sign, 0.0)));
            }
        }
        Ok(out)
    }

    /// Parity of the element: 0 even, 1 odd. The zero element reports even.
    /// Mixed-parity elements have no parity.
    pub fn parity(&self) -> Result<u8> {
        let mut p: Option<u8> = None;
        for (m, j) in &self.terms {
            if j.is_zero() {
                continue;
            }
            let tp = (m.count_ones() % 2) as u8;
            match p {
                None => p = Some(tp),
                Some(q) if q != tp => return Err(Error::ParityUndefined),
                _ => {}
            }
        }
        Ok(p.unwrap_or(0))
    }

    pub fn deriv(&self, which: Var) -> Result<Self> {
        let mut out = Self::zero(self.gens.clone());
        for (m, j) in &self.terms {
            out.accumulate(*m, j.deriv(which)?);
        }
        Ok(out)
    }

    /// Extracts the (i,j,k) partial of every coefficient as a scalar-jet
    /// element.
    pub fn partial(&self, i: usize, j: usize, k: usize) -> Result<Self> {
        let mut out = Self::zero(self.gens.clone());
        for (m, jet) in &self.terms {
            let v = jet.partial(i, j, k)?;
            out.accumulate(*m, Jet::constant(v, JetOrder::SCALAR));
        }
        Ok(out)
    }

    fn nilpotent_over_body(&self, body_inv: &Jet) -> Self {
        let mut n = Self::zero(self.gens.clone());
        for (m, j) in &self.terms {
            if *m != 0 {
                n.accumulate(*m, j.mul(body_inv));
            }
        }
        n
    }

    fn series_in_nilpotent(&self, body_part: Jet, coeffs: impl Fn(usize) -> f64, n: &Self) -> Result<Self> {
        // sum_{m>=1} c_m n^m terminates at the generator count; the power
        // seed must carry the full jet order or the products collapse to
        // scalars (Jet::mul truncates to the minimum order)
        let one = Jet::constant(cx(1.0, 0.0), body_part.order());
        let mut out = Self::scalar(self.gens.clone(), body_part);
        let mut power = Self::scalar(self.gens.clone(), one);
        for m in 1..=self.gens.len() {
            power = power.mul(n)?;
            if power.is_zero() {
                break;
            }
            out = out.add(&power.scale(cx(coeffs(m), 0.0)))?;
        }
        Ok(out)
    }

    /// Multiplicative inverse; requires an invertible body jet.
    pub fn inv(&self, order: JetOrder) -> Result<Self> {
        let b = self.body(order);
        let binv = b.recip()?;
        let n = self.nilpotent_over_body(&binv);
        let series = self.series_in_nilpotent(
            Jet::constant(cx(1.0, 0.0), order),
            |m| if m % 2 == 0 { 1.0 } else { -1.0 },
            &n,
        )?;
        Ok(series.scale_jet(&binv))
    }

    pub fn ln(&self, order: JetOrder) -> Result<Self> {
        let b = self.body(order);
        let binv = b.recip()?;
        let n = self.nilpotent_over_body(&binv);
        self.series_in_nilpotent(
            b.ln()?,
            |m| {
                let s = if m % 2 == 0 { -1.0 } else { 1.0 };
                s / m as f64
            },
            &n,
        )
    }

    pub fn exp(&self, order: JetOrder) -> Result<Self> {
        let b = self.body(order);
        let eb = b.exp();
        // exp(b + n) = e^b sum n^m/m!; n here is the raw nilpotent part
        let mut n = Self::zero(self.gens.clone());
        for (m, j) in &self.terms {
            if *m != 0 {
                n.accumulate(*m, j.clone());
            }
        }
        let mut out = Self::scalar(self.gens.clone(), Jet::constant(cx(1.0, 0.0), order));
        // full-order seed, as in series_in_nilpotent
        let mut power = Self::scalar(self.gens.clone(), Jet::constant(cx(1.0, 0.0), order));
        let mut fact = 1.0;
        for m in 1..=self.gens.len() {
            power = power.mul(&n)?;
            fact *= m as f64;
            if power.is_zero() {
                break;
            }
            out = out.add(&power.scale(cx(1.0 / fact, 0.0)))?;
        }
        Ok(out.scale_jet(&eb))
    }

    /// Largest coefficient magnitude over every term's jet coefficients.
    pub fn max_norm(&self) -> f64 {
        self.terms
            .values()
            .map(Jet::max_coeff_norm)
            .fold(0.0, f64::max)
    }

    /// Largest constant-term magnitude over the Grassmann components.
    pub fn max_value_norm(&self) -> f64 {
        self.terms
            .values()
            .map(|j| j.value().norm())
            .fold(0.0, f64::max)
    }
}
