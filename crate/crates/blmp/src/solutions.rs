//! Constructors for the classical solution families: rational similarity
//! solutions from Yablonskii-Vorob'ev polynomials, N-solitons, Wronskian
//! solutions (rational/positon/negaton/complexiton and interactions),
//! displayed closed forms, and the general traveling wave.

use crate::error::{Error, Result};
use crate::funcs::NamedFn;
use crate::jet::{cx, Cx, Jet, JetOrder, Var};
use crate::superfield::Point;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

pub const YABLONSKII_CAP: usize = 8;

/// Tau magnitudes below this are treated as solution singularities.
pub const TAU_FLOOR: f64 = 1e-8;

// ---------------------------------------------------------------------------
// Yablonskii-Vorob'ev polynomials (exact arithmetic)
// ---------------------------------------------------------------------------

/// Dense univariate polynomial with exact rational coefficients,
/// ascending powers of z.
#[derive(Clone, Debug, PartialEq)]
pub struct RatPoly {
    pub coeffs: Vec<BigRational>,
}

impl RatPoly {
    pub fn constant(c: i64) -> Self {
        RatPoly {
            coeffs: vec![BigRational::from(BigInt::from(c))],
        }
    }

    pub fn z() -> Self {
        RatPoly {
            coeffs: vec![BigRational::zero(), BigRational::one()],
        }
    }

    fn trim(mut self) -> Self {
        while self.coeffs.len() > 1 && self.coeffs.last().unwrap().is_zero() {
            self.coeffs.pop();
        }
        self
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut c = vec![BigRational::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            c[i] += a;
        }
        for (i, b) in other.coeffs.iter().enumerate() {
            c[i] += b;
        }
        RatPoly { coeffs: c }.trim()
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale_int(-1))
    }

    pub fn scale_int(&self, s: i64) -> Self {
        let s = BigRational::from(BigInt::from(s));
        RatPoly {
            coeffs: self.coeffs.iter().map(|c| c * &s).collect(),
        }
        .trim()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut c = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        RatPoly { coeffs: c }.trim()
    }

    pub fn deriv(&self) -> Self {
        if self.coeffs.len() == 1 {
            return RatPoly::constant(0);
        }
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, a)| a * BigRational::from(BigInt::from(i as i64)))
            .collect();
        RatPoly { coeffs: c }.trim()
    }

    /// Exact division; remainder must vanish.
    pub fn exact_div(&self, divisor: &Self, at_n: usize) -> Result<Self> {
        if divisor.is_zero() {
            return Err(Error::NonExactDivision(at_n));
        }
        let mut rem = self.coeffs.clone();
        let dd = divisor.degree();
        let lead = divisor.coeffs[dd].clone();
        if rem.len() < dd + 1 {
            if self.is_zero() {
                return Ok(RatPoly::constant(0));
            }
            return Err(Error::NonExactDivision(at_n));
        }
        let qn = rem.len() - dd;
        let mut q = vec![BigRational::zero(); qn];
        for k in (0..qn).rev() {
            let c = &rem[k + dd] / &lead;
            if !c.is_zero() {
                for (i, d) in divisor.coeffs.iter().enumerate() {
                    let v = &c * d;
                    rem[k + i] -= v;
                }
            }
            q[k] = c;
        }
        if rem.iter().any(|r| !r.is_zero()) {
            return Err(Error::NonExactDivision(at_n));
        }
        Ok(RatPoly { coeffs: q }.trim())
    }

    pub fn coeffs_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.to_f64().unwrap()).collect()
    }

    /// Horner evaluation through a jet argument.
    pub fn eval_jet(&self, s: &Jet) -> Jet {
        let cf = self.coeffs_f64();
        let mut acc = Jet::zero(s.order());
        for c in cf.iter().rev() {
            acc = acc.mul(s).add(&Jet::constant_re(*c, s.order()));
        }
        acc
    }

    pub fn has_integer_coeffs(&self) -> bool {
        self.coeffs.iter().all(|c| c.denom().abs() == BigInt::one())
    }
}

/// The Yablonskii-Vorob'ev polynomial Q_n, computed by the exact
/// recursion Q_{n+1} Q_{n-1} = z Q_n^2 - 4 (Q_n Q_n'' - Q_n'^2).
pub fn yablonskii(n: usize) -> Result<RatPoly> {
    if n > YABLONSKII_CAP {
        return Err(Error::CapExceeded(n, YABLONSKII_CAP));
    }
    let mut prev = RatPoly::constant(1);
    if n == 0 {
        return Ok(prev);
    }
    let mut cur = RatPoly::z();
    for k in 1..n {
        let qpp = cur.deriv().deriv();
        let qp = cur.deriv();
        let numer = RatPoly::z()
            .mul(&cur)
            .mul(&cur)
            .sub(&cur.mul(&qpp).sub(&qp.mul(&qp)).scale_int(4));
        let next = numer.exact_div(&prev, k + 1)?;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

// ---------------------------------------------------------------------------
// Field plumbing
// ---------------------------------------------------------------------------

pub type XYTFn = Arc<dyn Fn(Point, JetOrder) -> Result<Jet> + Send + Sync>;
/// A function of the reduced variables, applied to (z, t) jets drawn from
/// the ambient jet space (z occupies the x slot).
pub type ZJetFn = Arc<dyn Fn(&Jet, &Jet) -> Result<Jet> + Send + Sync>;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ReductionSpec {
    pub q: NamedFn,
    #[serde(default)]
    pub m: NamedFn,
}

impl ReductionSpec {
    pub fn with_q(q: NamedFn) -> Self {
        ReductionSpec { q, m: NamedFn::Zero }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedFormName {
    Negaton2,
    Positon2,
    Complexiton,
    RationalSoliton,
    RationalPositon,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    RationalSimilarity { n: usize },
    NSoliton { n: usize },
    Wronskian { size: usize },
    ClosedForm { name: ClosedFormName },
    TravelingWave,
    Custom { label: String },
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Family::RationalSimilarity { n } => write!(f, "rational_similarity(n={n})"),
            Family::NSoliton { n } => write!(f, "n_soliton(N={n})"),
            Family::Wronskian { size } => write!(f, "wronskian(N={size})"),
            Family::ClosedForm { name } => write!(f, "closed_form({name:?})"),
            Family::TravelingWave => write!(f, "traveling_wave"),
            Family::Custom { label } => write!(f, "custom({label})"),
        }
    }
}

/// An evaluable solution of the BLMP equation, optionally backed by a tau
/// function and a z = x + q(y) reduction.
#[derive(Clone)]
pub struct SolutionField {
    pub family: Family,
    red: Option<ReductionSpec>,
    m: NamedFn,
    u_xyz: XYTFn,
    tau_xyz: Option<XYTFn>,
    u_z: Option<ZJetFn>,
    tau_z: Option<ZJetFn>,
    extra_x: usize,
}

impl SolutionField {
    pub fn reduction(&self) -> Option<&ReductionSpec> {
        self.red.as_ref()
    }

    pub fn m(&self) -> &NamedFn {
        &self.m
    }

    pub fn has_tau(&self) -> bool {
        self.tau_xyz.is_some()
    }

    pub fn has_u_z(&self) -> bool {
        self.u_z.is_some()
    }

    pub fn eval_u(&self, p: Point, order: JetOrder) -> Result<Jet> {
        (self.u_xyz)(p, order)
    }

    pub fn eval_tau(&self, p: Point, order: JetOrder) -> Result<Jet> {
        match &self.tau_xyz {
            Some(f) => f(p, order),
            None => Err(Error::InvariantViolation("family carries no tau".into())),
        }
    }

    /// Evaluates u in the reduced variables (z, t); z occupies the x slot
    /// of the returned jet.
    pub fn eval_u_z(&self, z: f64, t: f64, order: JetOrder) -> Result<Jet> {
        let f = self
            .u_z
            .as_ref()
            .ok_or_else(|| Error::InvariantViolation("family carries no reduced form".into()))?;
        let ord_in = JetOrder::new(order.ox + 1 + self.extra_x, order.oy, order.ot);
        let zj = Jet::var_re(Var::X, z, ord_in);
        let tj = Jet::var_re(Var::T, t, ord_in);
        f(&zj, &tj)
    }

    pub fn eval_tau_z(&self, z: f64, t: f64, order: JetOrder) -> Result<Jet> {
        let f = self
            .tau_z
            .as_ref()
            .ok_or_else(|| Error::InvariantViolation("family carries no reduced tau".into()))?;
        let ord_in = JetOrder::new(order.ox + self.extra_x, order.oy, order.ot);
        let zj = Jet::var_re(Var::X, z, ord_in);
        let tj = Jet::var_re(Var::T, t, ord_in);
        f(&zj, &tj)
    }

    pub fn custom(
        label: &str,
        m: NamedFn,
        u: impl Fn(Point, JetOrder) -> Result<Jet> + Send + Sync + 'static,
    ) -> Self {
        SolutionField {
            family: Family::Custom { label: label.into() },
            red: None,
            m,
            u_xyz: Arc::new(u),
            tau_xyz: None,
            u_z: None,
            tau_z: None,
            extra_x: 0,
        }
    }

    /// Builds a field from a tau function of the reduced variables:
    /// u = -2 d_z log tau with z = x + q(y).
    fn from_tau_z(family: Family, tau_z: ZJetFn, red: ReductionSpec, extra_x: usize) -> Self {
        let q = red.q.clone();
        let tz = tau_z.clone();
        let u_xyz: XYTFn = Arc::new(move |p, ord| {
            let ord_in = JetOrder::new(ord.ox + 1 + extra_x, ord.oy, ord.ot);
            let x = Jet::var_re(Var::X, p[0], ord_in);
            let y = Jet::var_re(Var::Y, p[1], ord_in);
            let t = Jet::var_re(Var::T, p[2], ord_in);
            let zj = x.add(&q.apply(&y));
            let tau = tz(&zj, &t)?;
            u_from_tau(&tau)
        });
        let q2 = red.q.clone();
        let tz2 = tau_z.clone();
        let tau_xyz: XYTFn = Arc::new(move |p, ord| {
            let ord_in = JetOrder::new(ord.ox + extra_x, ord.oy, ord.ot);
            let x = Jet::var_re(Var::X, p[0], ord_in);
            let y = Jet::var_re(Var::Y, p[1], ord_in);
            let t = Jet::var_re(Var::T, p[2], ord_in);
            let zj = x.add(&q2.apply(&y));
            tz2(&zj, &t)
        });
        let tz3 = tau_z.clone();
        let u_z: ZJetFn = Arc::new(move |zj, tj| {
            let tau = tz3(zj, tj)?;
            u_from_tau(&tau)
        });
        SolutionField {
            family,
            red: Some(red),
            m: NamedFn::Zero,
            u_xyz,
            tau_xyz: Some(tau_xyz),
            u_z: Some(u_z),
            tau_z: Some(tau_z),
            extra_x,
        }
    }

    /// Builds a field from a closed-form u of the reduced variables.
    fn from_u_z(family: Family, u_z: ZJetFn, red: ReductionSpec) -> Self {
        let q = red.q.clone();
        let uz = u_z.clone();
        let u_xyz: XYTFn = Arc::new(move |p, ord| {
            let ord_in = JetOrder::new(ord.ox + 1, ord.oy, ord.ot);
            let x = Jet::var_re(Var::X, p[0], ord_in);
            let y = Jet::var_re(Var::Y, p[1], ord_in);
            let t = Jet::var_re(Var::T, p[2], ord_in);
            let zj = x.add(&q.apply(&y));
            uz(&zj, &t)
        });
        SolutionField {
            family,
            red: Some(red),
            m: NamedFn::Zero,
            u_xyz,
            tau_xyz: None,
            u_z: Some(u_z),
            tau_z: None,
            extra_x: 0,
        }
    }
}

fn u_from_tau(tau: &Jet) -> Result<Jet> {
    if tau.value().norm() <= TAU_FLOOR {
        return Err(Error::SingularPoint);
    }
    let tx = tau.deriv(Var::X)?;
    Ok(tx.div(tau)?.scale(cx(-2.0, 0.0)))
}

/// (tanh, sech^2) of a jet computed through e^{-2|arg|}; far-field
/// coefficients stay relatively accurate where the naive recurrences
/// cancel catastrophically.
fn tanh_sech2(arg: &Jet) -> Result<(Jet, Jet)> {
    let s = if arg.value().re < 0.0 { -1.0 } else { 1.0 };
    let e = arg.scale(cx(-2.0 * s, 0.0)).exp();
    let one = Jet::constant_re(1.0, e.order());
    let onep = e.add(&one);
    let t = one.sub(&e).div(&onep)?.scale(cx(s, 0.0));
    let sech2 = e.scale(cx(4.0, 0.0)).div(&onep.mul(&onep))?;
    Ok((t, sech2))
}

/// (cosh, sinh) scaled by the constant e^{-|Re arg(0)|}. Wronskian rows
/// may be rescaled by constants without changing u, and the scaled pair
/// never overflows.
fn scaled_hyperbolic(arg: &Jet) -> (Jet, Jet) {
    let a = Jet::constant_re(arg.value().re.abs(), arg.order());
    let ep = arg.sub(&a).exp();
    let em = arg.neg().sub(&a).exp();
    (
        ep.add(&em).scale(cx(0.5, 0.0)),
        ep.sub(&em).scale(cx(0.5, 0.0)),
    )
}

pub(crate) fn guarded_div(num: &Jet, den: &Jet) -> Result<Jet> {
    if den.value().norm() <= TAU_FLOOR {
        return Err(Error::SingularPoint);
    }
    num.div(den)
}

/// Real-branch (3t)^{-1/3} through a jet (sign-preserving cube root).
fn recip_cbrt_3t(tj: &Jet) -> Result<Jet> {
    let tau3 = tj.scale(cx(3.0, 0.0));
    let t0 = tau3.value();
    if t0.norm() <= 1e-10 {
        return Err(Error::SingularPoint);
    }
    let f0 = cx(t0.re.signum() * t0.re.abs().powf(-1.0 / 3.0), 0.0);
    let d = tau3.order().total();
    let mut coeffs = Vec::with_capacity(d + 1);
    let mut c = f0;
    coeffs.push(c);
    for n in 0..d {
        c = c * cx(-1.0 / 3.0 - n as f64, 0.0) / (cx(n as f64 + 1.0, 0.0) * t0);
        coeffs.push(c);
    }
    Ok(tau3.compose(&coeffs))
}

// ---------------------------------------------------------------------------
// Rational similarity solutions
// ---------------------------------------------------------------------------

/// u_n = -2 d/dz log Q_n(z (3t)^{-1/3}).
pub fn rational_similarity(n: usize, red: ReductionSpec) -> Result<SolutionField> {
    let q_n = yablonskii(n)?;
    let tau_z: ZJetFn = Arc::new(move |zj, tj| {
        let s = zj.mul(&recip_cbrt_3t(tj)?);
        Ok(q_n.eval_jet(&s))
    });
    Ok(SolutionField::from_tau_z(
        Family::RationalSimilarity { n },
        tau_z,
        red,
        0,
    ))
}

// ---------------------------------------------------------------------------
// N-soliton solutions
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct SolitonParams {
    pub kappa: Vec<Cx>,
}

impl SolitonParams {
    pub fn new(kappa: Vec<Cx>) -> Result<Self> {
        for i in 0..kappa.len() {
            for j in i + 1..kappa.len() {
                if (kappa[i] + kappa[j]).norm() <= 1e-12 {
                    return Err(Error::InvalidKappa(format!(
                        "kappa_{} + kappa_{} vanishes",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(SolitonParams { kappa })
    }

    /// The phase-shift coefficient A_ij = ((k_i - k_j)/(k_i + k_j))^2.
    pub fn coupling(&self, i: usize, j: usize) -> Cx {
        let r = (self.kappa[i] - self.kappa[j]) / (self.kappa[i] + self.kappa[j]);
        r * r
    }
}

/// tau = sum over mu in {0,1}^N of exp(sum mu_i psi_i) times the pairwise
/// couplings, with psi_i = k_i z - k_i^3 t.
pub fn n_soliton(params: SolitonParams, red: ReductionSpec) -> Result<SolutionField> {
    let n = params.kappa.len();
    let kappa = params.kappa.clone();
    let couplings: Vec<Vec<Cx>> = (0..n)
        .map(|i| (0..n).map(|j| if i < j { params.coupling(i, j) } else { Cx::default() }).collect())
        .collect();
    let tau_z: ZJetFn = Arc::new(move |zj, tj| {
        let mut tau = Jet::zero(zj.order().min(&tj.order()));
        for mask in 0u32..(1 << n) {
            let mut phase = Jet::zero(zj.order().min(&tj.order()));
            let mut amp = cx(1.0, 0.0);
            for i in 0..n {
                if mask & (1 << i) == 0 {
                    continue;
                }
                let k = kappa[i];
                phase = phase.add(&zj.scale(k).sub(&tj.scale(k * k * k)));
                for (j, c) in couplings[i].iter().enumerate().skip(i + 1) {
                    if mask & (1 << j) != 0 {
                        amp *= c;
                    }
                }
            }
            tau = tau.add(&phase.exp().scale(amp));
        }
        Ok(tau)
    });
    Ok(SolutionField::from_tau_z(Family::NSoliton { n }, tau_z, red, 0))
}

// ---------------------------------------------------------------------------
// Wronskian solutions
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum HyperPhase {
    Cosh,
    Sinh,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum TrigPhase {
    Cos,
    Sin,
}

/// One Wronskian basis entry; each satisfies -h_zz = lambda h and
/// h_t = -4 h_zzz (deriv entries are the eigenvalue-derivative Jordan
/// companions of their base).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WronskianEntry {
    /// lambda = 0: h = c0 + c1 z
    Rational { c0: f64, c1: f64 },
    /// lambda = -gamma^2: h = cosh/sinh(gamma (z - 4 gamma^2 t))
    Negaton { gamma: f64, phase: HyperPhase, #[serde(default)] deriv: bool },
    /// lambda = +gamma^2: h = cos/sin(gamma (z + 4 gamma^2 t))
    Positon { gamma: f64, phase: TrigPhase, #[serde(default)] deriv: bool },
    /// lambda = -eta (non-real): h = cosh(sqrt(eta)(z - 4 eta t))
    Complexiton { eta_re: f64, eta_im: f64, #[serde(default)] conjugate: bool },
}

impl WronskianEntry {
    pub fn eval(&self, zj: &Jet, tj: &Jet) -> Result<Jet> {
        match self {
            WronskianEntry::Rational { c0, c1 } => Ok(zj
                .scale(cx(*c1, 0.0))
                .add(&Jet::constant_re(*c0, zj.order()))),
            WronskianEntry::Negaton { gamma, phase, deriv } => {
                let g = *gamma;
                let arg = zj.scale(cx(g, 0.0)).sub(&tj.scale(cx(4.0 * g * g * g, 0.0)));
                let (ch, sh) = scaled_hyperbolic(&arg);
                if !deriv {
                    Ok(match phase {
                        HyperPhase::Cosh => ch,
                        HyperPhase::Sinh => sh,
                    })
                } else {
                    // d/dgamma of the base: (z - 12 g^2 t) times the
                    // phase-shifted companion
                    let darg = zj.sub(&tj.scale(cx(12.0 * g * g, 0.0)));
                    Ok(match phase {
                        HyperPhase::Cosh => sh.mul(&darg),
                        HyperPhase::Sinh => ch.mul(&darg),
                    })
                }
            }
            WronskianEntry::Positon { gamma, phase, deriv } => {
                let g = *gamma;
                let arg = zj.scale(cx(g, 0.0)).add(&tj.scale(cx(4.0 * g * g * g, 0.0)));
                if !deriv {
                    Ok(match phase {
                        TrigPhase::Cos => arg.cos(),
                        TrigPhase::Sin => arg.sin(),
                    })
                } else {
                    let darg = zj.add(&tj.scale(cx(12.0 * g * g, 0.0)));
                    Ok(match phase {
                        TrigPhase::Cos => arg.sin().neg().mul(&darg),
                        TrigPhase::Sin => arg.cos().mul(&darg),
                    })
                }
            }
            WronskianEntry::Complexiton { eta_re, eta_im, conjugate } => {
                let eta = if *conjugate {
                    cx(*eta_re, -*eta_im)
                } else {
                    cx(*eta_re, *eta_im)
                };
                let root = eta.sqrt();
                let arg = zj.sub(&tj.scale(eta * 4.0)).scale(root);
                Ok(scaled_hyperbolic(&arg).0)
            }
        }
    }

    pub fn lambda(&self) -> Cx {
        match self {
            WronskianEntry::Rational { .. } => Cx::default(),
            WronskianEntry::Negaton { gamma, .. } => cx(-gamma * gamma, 0.0),
            WronskianEntry::Positon { gamma, .. } => cx(gamma * gamma, 0.0),
            WronskianEntry::Complexiton { eta_re, eta_im, conjugate } => {
                if *conjugate {
                    -cx(*eta_re, -*eta_im)
                } else {
                    -cx(*eta_re, *eta_im)
                }
            }
        }
    }

    pub fn is_jordan(&self) -> bool {
        matches!(
            self,
            WronskianEntry::Negaton { deriv: true, .. } | WronskianEntry::Positon { deriv: true, .. }
        )
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct WronskianSpec {
    pub entries: Vec<WronskianEntry>,
}

fn determinant(m: &[Vec<Jet>]) -> Jet {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc: Option<Jet> = None;
    for i in 0..n {
        let minor: Vec<Vec<Jet>> = m
            .iter()
            .enumerate()
            .filter(|(r, _)| *r != i)
            .map(|(_, row)| row[1..].to_vec())
            .collect();
        let term = m[i][0].mul(&determinant(&minor));
        let signed = if i % 2 == 0 { term } else { term.neg() };
        acc = Some(match acc {
            Some(a) => a.add(&signed),
            None => signed,
        });
    }
    acc.unwrap()
}

/// tau = Wronskian determinant of the basis in z; u = -2 d_z log tau.
pub fn wronskian_solution(spec: WronskianSpec, red: ReductionSpec) -> Result<SolutionField> {
    let n = spec.entries.len();
    if n == 0 || n > 4 {
        return Err(Error::CapExceeded(n, 4));
    }
    let entries = spec.entries.clone();
    let tau_z: ZJetFn = Arc::new(move |zj, tj| {
        let mut rows = Vec::with_capacity(n);
        for e in &entries {
            let mut row = Vec::with_capacity(n);
            let mut h = e.eval(zj, tj)?;
            row.push(h.clone());
            for _ in 1..n {
                h = h.deriv(Var::X)?;
                row.push(h.clone());
            }
            rows.push(row);
        }
        let det = determinant(&rows);
        if det.value().norm() <= TAU_FLOOR {
            return Err(Error::DegenerateWronskian);
        }
        Ok(det)
    });
    Ok(SolutionField::from_tau_z(
        Family::Wronskian { size: n },
        tau_z,
        red,
        n - 1,
    ))
}

// ---------------------------------------------------------------------------
// Displayed closed forms
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ClosedFormParams {
    #[serde(default = "one_f64")]
    pub gamma1: f64,
    /// complexiton eta = alpha + i beta
    #[serde(default = "one_f64")]
    pub alpha: f64,
    #[serde(default = "one_f64")]
    pub beta: f64,
}

fn one_f64() -> f64 {
    1.0
}

impl Default for ClosedFormParams {
    fn default() -> Self {
        ClosedFormParams { gamma1: 1.0, alpha: 1.0, beta: 1.0 }
    }
}

pub fn closed_form(
    name: ClosedFormName,
    params: ClosedFormParams,
    red: ReductionSpec,
) -> Result<SolutionField> {
    let g = params.gamma1;
    if matches!(
        name,
        ClosedFormName::Negaton2
            | ClosedFormName::Positon2
            | ClosedFormName::RationalSoliton
            | ClosedFormName::RationalPositon
    ) && g == 0.0
    {
        return Err(Error::InvariantViolation("gamma1 must be nonzero".into()));
    }
    if matches!(name, ClosedFormName::Complexiton) && params.beta == 0.0 {
        return Err(Error::InvariantViolation(
            "complexiton needs a non-real eta (beta != 0)".into(),
        ));
    }
    let u_z: ZJetFn = match &name {
        ClosedFormName::Negaton2 => Arc::new(move |zj, tj| {
            // the displayed form divided through by cosh^2
            let arg = zj.scale(cx(g, 0.0)).sub(&tj.scale(cx(4.0 * g * g * g, 0.0)));
            let (t, s) = tanh_sech2(&arg)?;
            let num = Jet::constant_re(8.0 * g, zj.order());
            let den = tj
                .scale(cx(12.0 * g * g, 0.0))
                .sub(zj)
                .scale(cx(2.0 * g, 0.0))
                .mul(&s)
                .sub(&t.scale(cx(2.0, 0.0)));
            guarded_div(&num, &den)
        }),
        ClosedFormName::Positon2 => Arc::new(move |zj, tj| {
            let arg = zj.scale(cx(g, 0.0)).add(&tj.scale(cx(4.0 * g * g * g, 0.0)));
            let num = arg.cos().mul(&arg.cos()).scale(cx(-8.0 * g, 0.0));
            let den = tj
                .scale(cx(12.0 * g * g, 0.0))
                .add(zj)
                .scale(cx(2.0 * g, 0.0))
                .add(&arg.scale(cx(2.0, 0.0)).sin());
            guarded_div(&num, &den)
        }),
        ClosedFormName::Complexiton => {
            let eta = cx(params.alpha, params.beta);
            Arc::new(move |zj, tj| {
                // the displayed form divided through by cosh(chi) cosh(chi_bar)
                let root = eta.sqrt();
                let root_bar = eta.conj().sqrt();
                let chi = zj.sub(&tj.scale(eta * 4.0)).scale(root);
                let chi_bar = zj.sub(&tj.scale(eta.conj() * 4.0)).scale(root_bar);
                let (t, _) = tanh_sech2(&chi)?;
                let (t_bar, _) = tanh_sech2(&chi_bar)?;
                let num = Jet::constant(cx(0.0, 4.0 * eta.im), zj.order());
                let den = t_bar.scale(root_bar).sub(&t.scale(root));
                guarded_div(&num, &den)
            })
        }
        ClosedFormName::RationalSoliton => Arc::new(move |zj, tj| {
            let arg = zj.scale(cx(g, 0.0)).sub(&tj.scale(cx(4.0 * g * g * g, 0.0)));
            let num = zj.scale(cx(-2.0 * g * g, 0.0));
            let (t, _) = tanh_sech2(&arg)?;
            let den = zj
                .scale(cx(g, 0.0))
                .mul(&t)
                .sub(&Jet::constant_re(1.0, zj.order()));
            guarded_div(&num, &den)
        }),
        ClosedFormName::RationalPositon => Arc::new(move |zj, tj| {
            let arg = zj.scale(cx(g, 0.0)).add(&tj.scale(cx(4.0 * g * g * g, 0.0)));
            let num = zj.scale(cx(-2.0 * g * g, 0.0));
            let den = zj
                .scale(cx(g, 0.0))
                .mul(&arg.tan()?)
                .add(&Jet::constant_re(1.0, zj.order()));
            guarded_div(&num, &den)
        }),
    };
    Ok(SolutionField::from_u_z(
        Family::ClosedForm { name },
        u_z,
        red,
    ))
}

// ---------------------------------------------------------------------------
// Traveling wave
// ---------------------------------------------------------------------------

/// u = -2a d_w log(c1 e^{(1+alpha)w/2} + c2 e^{(-1+alpha)w/2}) - m(y)
/// with w = a x + m(y)/a - 4 a^3 t.
pub fn traveling_wave(
    a: Cx,
    alpha: Cx,
    c1: Cx,
    c2: Cx,
    m: NamedFn,
) -> Result<SolutionField> {
    if a.norm() <= 1e-12 {
        return Err(Error::InvariantViolation("a must be nonzero".into()));
    }
    if c1.norm() <= 1e-300 && c2.norm() <= 1e-300 {
        return Err(Error::InvariantViolation("(c1, c2) must not both vanish".into()));
    }
    let m2 = m.clone();
    let tau_w = move |w: &Jet| -> Jet {
        let e1 = w.scale((cx(1.0, 0.0) + alpha) * 0.5).exp().scale(c1);
        let e2 = w.scale((cx(-1.0, 0.0) + alpha) * 0.5).exp().scale(c2);
        e1.add(&e2)
    };
    let w_of = move |p: Point, ord: JetOrder, m: &NamedFn| -> Jet {
        let x = Jet::var_re(Var::X, p[0], ord);
        let y = Jet::var_re(Var::Y, p[1], ord);
        let t = Jet::var_re(Var::T, p[2], ord);
        x.scale(a)
            .add(&m.apply(&y).scale(a.inv()))
            .sub(&t.scale(a * a * a * 4.0))
    };
    let tw = tau_w;
    let mu = m.clone();
    let u_xyz: XYTFn = Arc::new(move |p, ord| {
        let ord_in = JetOrder::new(ord.ox + 1, ord.oy, ord.ot);
        let w = w_of(p, ord_in, &mu);
        let tau = tw(&w);
        let y = Jet::var_re(Var::Y, p[1], ord_in);
        let u = u_from_tau(&tau)?;
        Ok(u.sub(&mu.apply(&y)))
    });
    let tau_xyz: XYTFn = Arc::new(move |p, ord| {
        let w = w_of(p, ord, &m2);
        Ok(tau_w(&w))
    });
    Ok(SolutionField {
        family: Family::TravelingWave,
        red: None,
        m,
        u_xyz,
        tau_xyz: Some(tau_xyz),
        u_z: None,
        tau_z: None,
        extra_x: 0,
    })
}

/// The alpha = 0, c1 = c2 = 1 kink: u = -a tanh(w/2) - m(y).
pub fn kink(a: Cx, m: NamedFn) -> Result<SolutionField> {
    traveling_wave(a, Cx::default(), cx(1.0, 0.0), cx(1.0, 0.0), m)
}
