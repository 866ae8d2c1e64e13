//! Supersymmetric solution constructors: super solitons from the
//! epsilon-expansion of the bilinear tau and superpartners of the
//! traveling-wave family, together with their dedicated checks.

use crate::error::{Error, Result};
use crate::funcs::NamedFn;
use crate::grassmann::{GeneratorSet, GrassmannElement};
use crate::jet::{cx, Cx, Jet, JetOrder, Var};
use crate::residual::{EquationId, ResidualReport};
use crate::solutions::guarded_div;
use crate::superfield::{Point, SuperValue, Superfield};
use std::sync::Arc;

const GEOM_FLOOR: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Super solitons
// ---------------------------------------------------------------------------

/// Phase data for one or two super solitons: phi_i = kappa_i x + rho_i y
/// + omega_i t + theta zeta_i with the dispersion omega_i = -kappa_i^3.
#[derive(Clone, Debug)]
pub struct SuperSolitonParams {
    pub kappa: Vec<Cx>,
    pub rho: Vec<Cx>,
    pub omega: Vec<Cx>,
}

impl SuperSolitonParams {
    pub fn new(kappa: Vec<Cx>, rho: Vec<Cx>) -> Result<Self> {
        if kappa.is_empty() || kappa.len() > 2 || kappa.len() != rho.len() {
            return Err(Error::InvariantViolation(
                "expected matching kappa/rho lists of length 1 or 2".into(),
            ));
        }
        if kappa.len() == 2 {
            // A12 and alpha_ij finite, and the zeta1 zeta2 correction finite
            if (rho[0] - rho[1]).norm() <= GEOM_FLOOR {
                return Err(Error::InvariantViolation("rho1 = rho2".into()));
            }
            if (rho[0] + rho[1]).norm() <= GEOM_FLOOR {
                return Err(Error::InvariantViolation("rho1 + rho2 = 0".into()));
            }
            if (kappa[0] + kappa[1]).norm() <= GEOM_FLOOR {
                return Err(Error::InvariantViolation("kappa1 + kappa2 = 0".into()));
            }
        }
        let omega = kappa.iter().map(|k| -k * k * k).collect();
        Ok(SuperSolitonParams { kappa, rho, omega })
    }

    /// Overrides the dispersion; used to probe its necessity.
    pub fn with_omega(mut self, omega: Vec<Cx>) -> Self {
        self.omega = omega;
        self
    }

    pub fn n(&self) -> usize {
        self.kappa.len()
    }

    /// A12 = ((k1-k2)(r1-r2)) / ((k1+k2)(r1+r2)).
    pub fn coupling(&self) -> Cx {
        let (k1, k2) = (self.kappa[0], self.kappa[1]);
        let (r1, r2) = (self.rho[0], self.rho[1]);
        ((k1 - k2) * (r1 - r2)) / ((k1 + k2) * (r1 + r2))
    }

    /// alpha_ij = (rho_i + rho_j) / (rho_i - rho_j); i, j are zero-based.
    pub fn alpha(&self, i: usize, j: usize) -> Cx {
        (self.rho[i] + self.rho[j]) / (self.rho[i] - self.rho[j])
    }
}

/// A super soliton pair: the bilinear tau g and the reconstructed field
/// Phi = xi + theta u obtained from F = -2 ln g via Phi = D_x F.
pub struct SuperSoliton {
    pub g: Superfield,
    pub phi: Superfield,
}

fn truncate_element(e: &GrassmannElement, ord: JetOrder) -> GrassmannElement {
    GrassmannElement::from_terms(
        e.gens().clone(),
        e.terms().map(|(m, j)| (m, j.truncate(ord))).collect(),
    )
}

fn phase_jet(k: Cx, r: Cx, w: Cx, p: Point, ord: JetOrder) -> Jet {
    let x = Jet::var_re(Var::X, p[0], ord);
    let y = Jet::var_re(Var::Y, p[1], ord);
    let t = Jet::var_re(Var::T, p[2], ord);
    x.scale(k).add(&y.scale(r)).add(&t.scale(w))
}

/// Builds g = 1 + e^{phi_1} (N = 1) or the two-soliton expansion with the
/// coupling A12 and the odd dressing zeta1 alpha12 + zeta2 alpha21 (N = 2),
/// with the expansion parameter set to 1. Odd generators are named
/// "zeta1", "zeta2".
pub fn super_soliton(params: SuperSolitonParams) -> Result<SuperSoliton> {
    let n = params.n();
    let gens = if n == 1 {
        GeneratorSet::new(vec!["zeta1"])?
    } else {
        GeneratorSet::new(vec!["zeta1", "zeta2"])?
    };

    let p2 = params.clone();
    let g2 = gens.clone();
    let g_value = move |p: Point, ord: JetOrder| -> Result<SuperValue> {
        let mut theta0 = GrassmannElement::scalar(g2.clone(), Jet::constant_re(1.0, ord));
        let mut theta1 = GrassmannElement::zero(g2.clone());
        for i in 0..n {
            let e = phase_jet(p2.kappa[i], p2.rho[i], p2.omega[i], p, ord).exp();
            // e^{varphi + theta zeta} = e^{varphi} (1 + theta zeta)
            theta0 = theta0.add(&GrassmannElement::scalar(g2.clone(), e.clone()))?;
            theta1 = theta1.add(&GrassmannElement::generator(g2.clone(), i, e))?;
        }
        if n == 2 {
            let a12 = p2.coupling();
            let e12 = phase_jet(
                p2.kappa[0] + p2.kappa[1],
                p2.rho[0] + p2.rho[1],
                p2.omega[0] + p2.omega[1],
                p,
                ord,
            )
            .exp()
            .scale(a12);
            // even prefactor 1 + 2 zeta1 zeta2 / (rho2 - rho1)
            let pref = GrassmannElement::from_terms(
                g2.clone(),
                vec![
                    (0, Jet::constant_re(1.0, ord)),
                    (
                        0b11,
                        Jet::constant(cx(2.0, 0.0) / (p2.rho[1] - p2.rho[0]), ord),
                    ),
                ],
            );
            let odd = GrassmannElement::generator(
                g2.clone(),
                0,
                Jet::constant(p2.alpha(0, 1), ord),
            )
            .add(&GrassmannElement::generator(
                g2.clone(),
                1,
                Jet::constant(p2.alpha(1, 0), ord),
            ))?;
            theta0 = theta0.add(&pref.scale_jet(&e12))?;
            theta1 = theta1.add(&pref.mul(&odd)?.scale_jet(&e12))?;
        }
        SuperValue::new(theta0, theta1)
    };

    let gv = g_value.clone();
    let g_field = Superfield::new(gens.clone(), gv);

    // Phi = D_x(-2 ln g): xi = -2 B A^{-1}, u = -2 (ln A)_x where
    // g = A + theta B (the Grassmann ln carries the zeta1 zeta2 tail).
    let phi_field = Superfield::new(gens, move |p, ord| {
        let ord_in = JetOrder::new(ord.ox + 1, ord.oy, ord.ot);
        let v = g_value(p, ord_in)?;
        let xi = v.theta1.mul(&v.theta0.inv(ord_in)?)?.scale(cx(-2.0, 0.0));
        let u = v.theta0.ln(ord_in)?.deriv(Var::X)?.scale(cx(-2.0, 0.0));
        SuperValue::new(truncate_element(&xi, ord), truncate_element(&u, ord))
    });

    Ok(SuperSoliton { g: g_field, phi: phi_field })
}

// ---------------------------------------------------------------------------
// Superpartners
// ---------------------------------------------------------------------------

/// Data of a superpartner pair (u_{(d1,d2)}, xi = zeta k_{(d1,d2)}(w))
/// built on the traveling-wave profile w = a x + m(y)/a - 4 a^3 t.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize, PartialEq)]
pub struct SuperpartnerParams {
    pub d1: f64,
    pub d2: f64,
    pub a: f64,
    pub alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
    #[serde(default)]
    pub m: NamedFn,
}

impl SuperpartnerParams {
    pub fn validate(&self) -> Result<()> {
        if self.d1 == 0.0 && self.d2 == 0.0 {
            return Err(Error::InvariantViolation("(d1, d2) = (0, 0)".into()));
        }
        if self.a == 0.0 {
            return Err(Error::InvariantViolation("a must be nonzero".into()));
        }
        Ok(())
    }

    fn w_jet(&self, p: Point, ord: JetOrder) -> Jet {
        let x = Jet::var_re(Var::X, p[0], ord);
        let y = Jet::var_re(Var::Y, p[1], ord);
        let t = Jet::var_re(Var::T, p[2], ord);
        let a = cx(self.a, 0.0);
        x.scale(a)
            .add(&self.m.apply(&y).scale(a.inv()))
            .sub(&t.scale(a * a * a * 4.0))
    }

    /// u = -a(1+alpha) + 2a(d1-d2)/(d1-d2+(d1+d2)e^w) - m(y).
    fn u_jet(&self, w: &Jet, my: &Jet) -> Result<Jet> {
        let (d1, d2) = (self.d1, self.d2);
        let num = Jet::constant_re(2.0 * self.a * (d1 - d2), w.order());
        let den = w
            .exp()
            .scale(cx(d1 + d2, 0.0))
            .add(&Jet::constant_re(d1 - d2, w.order()));
        let frac = guarded_div(&num, &den)?;
        Ok(frac
            .add(&Jet::constant_re(-self.a * (1.0 + self.alpha), w.order()))
            .sub(my))
    }

    /// k_{(d1,d2)}(w); half-angle hyperbolics over d1 cosh(w/2) + d2 sinh(w/2).
    fn k_jet(&self, w: &Jet) -> Result<Jet> {
        let (d1, d2) = (self.d1, self.d2);
        let h1 = w.scale(cx(0.5, 0.0));
        let h3 = w.scale(cx(1.5, 0.0));
        let h5 = w.scale(cx(2.5, 0.0));
        let (c1, s1) = (h1.cosh(), h1.sinh());
        let (c3, s3) = (h3.cosh(), h3.sinh());
        let (c5, s5) = (h5.cosh(), h5.sinh());
        let den = c1.scale(cx(d1, 0.0)).add(&s1.scale(cx(d2, 0.0)));
        let q1 = d1 * d1;
        let q2 = d2 * d2;
        let t1 = c1
            .scale(cx(4.0 * d1 * d2 * (11.0 * q1 + q2), 0.0))
            .add(&c3.scale(cx(15.0 * d1 * d2 * (q1 - q2), 0.0)))
            .add(&c5.scale(cx(5.0 * d1 * d2 * (q2 - q1), 0.0)))
            .add(&s1.scale(cx(4.0 * q2 * (11.0 * q1 + q2), 0.0)))
            .add(&s3.scale(cx(-5.0 * (q1 - q2) * (4.0 * q1 - q2), 0.0)))
            .add(&s5.scale(cx(-(q1 - q2) * (4.0 * q1 + q2), 0.0)));
        let t2 = c1
            .scale(cx(4.0 * d1 * (5.0 * q1 - q2) * (q1 + q2), 0.0))
            .add(&c3.scale(cx(5.0 * d1 * (q1 - q2) * (5.0 * q1 - 3.0 * q2), 0.0)))
            .add(&c5.scale(cx(5.0 * d1 * (q1 * q1 - q2 * q2), 0.0)))
            .add(&s1.scale(cx(4.0 * d2 * (5.0 * q1 - q2) * (q1 + q2), 0.0)))
            .add(&s3.scale(cx(5.0 * d2 * (q2 * q2 - q1 * q1), 0.0)))
            .add(&s5.scale(cx(d2 * (q1 - q2) * (9.0 * q1 + q2), 0.0)));
        let sum = t1
            .scale(cx(self.beta1, 0.0))
            .add(&t2.scale(cx(self.beta2, 0.0)));
        Ok(guarded_div(&sum, &den)?.add(&Jet::constant_re(self.beta3, w.order())))
    }
}

/// Builds Phi = xi + theta u with u = u_{(d1,d2)} and xi = zeta k_{(d1,d2)}(w).
/// The odd generator is named "zeta".
pub fn superpartner(params: SuperpartnerParams) -> Result<Superfield> {
    params.validate()?;
    let gens = GeneratorSet::new(vec!["zeta"])?;
    let g2 = gens.clone();
    Ok(Superfield::new(gens, move |p, ord| {
        let w = params.w_jet(p, ord);
        let y = Jet::var_re(Var::Y, p[1], ord);
        let u = params.u_jet(&w, &params.m.apply(&y))?;
        let k = params.k_jet(&w)?;
        SuperValue::new(
            GrassmannElement::generator(g2.clone(), 0, k),
            GrassmannElement::scalar(g2.clone(), u),
        )
    }))
}

/// Residual of psi_ww - (4 - 3(d1^2-d2^2)/(2(d1 cosh(w/2)+d2 sinh(w/2))^2)) psi
/// with psi = d_w k, evaluated at the given w values.
pub fn schroedinger_check(params: &SuperpartnerParams, pts_w: &[f64]) -> ResidualReport {
    let pts: Vec<Point> = pts_w.iter().map(|&w| [w, 0.0, 0.0]).collect();
    let mut rep = ResidualReport::new(EquationId::Schroedinger, &pts);
    let ord = JetOrder::new(3, 0, 0);
    for &w in pts_w {
        let result = (|| -> Result<(f64, f64)> {
            params.validate()?;
            let wj = Jet::var_re(Var::X, w, ord);
            let k = params.k_jet(&wj)?;
            let psi = k.partial(1, 0, 0)?;
            let psi_ww = k.partial(3, 0, 0)?;
            let den = params.d1 * (w / 2.0).cosh() + params.d2 * (w / 2.0).sinh();
            if den.abs() <= GEOM_FLOOR {
                return Err(Error::SingularPoint);
            }
            let well = -3.0 * (params.d1 * params.d1 - params.d2 * params.d2)
                / (2.0 * den * den);
            let terms = [psi_ww, psi * (-4.0), psi * (-well)];
            let total: Cx = terms.iter().sum();
            Ok((total.norm(), terms.iter().map(|t| t.norm()).sum()))
        })();
        match result {
            Ok((abs, sum)) => rep.record(abs, sum),
            Err(_) => rep.skip(),
        }
    }
    rep
}

// ---------------------------------------------------------------------------
// Reduced SUSY system in (z, t)
// ---------------------------------------------------------------------------

pub type ZTEvenField = Arc<dyn Fn(f64, f64, JetOrder) -> Result<Jet> + Send + Sync>;
pub type ZTOddField = Arc<dyn Fn(f64, f64, JetOrder) -> Result<GrassmannElement> + Send + Sync>;

/// Residual of the reduced pair
///   v_zt + v_zzzz - 6 v_z v_zz + 3 chi_z chi_zzz = 0,
///   chi_t + chi_zzz - 3 chi_z v_z = 0
/// sampled at (x, y, t) points with z = x + q(y). The fermionic scaling
/// sqrt(q'(y)) requires q' > 0 on the box; chi is odd.
pub fn susy_kdv_reduction_check(
    chi: &ZTOddField,
    v: &ZTEvenField,
    q: &NamedFn,
    pts: &[Point],
) -> Result<ResidualReport> {
    let mut rep = ResidualReport::new(EquationId::SusyKdvReduction, pts);
    let ord = JetOrder::new(4, 0, 1);
    for &p in pts {
        let qp = q.deriv(p[1]);
        if qp <= 0.0 {
            return Err(Error::NegativeQPrime(qp));
        }
        let z = p[0] + q.eval(p[1]);
        let result = (|| -> Result<(f64, f64)> {
            let vj = v(z, p[2], ord)?;
            let cj = chi(z, p[2], ord)?;
            if !cj.is_zero() && cj.parity()? != 1 {
                return Err(Error::ParityMismatch("chi must be odd".into()));
            }
            let gens = cj.gens().clone();
            let lift = |val: Cx| GrassmannElement::scalar_c(gens.clone(), val);
            let eq1 = [
                lift(vj.partial(1, 0, 1)?),
                lift(vj.partial(4, 0, 0)?),
                lift(vj.partial(1, 0, 0)? * vj.partial(2, 0, 0)? * -6.0),
                cj.partial(1, 0, 0)?
                    .mul(&cj.partial(3, 0, 0)?)?
                    .scale(cx(3.0, 0.0)),
            ];
            let eq2 = [
                cj.partial(0, 0, 1)?,
                cj.partial(3, 0, 0)?,
                cj.partial(1, 0, 0)?
                    .scale(vj.partial(1, 0, 0)? * -3.0),
            ];
            let mut abs = 0.0f64;
            let mut sum = 0.0f64;
            for eq in [&eq1[..], &eq2[..]] {
                let mut total = eq[0].clone();
                for t in &eq[1..] {
                    total = total.add(t)?;
                }
                abs = abs.max(total.max_value_norm());
                sum += eq.iter().map(|t| t.max_value_norm()).sum::<f64>();
            }
            Ok((abs, sum))
        })();
        match result {
            Ok((abs, sum)) => rep.record(abs, sum),
            Err(Error::NegativeQPrime(v)) => return Err(Error::NegativeQPrime(v)),
            Err(_) => rep.skip(),
        }
    }
    Ok(rep)
}
