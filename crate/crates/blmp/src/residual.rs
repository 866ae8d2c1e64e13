//! Substitution-based verification: every governing equation evaluated on
//! candidate solutions at low-discrepancy sample points, reporting scaled
//! residuals.
//!
//! The relative residual is normalized by the sum of term magnitudes, not
//! by the field scale; the equation terms span orders of magnitude near
//! soliton cores.

use crate::error::Result;
use crate::funcs::NamedFn;
use crate::hirota::{hirota_apply, super_hirota_apply, HirotaOrder};
use crate::jet::{cx, Cx, JetOrder};
use crate::solutions::SolutionField;
use crate::superfield::{Point, Superfield, SuperValue};
use serde::Serialize;

/// Term-magnitude sums below this make a point trivially satisfied.
pub const TERM_FLOOR: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EquationId {
    Blmp,
    KdvReduction,
    KdvEq4,
    GeneralEq6,
    SusySbili,
    SusySbilimod,
    SusyComponents,
    SusyKdvReduction,
    Schroedinger,
    BacklundSystem,
    BacklundProposition,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualReport {
    pub equation: EquationId,
    pub points: Vec<Point>,
    pub max_abs: f64,
    pub max_rel: f64,
    pub skipped: usize,
    pub evaluated: usize,
}

impl ResidualReport {
    pub fn new(equation: EquationId, points: &[Point]) -> Self {
        ResidualReport {
            equation,
            points: points.to_vec(),
            max_abs: 0.0,
            max_rel: 0.0,
            skipped: 0,
            evaluated: 0,
        }
    }

    pub fn record(&mut self, abs: f64, term_sum: f64) {
        self.evaluated += 1;
        self.max_abs = self.max_abs.max(abs);
        if term_sum > TERM_FLOOR {
            self.max_rel = self.max_rel.max(abs / term_sum);
        }
    }

    pub fn skip(&mut self) {
        self.skipped += 1;
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_rel <= tol
    }
}

// ---------------------------------------------------------------------------
// Sample points
// ---------------------------------------------------------------------------

fn radical_inverse(mut i: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Halton points (bases 2, 3, 5) over a box; the seed offsets the sequence
/// start, so the set is deterministic per seed.
pub fn sample_points(seed: u64, n: usize, lo: Point, hi: Point) -> Vec<Point> {
    let start = (seed as usize % 4096) + 1;
    (0..n)
        .map(|k| {
            let i = start + k;
            let u = [
                radical_inverse(i, 2),
                radical_inverse(i, 3),
                radical_inverse(i, 5),
            ];
            [
                lo[0] + (hi[0] - lo[0]) * u[0],
                lo[1] + (hi[1] - lo[1]) * u[1],
                lo[2] + (hi[2] - lo[2]) * u[2],
            ]
        })
        .collect()
}

pub const DEFAULT_BOX: (Point, Point) = ([-3.0, -3.0, -3.0], [3.0, 3.0, 3.0]);

pub fn default_points(seed: u64, n: usize) -> Vec<Point> {
    sample_points(seed, n, DEFAULT_BOX.0, DEFAULT_BOX.1)
}

fn magnitudes(terms: &[Cx]) -> (f64, f64) {
    let total: Cx = terms.iter().sum();
    let sum: f64 = terms.iter().map(|t| t.norm()).sum();
    (total.norm(), sum)
}

// ---------------------------------------------------------------------------
// Governing equations
// ---------------------------------------------------------------------------

/// u_yt + u_xxxy - 3 u_x u_xy - 3 u_y u_xx at each point.
pub fn residual_blmp(u: &SolutionField, pts: &[Point]) -> ResidualReport {
    let ord = JetOrder::new(3, 1, 1);
    let mut rep = ResidualReport::new(EquationId::Blmp, pts);
    for &p in pts {
        let terms = (|| -> Result<[Cx; 4]> {
            let uj = u.eval_u(p, ord)?;
            Ok([
                uj.partial(0, 1, 1)?,
                uj.partial(3, 1, 0)?,
                -3.0 * uj.partial(1, 0, 0)? * uj.partial(1, 1, 0)?,
                -3.0 * uj.partial(0, 1, 0)? * uj.partial(2, 0, 0)?,
            ])
        })();
        match terms {
            Ok(t) => {
                let (abs, sum) = magnitudes(&t);
                rep.record(abs, sum);
            }
            Err(_) => rep.skip(),
        }
    }
    rep
}

/// p_zt + p_zzzz - 6 p_z p_zz in the reduced variables; points supply
/// (z, t) through their first and last components.
pub fn residual_kdv_reduction(f: &SolutionField, pts: &[Point]) -> ResidualReport {
    let ord = JetOrder::new(4, 0, 1);
    let mut rep = ResidualReport::new(EquationId::KdvReduction, pts);
    for &p in pts {
        let terms = (|| -> Result<[Cx; 3]> {
            let pj = f.eval_u_z(p[0], p[2], ord)?;
            Ok([
                pj.partial(1, 0, 1)?,
                pj.partial(4, 0, 0)?,
                -6.0 * pj.partial(1, 0, 0)? * pj.partial(2, 0, 0)?,
            ])
        })();
        match terms {
            Ok(t) => {
                let (abs, sum) = magnitudes(&t);
                rep.record(abs, sum);
            }
            Err(_) => rep.skip(),
        }
    }
    rep
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BilinearForm {
    KdvEq4,
    GeneralEq6,
    SusySbili,
    SusySbilimod,
}

pub enum BilinearInput<'a> {
    Tau(&'a SolutionField),
    Super(&'a Superfield),
}

/// Evaluates the named bilinear form. `aux` carries m(y) for the general
/// classical form and c(y) (the theta component of Lambda) for the
/// modified super form; it is ignored elsewhere.
pub fn residual_bilinear(
    form: BilinearForm,
    input: &BilinearInput,
    aux: &NamedFn,
    pts: &[Point],
) -> ResidualReport {
    match (form, input) {
        (BilinearForm::KdvEq4, BilinearInput::Tau(f)) => {
            let ord = JetOrder::new(4, 0, 1);
            let mut rep = ResidualReport::new(EquationId::KdvEq4, pts);
            for &p in pts {
                let terms = (|| -> Result<[Cx; 2]> {
                    let tau = f.eval_tau_z(p[0], p[2], ord)?;
                    Ok([
                        hirota_apply(&HirotaOrder::classical(1, 0, 1), &tau, &tau)?,
                        hirota_apply(&HirotaOrder::classical(4, 0, 0), &tau, &tau)?,
                    ])
                })();
                match terms {
                    Ok(t) => {
                        let (abs, sum) = magnitudes(&t);
                        rep.record(abs, sum);
                    }
                    Err(_) => rep.skip(),
                }
            }
            rep
        }
        (BilinearForm::GeneralEq6, BilinearInput::Tau(f)) => {
            let ord = JetOrder::new(3, 1, 1);
            let mut rep = ResidualReport::new(EquationId::GeneralEq6, pts);
            for &p in pts {
                let terms = (|| -> Result<[Cx; 3]> {
                    let tau = f.eval_tau(p, ord)?;
                    let mp = aux.deriv(p[1]);
                    Ok([
                        hirota_apply(&HirotaOrder::classical(0, 1, 1), &tau, &tau)?,
                        hirota_apply(&HirotaOrder::classical(3, 1, 0), &tau, &tau)?,
                        cx(3.0 * mp, 0.0)
                            * hirota_apply(&HirotaOrder::classical(2, 0, 0), &tau, &tau)?,
                    ])
                })();
                match terms {
                    Ok(t) => {
                        let (abs, sum) = magnitudes(&t);
                        rep.record(abs, sum);
                    }
                    Err(_) => rep.skip(),
                }
            }
            rep
        }
        (BilinearForm::SusySbili, BilinearInput::Super(g)) => {
            let mut rep = ResidualReport::new(EquationId::SusySbili, pts);
            super_bilinear_loop(&mut rep, g, aux, false, pts);
            rep
        }
        (BilinearForm::SusySbilimod, BilinearInput::Super(g)) => {
            let mut rep = ResidualReport::new(EquationId::SusySbilimod, pts);
            super_bilinear_loop(&mut rep, g, aux, true, pts);
            rep
        }
        _ => {
            let mut rep = ResidualReport::new(
                match form {
                    BilinearForm::KdvEq4 => EquationId::KdvEq4,
                    BilinearForm::GeneralEq6 => EquationId::GeneralEq6,
                    BilinearForm::SusySbili => EquationId::SusySbili,
                    BilinearForm::SusySbilimod => EquationId::SusySbilimod,
                },
                pts,
            );
            // mismatched input kind: every point is unevaluable
            rep.skipped = pts.len();
            rep
        }
    }
}

fn super_bilinear_loop(
    rep: &mut ResidualReport,
    g: &Superfield,
    c: &NamedFn,
    with_lambda: bool,
    pts: &[Point],
) {
    let ord = JetOrder::new(3, 1, 1);
    for &p in pts {
        let terms = (|| -> Result<Vec<SuperValue>> {
            let gv = g.eval(p, ord)?;
            let mut out = vec![
                super_hirota_apply(&HirotaOrder::classical(0, 0, 1).with_super(0, 1), &gv, &gv)?,
                super_hirota_apply(&HirotaOrder::classical(3, 0, 0).with_super(0, 1), &gv, &gv)?,
            ];
            if with_lambda {
                // D_y D_x Lambda = theta c'(y)
                let gens = g.gens().clone();
                let lam = SuperValue::new(
                    crate::grassmann::GrassmannElement::zero(gens.clone()),
                    crate::grassmann::GrassmannElement::scalar_c(gens, cx(c.deriv(p[1]), 0.0)),
                )?;
                let dx2 =
                    super_hirota_apply(&HirotaOrder::classical(2, 0, 0), &gv, &gv)?;
                out.push(lam.mul(&dx2)?.scale(cx(-3.0, 0.0)));
            }
            Ok(out)
        })();
        let summed = terms.and_then(|ts| -> Result<(f64, f64)> {
            let mut total = ts[0].clone();
            for t in &ts[1..] {
                total = total.add(t)?;
            }
            let sum: f64 = ts.iter().map(SuperValue::max_value_norm).sum();
            Ok((total.max_value_norm(), sum))
        });
        match summed {
            Ok((abs, sum)) => rep.record(abs, sum),
            Err(_) => rep.skip(),
        }
    }
}

/// Both component equations of the fermionic superfield Phi = xi + theta u:
/// u_yt + u_xxxy - 3 u_xx u_y - 3 u_x u_xy + 3 xi_x xi_xxx and
/// xi_yt + xi_xxxy - 3 u_xy xi_x - 3 u_x xi_xy, per Grassmann component.
pub fn residual_susy_components(phi: &Superfield, pts: &[Point]) -> ResidualReport {
    let ord = JetOrder::new(3, 1, 1);
    let mut rep = ResidualReport::new(EquationId::SusyComponents, pts);
    for &p in pts {
        let result = (|| -> Result<(f64, f64)> {
            let v = phi.eval(p, ord)?;
            let xi = &v.theta0;
            let u = &v.theta1;
            let eq1 = [
                u.partial(0, 1, 1)?,
                u.partial(3, 1, 0)?,
                u.partial(2, 0, 0)?.mul(&u.partial(0, 1, 0)?)?.scale(cx(-3.0, 0.0)),
                u.partial(1, 0, 0)?.mul(&u.partial(1, 1, 0)?)?.scale(cx(-3.0, 0.0)),
                xi.partial(1, 0, 0)?.mul(&xi.partial(3, 0, 0)?)?.scale(cx(3.0, 0.0)),
            ];
            let eq2 = [
                xi.partial(0, 1, 1)?,
                xi.partial(3, 1, 0)?,
                u.partial(1, 1, 0)?.mul(&xi.partial(1, 0, 0)?)?.scale(cx(-3.0, 0.0)),
                u.partial(1, 0, 0)?.mul(&xi.partial(1, 1, 0)?)?.scale(cx(-3.0, 0.0)),
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
            Err(_) => rep.skip(),
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcs::NamedFn;
    use crate::grassmann::{GeneratorSet, GrassmannElement};
    use crate::jet::{Jet, Var};
    use crate::solutions::{
        closed_form, kink, n_soliton, rational_similarity, traveling_wave, wronskian_solution,
        ClosedFormName, ClosedFormParams, ReductionSpec, SolitonParams, WronskianEntry,
        WronskianSpec, HyperPhase,
    };

    fn red_id() -> ReductionSpec {
        ReductionSpec::with_q(NamedFn::Identity)
    }

    #[test]
    fn halton_points_deterministic_and_in_box() {
        let a = default_points(7, 50);
        let b = default_points(7, 50);
        assert_eq!(a, b);
        for p in &a {
            for c in p {
                assert!((-3.0..=3.0).contains(c));
            }
        }
        assert_ne!(default_points(8, 50)[0], a[0]);
    }

    #[test]
    fn constant_field_residual_is_zero() {
        let f = SolutionField::custom("const", NamedFn::Zero, |_, ord| {
            Ok(Jet::constant_re(4.2, ord))
        });
        let rep = residual_blmp(&f, &default_points(1, 20));
        assert_eq!(rep.max_abs, 0.0);
        assert_eq!(rep.skipped, 0);
    }

    #[test]
    fn xy_is_not_a_solution() {
        // u = x*y: residual is -3y pointwise
        let f = SolutionField::custom("xy", NamedFn::Zero, |p, ord| {
            let x = Jet::var_re(Var::X, p[0], ord);
            let y = Jet::var_re(Var::Y, p[1], ord);
            Ok(x.mul(&y))
        });
        let pts = [[1.0, 2.0, 0.0], [0.5, -1.5, 1.0]];
        let rep = residual_blmp(&f, &pts);
        assert!((rep.max_abs - 6.0).abs() < 1e-13); // -3y at y = 2
        assert!(rep.max_rel > 0.5);
    }

    #[test]
    fn kink_passes_blmp() {
        let f = kink(cx(1.0, 0.0), NamedFn::Zero).unwrap();
        let rep = residual_blmp(&f, &default_points(3, 100));
        assert!(rep.max_rel <= 1e-9, "max_rel {}", rep.max_rel);
        assert!(rep.evaluated >= 95);
    }

    #[test]
    fn traveling_wave_with_m_passes_blmp() {
        let f = traveling_wave(
            cx(0.8, 0.0),
            cx(0.3, 0.0),
            cx(1.0, 0.0),
            cx(0.5, 0.0),
            NamedFn::Sin { a: 1.0 },
        )
        .unwrap();
        let rep = residual_blmp(&f, &default_points(4, 100));
        assert!(rep.max_rel <= 1e-9, "max_rel {}", rep.max_rel);
    }

    #[test]
    fn soliton_families_pass_blmp() {
        let pts = default_points(5, 100);
        for kappa in [vec![cx(0.9, 0.0)], vec![cx(0.5, 0.0), cx(1.0, 0.0)]] {
            let f = n_soliton(SolitonParams::new(kappa).unwrap(), red_id()).unwrap();
            let rep = residual_blmp(&f, &pts);
            assert!(rep.max_rel <= 1e-9, "max_rel {}", rep.max_rel);
            assert!(rep.evaluated >= 90);
        }
    }

    #[test]
    fn rational_similarity_passes_blmp_and_reduction() {
        let pts = default_points(6, 100);
        for n in [2usize, 3] {
            let f = rational_similarity(n, red_id()).unwrap();
            let rep = residual_blmp(&f, &pts);
            assert!(rep.max_rel <= 1e-9, "n={n} max_rel {}", rep.max_rel);
            let rep2 = residual_kdv_reduction(&f, &pts);
            assert!(rep2.max_rel <= 1e-9, "n={n} kdv max_rel {}", rep2.max_rel);
        }
    }

    #[test]
    fn one_soliton_kdv_reduction() {
        // p = -2 d_z log(1 + e^{z-t})
        let f = n_soliton(SolitonParams::new(vec![cx(1.0, 0.0)]).unwrap(), red_id()).unwrap();
        let rep = residual_kdv_reduction(&f, &default_points(2, 50));
        assert!(rep.max_rel <= 1e-9, "max_rel {}", rep.max_rel);
    }

    #[test]
    fn closed_forms_pass_blmp() {
        let pts = default_points(9, 100);
        // gamma close to 1 pushes the far-field terms below f64 noise
        // relative to the O(1) scale of u; keep the phases moderate.
        let params = ClosedFormParams { gamma1: 0.5, alpha: 0.3, beta: 0.4 };
        for name in [
            ClosedFormName::Negaton2,
            ClosedFormName::Positon2,
            ClosedFormName::Complexiton,
            ClosedFormName::RationalSoliton,
            ClosedFormName::RationalPositon,
        ] {
            let f = closed_form(name.clone(), params.clone(), red_id()).unwrap();
            let rep = residual_blmp(&f, &pts);
            assert!(rep.max_rel <= 1e-9, "{name:?} max_rel {}", rep.max_rel);
            assert!(rep.evaluated >= 80, "{name:?} evaluated {}", rep.evaluated);
        }
    }

    #[test]
    fn wronskian_negaton_passes_blmp() {
        let spec = WronskianSpec {
            entries: vec![
                WronskianEntry::Negaton { gamma: 0.5, phase: HyperPhase::Cosh, deriv: false },
                WronskianEntry::Negaton { gamma: 0.5, phase: HyperPhase::Cosh, deriv: true },
            ],
        };
        let f = wronskian_solution(spec, red_id()).unwrap();
        let rep = residual_blmp(&f, &default_points(10, 100));
        assert!(rep.max_rel <= 1e-9, "max_rel {}", rep.max_rel);
    }

    #[test]
    fn soliton_tau_satisfies_kdv_bilinear() {
        let f = n_soliton(
            SolitonParams::new(vec![cx(0.5, 0.0), cx(1.0, 0.0)]).unwrap(),
            red_id(),
        )
        .unwrap();
        let rep = residual_bilinear(
            BilinearForm::KdvEq4,
            &BilinearInput::Tau(&f),
            &NamedFn::Zero,
            &default_points(11, 100),
        );
        assert!(rep.max_rel <= 1e-10, "max_rel {}", rep.max_rel);
    }

    #[test]
    fn vacuum_tau_is_exactly_bilinear() {
        let f = n_soliton(SolitonParams::new(vec![]).unwrap(), red_id()).unwrap();
        for form in [BilinearForm::KdvEq4, BilinearForm::GeneralEq6] {
            let rep = residual_bilinear(
                form,
                &BilinearInput::Tau(&f),
                &NamedFn::Zero,
                &default_points(12, 20),
            );
            assert_eq!(rep.max_abs, 0.0);
        }
    }

    #[test]
    fn traveling_wave_tau_satisfies_general_bilinear() {
        let m = NamedFn::Poly { coeffs: vec![0.2, 0.7, -0.1] };
        let f = traveling_wave(cx(0.9, 0.0), cx(0.4, 0.0), cx(1.0, 0.0), cx(0.6, 0.0), m.clone())
            .unwrap();
        let rep = residual_bilinear(
            BilinearForm::GeneralEq6,
            &BilinearInput::Tau(&f),
            &m,
            &default_points(13, 100),
        );
        assert!(rep.max_rel <= 1e-9, "max_rel {}", rep.max_rel);
    }

    fn super_one_soliton(gens: &std::sync::Arc<GeneratorSet>, kappa: f64, rho: f64, omega: f64) -> Superfield {
        let g2 = gens.clone();
        Superfield::new(gens.clone(), move |p, ord| {
            let x = Jet::var_re(Var::X, p[0], ord);
            let y = Jet::var_re(Var::Y, p[1], ord);
            let t = Jet::var_re(Var::T, p[2], ord);
            let body = x
                .scale(cx(kappa, 0.0))
                .add(&y.scale(cx(rho, 0.0)))
                .add(&t.scale(cx(omega, 0.0)))
                .exp();
            let one = Jet::constant_re(1.0, ord);
            Ok(SuperValue {
                theta0: GrassmannElement::scalar(g2.clone(), one.add(&body)),
                theta1: GrassmannElement::generator(g2.clone(), 0, body),
            })
        })
    }

    #[test]
    fn super_soliton_passes_sbili_and_dispersion_is_necessary() {
        let gens = GeneratorSet::new(vec!["zeta1"]).unwrap();
        let kappa = 0.8;
        let g = super_one_soliton(&gens, kappa, 0.5, -kappa * kappa * kappa);
        let pts = default_points(14, 50);
        let rep = residual_bilinear(
            BilinearForm::SusySbili,
            &BilinearInput::Super(&g),
            &NamedFn::Zero,
            &pts,
        );
        assert!(rep.max_rel <= 1e-10, "max_rel {}", rep.max_rel);

        let bad = super_one_soliton(&gens, kappa, 0.5, -kappa * kappa * kappa + 0.1);
        let rep = residual_bilinear(
            BilinearForm::SusySbili,
            &BilinearInput::Super(&bad),
            &NamedFn::Zero,
            &pts,
        );
        assert!(rep.max_rel > 1e-3, "max_rel {}", rep.max_rel);
    }

    #[test]
    fn fermionic_limit_matches_classical_path() {
        let f = kink(cx(1.1, 0.0), NamedFn::Sin { a: 0.5 }).unwrap();
        let gens = GeneratorSet::new(vec!["zeta1"]).unwrap();
        let f2 = f.clone();
        let phi = Superfield::from_classical_even(gens, move |p, ord| f2.eval_u(p, ord));
        let pts = default_points(15, 50);
        let a = residual_blmp(&f, &pts);
        let b = residual_susy_components(&phi, &pts);
        assert!((a.max_rel - b.max_rel).abs() <= 1e-13);
        assert!((a.max_abs - b.max_abs).abs() <= 1e-13);
    }

    #[test]
    fn report_serializes() {
        let f = kink(cx(1.0, 0.0), NamedFn::Zero).unwrap();
        let rep = residual_blmp(&f, &default_points(16, 5));
        let s = serde_json::to_string(&rep).unwrap();
        assert!(s.contains("\"equation\":\"blmp\""));
        assert!(s.contains("max_rel"));
    }
}
