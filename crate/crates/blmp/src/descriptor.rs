//! Serializable descriptors for the CLI.
//!
//! A descriptor is the JSON form of one solution family plus its
//! parameters. Complex numbers serialize as `[re, im]` pairs; the free
//! functions q(y) and m(y) are referenced by registry name (see
//! [`crate::funcs::NamedFn`]); odd Grassmann generators are referenced by
//! name so component indices in reports stay stable.

use crate::error::{Error, Result};
use crate::funcs::NamedFn;
use crate::jet::Cx;
use crate::solutions::{
    closed_form, n_soliton, rational_similarity, traveling_wave, wronskian_solution,
    ClosedFormName, ClosedFormParams, ReductionSpec, SolitonParams, SolutionField,
    WronskianEntry, WronskianSpec,
};
use crate::superfield::Superfield;
use crate::susy::{super_soliton, superpartner, SuperSoliton, SuperSolitonParams, SuperpartnerParams};
use serde::{Deserialize, Serialize};

fn default_reduction() -> ReductionSpec {
    ReductionSpec::with_q(NamedFn::Identity)
}

fn one_cx() -> Cx {
    Cx::new(1.0, 0.0)
}

fn partner_generator() -> String {
    "zeta".to_string()
}

/// One solution family with everything needed to rebuild it.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SolutionDescriptor {
    RationalSimilarity {
        n: usize,
        #[serde(default = "default_reduction")]
        reduction: ReductionSpec,
    },
    NSoliton {
        kappa: Vec<Cx>,
        #[serde(default = "default_reduction")]
        reduction: ReductionSpec,
    },
    Wronskian {
        entries: Vec<WronskianEntry>,
        #[serde(default = "default_reduction")]
        reduction: ReductionSpec,
    },
    ClosedForm {
        name: ClosedFormName,
        #[serde(default)]
        params: ClosedFormParams,
        #[serde(default = "default_reduction")]
        reduction: ReductionSpec,
    },
    TravelingWave {
        a: Cx,
        #[serde(default)]
        alpha: Cx,
        #[serde(default = "one_cx")]
        c1: Cx,
        #[serde(default = "one_cx")]
        c2: Cx,
        #[serde(default)]
        m: NamedFn,
    },
    SuperSoliton {
        kappa: Vec<Cx>,
        #[serde(default)]
        rho: Option<Vec<Cx>>,
        /// dispersion override; omitted means omega_i = -kappa_i^3
        #[serde(default)]
        omega: Option<Vec<Cx>>,
        /// declaration-order odd generator names
        #[serde(default)]
        generators: Option<Vec<String>>,
    },
    Superpartner {
        #[serde(flatten)]
        params: SuperpartnerParams,
        #[serde(default = "partner_generator")]
        generator: String,
    },
}

/// A descriptor rebuilt into its evaluable form.
pub enum BuiltSolution {
    Classical(SolutionField),
    SuperSoliton(SuperSoliton),
    Superpartner {
        phi: Superfield,
        params: SuperpartnerParams,
    },
}

impl SolutionDescriptor {
    pub fn parse(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::Descriptor(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("descriptor serialization cannot fail")
    }

    pub fn build(&self) -> Result<BuiltSolution> {
        match self {
            SolutionDescriptor::RationalSimilarity { n, reduction } => Ok(
                BuiltSolution::Classical(rational_similarity(*n, reduction.clone())?),
            ),
            SolutionDescriptor::NSoliton { kappa, reduction } => {
                let params = SolitonParams::new(kappa.clone())?;
                Ok(BuiltSolution::Classical(n_soliton(params, reduction.clone())?))
            }
            SolutionDescriptor::Wronskian { entries, reduction } => {
                let spec = WronskianSpec { entries: entries.clone() };
                Ok(BuiltSolution::Classical(wronskian_solution(
                    spec,
                    reduction.clone(),
                )?))
            }
            SolutionDescriptor::ClosedForm { name, params, reduction } => Ok(
                BuiltSolution::Classical(closed_form(
                    name.clone(),
                    params.clone(),
                    reduction.clone(),
                )?),
            ),
            SolutionDescriptor::TravelingWave { a, alpha, c1, c2, m } => Ok(
                BuiltSolution::Classical(traveling_wave(*a, *alpha, *c1, *c2, m.clone())?),
            ),
            SolutionDescriptor::SuperSoliton { kappa, rho, omega, generators } => {
                let rho = rho.clone().unwrap_or_else(|| kappa.clone());
                let mut params = SuperSolitonParams::new(kappa.clone(), rho)?;
                if let Some(omega) = omega {
                    params = params.with_omega(omega.clone());
                }
                let sol = super_soliton(params)?;
                if let Some(names) = generators {
                    let actual = sol.g.gens().names();
                    if names.as_slice() != actual {
                        return Err(Error::Descriptor(format!(
                            "generator names {names:?} do not match the construction's {actual:?}"
                        )));
                    }
                }
                Ok(BuiltSolution::SuperSoliton(sol))
            }
            SolutionDescriptor::Superpartner { params, generator } => {
                let phi = superpartner(params.clone())?;
                let actual = phi.gens().names();
                if std::slice::from_ref(generator) != actual {
                    return Err(Error::Descriptor(format!(
                        "generator name {generator:?} does not match the construction's {actual:?}"
                    )));
                }
                Ok(BuiltSolution::Superpartner {
                    phi,
                    params: params.clone(),
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::cx;

    fn roundtrip(d: &SolutionDescriptor) {
        let json = d.to_json();
        let back = SolutionDescriptor::parse(&json).unwrap();
        assert_eq!(&back, d, "round trip failed for {json}");
        back.build().unwrap();
    }

    #[test]
    fn classical_descriptors_round_trip() {
        roundtrip(&SolutionDescriptor::RationalSimilarity {
            n: 3,
            reduction: default_reduction(),
        });
        roundtrip(&SolutionDescriptor::NSoliton {
            kappa: vec![cx(0.5, 0.0), cx(1.0, 0.0)],
            reduction: ReductionSpec { q: NamedFn::Sin { a: 0.5 }, m: NamedFn::Zero },
        });
        roundtrip(&SolutionDescriptor::ClosedForm {
            name: ClosedFormName::Complexiton,
            params: ClosedFormParams { gamma1: 1.0, alpha: 0.3, beta: 0.4 },
            reduction: default_reduction(),
        });
        roundtrip(&SolutionDescriptor::Wronskian {
            entries: vec![
                WronskianEntry::Rational { c0: 1.0, c1: 0.5 },
                WronskianEntry::Negaton {
                    gamma: 0.5,
                    phase: crate::solutions::HyperPhase::Cosh,
                    deriv: false,
                },
            ],
            reduction: default_reduction(),
        });
        roundtrip(&SolutionDescriptor::TravelingWave {
            a: cx(0.8, 0.0),
            alpha: cx(0.4, 0.0),
            c1: cx(1.0, 0.0),
            c2: cx(1.0, 0.0),
            m: NamedFn::Sin { a: 0.5 },
        });
    }

    #[test]
    fn susy_descriptors_round_trip() {
        roundtrip(&SolutionDescriptor::SuperSoliton {
            kappa: vec![cx(1.0, 0.0), cx(2.0, 0.0)],
            rho: Some(vec![cx(1.0, 0.0), cx(3.0, 0.0)]),
            omega: None,
            generators: Some(vec!["zeta1".into(), "zeta2".into()]),
        });
        roundtrip(&SolutionDescriptor::Superpartner {
            params: SuperpartnerParams {
                d1: 1.0,
                d2: 0.0,
                a: 0.8,
                alpha: 0.4,
                beta1: 0.7,
                beta2: -0.3,
                beta3: 1.1,
                m: NamedFn::Sin { a: 0.5 },
            },
            generator: "zeta".into(),
        });
    }

    #[test]
    fn terse_json_uses_defaults() {
        let d = SolutionDescriptor::parse(
            r#"{"family":"n_soliton","kappa":[[0.5,0.0],[1.0,0.0]]}"#,
        )
        .unwrap();
        match &d {
            SolutionDescriptor::NSoliton { reduction, .. } => {
                assert_eq!(reduction.q, NamedFn::Identity);
                assert_eq!(reduction.m, NamedFn::Zero);
            }
            other => panic!("wrong family {other:?}"),
        }
        d.build().unwrap();
        let p = SolutionDescriptor::parse(
            r#"{"family":"superpartner","d1":2.0,"d2":1.0,"a":1.0,"alpha":0.0,"beta1":1.0,"beta2":0.0,"beta3":0.0}"#,
        )
        .unwrap();
        p.build().unwrap();
    }

    #[test]
    fn parse_errors_are_reported() {
        assert!(matches!(
            SolutionDescriptor::parse("{"),
            Err(Error::Descriptor(_))
        ));
        assert!(matches!(
            SolutionDescriptor::parse(r#"{"family":"unknown_thing"}"#),
            Err(Error::Descriptor(_))
        ));
    }

    #[test]
    fn mismatched_generator_names_rejected() {
        let d = SolutionDescriptor::SuperSoliton {
            kappa: vec![cx(1.0, 0.0)],
            rho: None,
            omega: None,
            generators: Some(vec!["wrong".into()]),
        };
        assert!(matches!(d.build(), Err(Error::Descriptor(_))));
    }

    #[test]
    fn invalid_parameters_surface_from_build() {
        // equal kappas make the soliton coupling singular
        let d = SolutionDescriptor::NSoliton {
            kappa: vec![cx(1.0, 0.0), cx(-1.0, 0.0)],
            reduction: default_reduction(),
        };
        assert!(d.build().is_err());
    }
}
