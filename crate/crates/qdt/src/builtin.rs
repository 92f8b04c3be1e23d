//! Built-in scenarios usable through the `demo:<name>` prefix.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use qdt_core::algebra::{
    Activity, ActionFactor, Certainty, ElementaryProspect, PayoffSign, ProspectAttributes,
    ProspectSpec,
};
use qdt_core::hilbert::{build_product_state, normalize, MindSpace, StateVector};

use crate::error::{Result, ScenarioError};
use crate::format::{Scenario, ScenarioOptions};

pub const BUILTIN_NAMES: [&str; 3] = ["h2", "disjunction", "register"];

/// Free parameters of the built-in templates.
#[derive(Debug, Clone, PartialEq)]
pub struct BuiltinParams {
    /// Relative phase between the two branches of the disjunction prospects.
    pub phase: f64,
    /// Per-site mode amplitudes of the register state of mind.
    pub sites: [[Complex64; 2]; 2],
}

impl Default for BuiltinParams {
    fn default() -> Self {
        BuiltinParams {
            phase: 0.0,
            sites: [
                [Complex64::new(0.8, 0.0), Complex64::new(0.6, 0.0)],
                [Complex64::new(0.6, 0.0), Complex64::new(0.8, 0.0)],
            ],
        }
    }
}

/// Looks up a built-in by name with default parameters.
pub fn builtin_scenario(name: &str) -> Result<Scenario> {
    builtin_with(name, &BuiltinParams::default())
}

pub fn builtin_with(name: &str, params: &BuiltinParams) -> Result<Scenario> {
    match name {
        "h2" => Ok(h2()),
        "disjunction" => Ok(disjunction(params.phase)),
        "register" => register(&params.sites),
        other => Err(ScenarioError::Usage(format!(
            "unknown built-in `{other}` (expected one of {})",
            BUILTIN_NAMES.join(", ")
        ))),
    }
}

fn factor(index: usize, label: &str, modes: &[&str]) -> ActionFactor {
    ActionFactor::new(index, label, modes.iter().copied()).expect("built-in factors are valid")
}

fn ep(ix: &[usize]) -> ElementaryProspect {
    ElementaryProspect::new(ix.to_vec())
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Two prospects on a single two-mode action, `(1, ±1)/√2`, with the state of
/// mind `(1, 1)/√2`. The amplitude matrix is unitary.
pub fn h2() -> Scenario {
    let h = re(FRAC_1_SQRT_2);
    Scenario {
        factors: vec![factor(0, "A", &["a0", "a1"])],
        prospects: vec![
            ProspectSpec::new("pi1", vec![vec![0, 1]], [(ep(&[0]), h), (ep(&[1]), h)]),
            ProspectSpec::new("pi2", vec![vec![0, 1]], [(ep(&[0]), h), (ep(&[1]), -h)]),
        ],
        state_of_mind: vec![(ep(&[0]), h), (ep(&[1]), h)],
        options: ScenarioOptions {
            unitary_strict: true,
            ..ScenarioOptions::default()
        },
    }
}

/// Acting or not acting while an uncertain event may or may not occur.
///
/// Each prospect spreads over both event modes with unit-modulus amplitudes;
/// `phase` rotates the second branch. The state of mind is uniform, so
/// `p(act) = (1 − cos φ)/2`, `p(pass) = (1 + cos φ)/2` and
/// `q(act) = −q(pass) = −cos φ / 2`.
pub fn disjunction(phase: f64) -> Scenario {
    let rot = Complex64::from_polar(1.0, phase);
    let attrs = |activity| ProspectAttributes {
        payoff_sign: PayoffSign::Neutral,
        certainty: Certainty::Uncertain,
        activity,
    };
    let half = re(0.5);
    Scenario {
        factors: vec![
            factor(0, "event", &["occurs", "absent"]),
            factor(1, "action", &["act", "pass"]),
        ],
        prospects: vec![
            ProspectSpec::new("act", vec![vec![0, 1], vec![0]], [(ep(&[0, 0]), re(1.0)), (ep(&[1, 0]), -rot)])
                .with_attributes(attrs(Activity::Active)),
            ProspectSpec::new("pass", vec![vec![0, 1], vec![1]], [(ep(&[0, 1]), re(1.0)), (ep(&[1, 1]), rot)])
                .with_attributes(attrs(Activity::Passive)),
        ],
        state_of_mind: vec![
            (ep(&[0, 0]), half),
            (ep(&[0, 1]), half),
            (ep(&[1, 0]), half),
            (ep(&[1, 1]), half),
        ],
        options: ScenarioOptions::default(),
    }
}

/// A two-site, two-mode register. The state of mind is the product of the
/// per-site mode superpositions (each normalized); the prospects are the four
/// maximally entangled Bell combinations plus the empty prospect.
pub fn register(sites: &[[Complex64; 2]; 2]) -> Result<Scenario> {
    let space = MindSpace::from_dims(&[2, 2])?;
    let per_site = sites
        .iter()
        .map(|s| Ok(normalize(&StateVector::new(s.to_vec())?)?.amplitudes().to_vec()))
        .collect::<Result<Vec<_>>>()?;
    let psi = build_product_state(&per_site, &space)?;
    let state_of_mind = space
        .basis()
        .iter()
        .zip(psi.amplitudes())
        .filter(|(_, a)| a.norm_sqr() > 0.0)
        .map(|(e, a)| (e.clone(), *a))
        .collect();

    let h = re(FRAC_1_SQRT_2);
    let bell = |name: &str, first: [usize; 2], second: [usize; 2], sign: f64| {
        ProspectSpec::new(
            name,
            vec![vec![0, 1], vec![0, 1]],
            [(ep(&first), h), (ep(&second), h * sign)],
        )
    };
    Ok(Scenario {
        factors: vec![factor(0, "site0", &["m0", "m1"]), factor(1, "site1", &["m0", "m1"])],
        prospects: vec![
            bell("phi_plus", [0, 0], [1, 1], 1.0),
            bell("phi_minus", [0, 0], [1, 1], -1.0),
            bell("psi_plus", [0, 1], [1, 0], 1.0),
            bell("psi_minus", [0, 1], [1, 0], -1.0),
            ProspectSpec::empty("vacuum"),
        ],
        state_of_mind,
        options: ScenarioOptions {
            unitary_strict: true,
            ..ScenarioOptions::default()
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_name_is_a_usage_error() {
        assert!(matches!(builtin_scenario("allais"), Err(ScenarioError::Usage(_))));
        for name in BUILTIN_NAMES {
            builtin_scenario(name).unwrap();
        }
    }

    #[test]
    fn one_hot_register_state_is_a_basis_vector() {
        let one = re(1.0);
        let zero = re(0.0);
        let s = register(&[[zero, one], [one, zero]]).unwrap();
        assert_eq!(s.state_of_mind, vec![(ep(&[1, 0]), one)]);
    }
}
