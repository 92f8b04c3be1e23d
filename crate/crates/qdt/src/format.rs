//! The scenario JSON document.
//!
//! ```json
//! {
//!   "factors": [{ "label": "A", "modes": ["a0", "a1"] }],
//!   "prospects": [
//!     { "name": "pi1", "modes": [["a0", "a1"]],
//!       "amplitudes": [{ "at": ["a0"], "value": [0.7071067811865476, 0.0] },
//!                      { "at": ["a1"], "value": [0.7071067811865476, 0.0] }] },
//!     { "name": "none", "empty": true }
//!   ],
//!   "state_of_mind": [{ "at": ["a0"], "value": [1.0, 0.0] }],
//!   "options": { "normalization": "strict", "tolerance": 1e-10 }
//! }
//! ```
//!
//! Modes are referenced by label. Amplitudes are `[re, im]` pairs. Unknown keys
//! are rejected. The schema is in `schema/scenario.schema.json`.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use qdt_core::algebra::{
    support_with_policy, Activity, ActionFactor, Certainty, ElementaryProspect, PayoffSign,
    ProspectAttributes, ProspectSpec, SupportPolicy,
};
use qdt_core::hilbert::{build_prospect_state_with, MindSpace, StateOfMind, StateVector};
use qdt_core::measure::{NormalizationMode, NormalizationPolicy};
use qdt_core::{QdtError, VALIDATION_TOLERANCE};
use serde::{Deserialize, Serialize};

use crate::error::{Result, ScenarioError};

/// Largest mind-space dimension a scenario may declare.
pub const MAX_DIMENSION: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioOptions {
    pub normalization: NormalizationMode,
    pub tolerance: f64,
    /// Require pairwise-orthonormal amplitude columns in strict mode.
    pub unitary_strict: bool,
    pub allow_free_support: bool,
    pub oracle: bool,
    pub seed: Option<u64>,
}

impl Default for ScenarioOptions {
    fn default() -> Self {
        ScenarioOptions {
            normalization: NormalizationMode::Strict,
            tolerance: VALIDATION_TOLERANCE,
            unitary_strict: false,
            allow_free_support: false,
            oracle: false,
            seed: None,
        }
    }
}

/// A validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub factors: Vec<ActionFactor>,
    pub prospects: Vec<ProspectSpec>,
    /// Nonzero entries of ψ; missing basis elements are zero.
    pub state_of_mind: Vec<(ElementaryProspect, Complex64)>,
    pub options: ScenarioOptions,
}

impl Scenario {
    pub fn space(&self) -> Result<MindSpace> {
        Ok(MindSpace::new(&self.factors)?)
    }

    pub fn support_policy(&self) -> SupportPolicy {
        if self.options.allow_free_support {
            SupportPolicy::Free
        } else {
            SupportPolicy::Product
        }
    }

    pub fn policy(&self) -> Result<NormalizationPolicy> {
        let mut policy = NormalizationPolicy::new(self.options.normalization, self.options.tolerance)?;
        policy.unitary_strict = self.options.unitary_strict;
        Ok(policy)
    }

    pub fn prospect_states(&self) -> Result<Vec<StateVector>> {
        let space = self.space()?;
        self.prospects
            .iter()
            .map(|p| Ok(build_prospect_state_with(p, &space, self.support_policy())?))
            .collect()
    }

    /// The dense ψ vector, unvalidated.
    pub fn psi_vector(&self) -> Result<StateVector> {
        let space = self.space()?;
        let mut amps = vec![Complex64::new(0.0, 0.0); space.dimension()];
        for (e, a) in &self.state_of_mind {
            amps[space.basis_index(e)?] = *a;
        }
        Ok(StateVector::new(amps)?)
    }

    /// ψ, checked for unit norm against the scenario tolerance.
    pub fn psi(&self) -> Result<StateOfMind> {
        let v = self.psi_vector()?;
        Ok(StateOfMind::new(v.amplitudes().to_vec(), self.options.tolerance)?)
    }

    /// Serializes to the JSON document, pretty-printed.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_document())
            .expect("scenario documents always serialize");
        s.push('\n');
        s
    }

    fn labels(&self, e: &ElementaryProspect) -> Vec<String> {
        e.0.iter()
            .zip(&self.factors)
            .map(|(&j, f)| f.modes[j].label.clone())
            .collect()
    }

    fn to_document(&self) -> ScenarioDoc {
        let entry = |e: &ElementaryProspect, a: &Complex64| AmplitudeDoc {
            at: self.labels(e),
            value: [a.re, a.im],
        };
        ScenarioDoc {
            factors: self
                .factors
                .iter()
                .map(|f| FactorDoc {
                    label: f.label.clone(),
                    modes: f.modes.iter().map(|m| m.label.clone()).collect(),
                })
                .collect(),
            prospects: self
                .prospects
                .iter()
                .map(|p| ProspectDoc {
                    name: p.name.clone(),
                    empty: p.empty,
                    modes: p
                        .mode_subsets
                        .iter()
                        .zip(&self.factors)
                        .map(|(subset, f)| subset.iter().map(|&j| f.modes[j].label.clone()).collect())
                        .collect(),
                    amplitudes: p.amplitudes.iter().map(|(e, a)| entry(e, a)).collect(),
                    attributes: p.attributes.map(AttributesDoc::from),
                })
                .collect(),
            state_of_mind: self.state_of_mind.iter().map(|(e, a)| entry(e, a)).collect(),
            options: OptionsDoc {
                normalization: self.options.normalization.as_str().to_string(),
                tolerance: self.options.tolerance,
                unitary_strict: self.options.unitary_strict,
                allow_free_support: self.options.allow_free_support,
                oracle: self.options.oracle,
                seed: self.options.seed,
            },
        }
    }
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    factors: Vec<FactorDoc>,
    prospects: Vec<ProspectDoc>,
    state_of_mind: Vec<AmplitudeDoc>,
    #[serde(default)]
    options: OptionsDoc,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FactorDoc {
    label: String,
    modes: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProspectDoc {
    name: String,
    #[serde(default, skip_serializing_if = "is_false")]
    empty: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    modes: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    amplitudes: Vec<AmplitudeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    attributes: Option<AttributesDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AmplitudeDoc {
    at: Vec<String>,
    value: [f64; 2],
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OptionsDoc {
    #[serde(default = "default_normalization")]
    normalization: String,
    #[serde(default = "default_tolerance")]
    tolerance: f64,
    #[serde(default)]
    unitary_strict: bool,
    #[serde(default)]
    allow_free_support: bool,
    #[serde(default)]
    oracle: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

fn default_normalization() -> String {
    "strict".into()
}

fn default_tolerance() -> f64 {
    VALIDATION_TOLERANCE
}

impl Default for OptionsDoc {
    fn default() -> Self {
        OptionsDoc {
            normalization: default_normalization(),
            tolerance: default_tolerance(),
            unitary_strict: false,
            allow_free_support: false,
            oracle: false,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum PayoffDoc {
    Gain,
    Loss,
    Neutral,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum CertaintyDoc {
    Certain,
    Uncertain,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ActivityDoc {
    Active,
    Passive,
    Neutral,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AttributesDoc {
    payoff: PayoffDoc,
    certainty: CertaintyDoc,
    activity: ActivityDoc,
}

impl From<ProspectAttributes> for AttributesDoc {
    fn from(a: ProspectAttributes) -> Self {
        AttributesDoc {
            payoff: match a.payoff_sign {
                PayoffSign::Gain => PayoffDoc::Gain,
                PayoffSign::Loss => PayoffDoc::Loss,
                PayoffSign::Neutral => PayoffDoc::Neutral,
            },
            certainty: match a.certainty {
                Certainty::Certain => CertaintyDoc::Certain,
                Certainty::Uncertain => CertaintyDoc::Uncertain,
            },
            activity: match a.activity {
                Activity::Active => ActivityDoc::Active,
                Activity::Passive => ActivityDoc::Passive,
                Activity::Neutral => ActivityDoc::Neutral,
            },
        }
    }
}

impl From<AttributesDoc> for ProspectAttributes {
    fn from(a: AttributesDoc) -> Self {
        ProspectAttributes {
            payoff_sign: match a.payoff {
                PayoffDoc::Gain => PayoffSign::Gain,
                PayoffDoc::Loss => PayoffSign::Loss,
                PayoffDoc::Neutral => PayoffSign::Neutral,
            },
            certainty: match a.certainty {
                CertaintyDoc::Certain => Certainty::Certain,
                CertaintyDoc::Uncertain => Certainty::Uncertain,
            },
            activity: match a.activity {
                ActivityDoc::Active => Activity::Active,
                ActivityDoc::Passive => Activity::Passive,
                ActivityDoc::Neutral => Activity::Neutral,
            },
        }
    }
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> ScenarioError {
    QdtError::invalid(path, message).into()
}

fn resolve_mode(factor: &ActionFactor, label: &str, path: &str) -> Result<usize> {
    factor.mode_index(label).ok_or_else(|| {
        invalid(
            path,
            format!("unknown mode `{label}` for factor `{}`", factor.label),
        )
    })
}

fn resolve_entry(factors: &[ActionFactor], doc: &AmplitudeDoc, path: &str) -> Result<(ElementaryProspect, Complex64)> {
    if doc.at.len() != factors.len() {
        return Err(invalid(
            format!("{path}.at"),
            format!("{} mode labels given for {} factors", doc.at.len(), factors.len()),
        ));
    }
    let index = doc
        .at
        .iter()
        .zip(factors)
        .enumerate()
        .map(|(k, (label, f))| resolve_mode(f, label, &format!("{path}.at[{k}]")))
        .collect::<Result<Vec<_>>>()?;
    let [re, im] = doc.value;
    Ok((ElementaryProspect(index), Complex64::new(re, im)))
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &[u8]) -> Result<Scenario> {
    let doc: ScenarioDoc = serde_json::from_slice(text)?;
    from_document(doc)
}

fn from_document(doc: ScenarioDoc) -> Result<Scenario> {
    if doc.factors.is_empty() {
        return Err(invalid("factors", "at least one factor is required"));
    }
    let mut factors = Vec::with_capacity(doc.factors.len());
    let mut factor_labels = BTreeSet::new();
    for (i, f) in doc.factors.into_iter().enumerate() {
        if !factor_labels.insert(f.label.clone()) {
            return Err(invalid(format!("factors[{i}].label"), format!("duplicate factor `{}`", f.label)));
        }
        factors.push(ActionFactor::new(i, f.label, f.modes)?);
    }
    factors
        .iter()
        .try_fold(1usize, |acc, f| acc.checked_mul(f.dim()))
        .filter(|&d| d <= MAX_DIMENSION)
        .ok_or_else(|| invalid("factors", format!("mind space exceeds {MAX_DIMENSION} dimensions")))?;

    let options = parse_options(doc.options)?;
    let support_policy = if options.allow_free_support {
        SupportPolicy::Free
    } else {
        SupportPolicy::Product
    };
    let dims: Vec<usize> = factors.iter().map(ActionFactor::dim).collect();

    let mut names = BTreeSet::new();
    let mut prospects = Vec::with_capacity(doc.prospects.len());
    for (n, p) in doc.prospects.into_iter().enumerate() {
        let path = format!("prospects[{n}]");
        if !names.insert(p.name.clone()) {
            return Err(invalid(format!("{path}.name"), format!("duplicate prospect `{}`", p.name)));
        }
        let spec = if p.empty {
            if !p.modes.is_empty() || !p.amplitudes.is_empty() {
                return Err(invalid(path, "the empty prospect takes no modes or amplitudes"));
            }
            ProspectSpec::empty(p.name)
        } else {
            if p.modes.len() != factors.len() {
                return Err(invalid(
                    format!("{path}.modes"),
                    format!("{} mode subsets given for {} factors", p.modes.len(), factors.len()),
                ));
            }
            let mut subsets = Vec::with_capacity(factors.len());
            for (k, (labels, f)) in p.modes.iter().zip(&factors).enumerate() {
                let mut subset = Vec::with_capacity(labels.len());
                for (m, label) in labels.iter().enumerate() {
                    let j = resolve_mode(f, label, &format!("{path}.modes[{k}][{m}]"))?;
                    if subset.contains(&j) {
                        return Err(invalid(
                            format!("{path}.modes[{k}][{m}]"),
                            format!("mode `{label}` listed twice"),
                        ));
                    }
                    subset.push(j);
                }
                subsets.push(subset);
            }
            let mut amplitudes = BTreeMap::new();
            for (a, entry) in p.amplitudes.iter().enumerate() {
                let entry_path = format!("{path}.amplitudes[{a}]");
                let (e, value) = resolve_entry(&factors, entry, &entry_path)?;
                if amplitudes.insert(e, value).is_some() {
                    return Err(invalid(entry_path, "duplicate amplitude entry"));
                }
            }
            ProspectSpec::new(p.name, subsets, amplitudes)
        };
        let spec = match p.attributes {
            Some(a) => spec.with_attributes(a.into()),
            None => spec,
        };
        support_with_policy(&spec, &dims, support_policy)?;
        prospects.push(spec);
    }

    let mut seen = BTreeSet::new();
    let mut state_of_mind = Vec::with_capacity(doc.state_of_mind.len());
    for (a, entry) in doc.state_of_mind.iter().enumerate() {
        let path = format!("state_of_mind[{a}]");
        let (e, value) = resolve_entry(&factors, entry, &path)?;
        if !seen.insert(e.clone()) {
            return Err(invalid(path, "duplicate amplitude entry"));
        }
        state_of_mind.push((e, value));
    }
    if state_of_mind.iter().all(|(_, a)| a.norm_sqr() == 0.0) {
        return Err(invalid("state_of_mind", "the state of mind is the zero vector"));
    }

    Ok(Scenario {
        factors,
        prospects,
        state_of_mind,
        options,
    })
}

fn parse_options(doc: OptionsDoc) -> Result<ScenarioOptions> {
    let normalization: NormalizationMode = doc.normalization.parse()?;
    NormalizationPolicy::new(normalization, doc.tolerance)?;
    Ok(ScenarioOptions {
        normalization,
        tolerance: doc.tolerance,
        unitary_strict: doc.unitary_strict,
        allow_free_support: doc.allow_free_support,
        oracle: doc.oracle,
        seed: doc.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "factors": [{"label": "A", "modes": ["only"]}],
        "prospects": [{"name": "p", "modes": [["only"]],
                       "amplitudes": [{"at": ["only"], "value": [1.0, 0.0]}]}],
        "state_of_mind": [{"at": ["only"], "value": [1.0, 0.0]}]
    }"#;

    #[test]
    fn minimal_document() {
        let s = parse_scenario(MINIMAL.as_bytes()).unwrap();
        assert_eq!(s.space().unwrap().dimension(), 1);
        assert_eq!(s.options, ScenarioOptions::default());
        assert_eq!(parse_scenario(s.to_json().as_bytes()).unwrap(), s);
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_scenario(b"{\n  \"factors\": [,]\n}") {
            Err(ScenarioError::Parse { line, column, .. }) => {
                assert_eq!(line, 2);
                assert!(column > 0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = MINIMAL.replacen("\"factors\"", "\"colour\": 1, \"factors\"", 1);
        assert!(matches!(parse_scenario(text.as_bytes()), Err(ScenarioError::Parse { .. })));
    }

    #[test]
    fn bad_mode_label_names_the_field() {
        let text = MINIMAL.replacen("\"at\": [\"only\"], \"value\": [1.0, 0.0]}]}]", "\"at\": [\"nope\"], \"value\": [1.0, 0.0]}]}]", 1);
        match parse_scenario(text.as_bytes()) {
            Err(ScenarioError::Core(QdtError::InvalidScenario { path, .. })) => {
                assert_eq!(path, "prospects[0].amplitudes[0].at[0]");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zero_state_of_mind_is_rejected() {
        let text = MINIMAL.replace(
            "\"state_of_mind\": [{\"at\": [\"only\"], \"value\": [1.0, 0.0]}]",
            "\"state_of_mind\": [{\"at\": [\"only\"], \"value\": [0.0, 0.0]}]",
        );
        match parse_scenario(text.as_bytes()) {
            Err(ScenarioError::Core(QdtError::InvalidScenario { path, .. })) => assert_eq!(path, "state_of_mind"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zero_amplitude_prospect_has_zero_probability() {
        let text = r#"{
            "factors": [{"label": "A", "modes": ["a0", "a1"]}],
            "prospects": [{"name": "silent", "modes": [["a0", "a1"]],
                           "amplitudes": [{"at": ["a1"], "value": [0.0, 0.0]}]},
                          {"name": "bare", "modes": [["a0"]]}],
            "state_of_mind": [{"at": ["a0"], "value": [0.6, 0.0]}, {"at": ["a1"], "value": [0.8, 0.0]}],
            "options": {"normalization": "given"}
        }"#;
        let s = parse_scenario(text.as_bytes()).unwrap();
        let state = qdt_core::measure::evaluate(&s.prospect_states().unwrap(), &s.psi().unwrap(), s.policy().unwrap())
            .unwrap();
        for row in &state.prospects {
            assert_eq!((row.p_raw, row.q), (0.0, 0.0));
        }
    }

    #[test]
    fn amplitude_outside_subset_is_a_support_violation() {
        let text = r#"{
            "factors": [{"label": "A", "modes": ["a0", "a1"]}],
            "prospects": [{"name": "leaky", "modes": [["a0"]],
                           "amplitudes": [{"at": ["a1"], "value": [1.0, 0.0]}]}],
            "state_of_mind": [{"at": ["a0"], "value": [1.0, 0.0]}]
        }"#;
        match parse_scenario(text.as_bytes()) {
            Err(ScenarioError::Core(QdtError::SupportViolation { prospect, .. })) => assert_eq!(prospect, "leaky"),
            other => panic!("unexpected {other:?}"),
        }
        let free = text.replace("\"state_of_mind\"", "\"options\": {\"allow_free_support\": true}, \"state_of_mind\"");
        assert!(parse_scenario(free.as_bytes()).is_ok());
    }

    #[test]
    fn duplicates_are_rejected() {
        let dup_factor = r#"{"factors": [{"label": "A", "modes": ["x"]}, {"label": "A", "modes": ["y"]}],
            "prospects": [], "state_of_mind": [{"at": ["x", "y"], "value": [1, 0]}]}"#;
        assert!(parse_scenario(dup_factor.as_bytes()).is_err());
        let dup_prospect = MINIMAL.replace(
            "\"prospects\": [",
            "\"prospects\": [{\"name\": \"p\", \"empty\": true}, ",
        );
        assert!(parse_scenario(dup_prospect.as_bytes()).is_err());
    }

    #[test]
    fn bad_options_are_rejected() {
        let text = MINIMAL.replace("\"state_of_mind\"", "\"options\": {\"normalization\": \"loose\"}, \"state_of_mind\"");
        assert!(matches!(
            parse_scenario(text.as_bytes()),
            Err(ScenarioError::Core(QdtError::InvalidScenario { .. }))
        ));
        let text = MINIMAL.replace("\"state_of_mind\"", "\"options\": {\"tolerance\": -1}, \"state_of_mind\"");
        assert!(parse_scenario(text.as_bytes()).is_err());
    }
}
