//! Action factors, modes, elementary prospects and prospect specifications.
//!
//! A factor `A_n` is an action with `M_n` disjoint modes. An elementary
//! prospect picks exactly one mode of every factor and is identified by its
//! multi-index `(j_1, …, j_L)`. Two different elementary prospects multiply to
//! the empty action.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::{QdtError, Result};

/// One disjoint branch `A_{nj}` of an action factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionMode {
    pub factor_index: usize,
    pub mode_index: usize,
    pub label: String,
}

/// An action with one or more disjoint modes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionFactor {
    pub index: usize,
    pub label: String,
    pub modes: Vec<ActionMode>,
}

impl ActionFactor {
    /// Builds a factor from its mode labels. Labels must be unique and there
    /// must be at least one.
    pub fn new<I, S>(index: usize, label: impl Into<String>, mode_labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let label = label.into();
        let mut modes: Vec<ActionMode> = Vec::new();
        for (mode_index, mode_label) in mode_labels.into_iter().enumerate() {
            let mode_label = mode_label.into();
            if modes.iter().any(|m| m.label == mode_label) {
                return Err(QdtError::invalid(
                    format!("factors[{index}].modes[{mode_index}]"),
                    format!("duplicate mode label `{mode_label}` in factor `{label}`"),
                ));
            }
            modes.push(ActionMode {
                factor_index: index,
                mode_index,
                label: mode_label,
            });
        }
        if modes.is_empty() {
            return Err(QdtError::invalid(
                format!("factors[{index}].modes"),
                format!("factor `{label}` has no modes"),
            ));
        }
        Ok(ActionFactor {
            index,
            label,
            modes,
        })
    }

    /// Number of modes `M_n`.
    pub fn dim(&self) -> usize {
        self.modes.len()
    }

    pub fn is_composite(&self) -> bool {
        self.modes.len() > 1
    }

    pub fn mode_index(&self, label: &str) -> Option<usize> {
        self.modes.iter().position(|m| m.label == label)
    }
}

/// Sum of two actions of the same factor: the union of their mode sets.
///
/// Returned indices are sorted and deduplicated.
pub fn action_sum(a: &[usize], b: &[usize]) -> Vec<usize> {
    let set: BTreeSet<usize> = a.iter().chain(b).copied().collect();
    set.into_iter().collect()
}

/// A simple prospect selecting one mode per factor.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementaryProspect(pub Vec<usize>);

impl ElementaryProspect {
    pub fn new(multi_index: impl Into<Vec<usize>>) -> Self {
        ElementaryProspect(multi_index.into())
    }

    pub fn multi_index(&self) -> &[usize] {
        &self.0
    }

    pub fn num_factors(&self) -> usize {
        self.0.len()
    }

    /// Checks the tuple against factor dimensions.
    pub fn check_dims(&self, dims: &[usize]) -> Result<()> {
        if self.0.len() != dims.len() {
            return Err(QdtError::invalid(
                "multi_index",
                format!(
                    "multi-index {:?} has {} entries, expected {}",
                    self.0,
                    self.0.len(),
                    dims.len()
                ),
            ));
        }
        for (k, (&j, &m)) in self.0.iter().zip(dims).enumerate() {
            if j >= m {
                return Err(QdtError::Index(format!(
                    "mode {j} of factor {k} in {:?} exceeds {m} modes",
                    self.0
                )));
            }
        }
        Ok(())
    }
}

/// Result of multiplying two elementary prospects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ActionProduct {
    /// The zero element of the action ring.
    Empty,
    Elementary(ElementaryProspect),
}

/// Product of elementary prospects: idempotent on equal arguments, the empty
/// action otherwise.
pub fn ring_product(a: &ElementaryProspect, b: &ElementaryProspect) -> Result<ActionProduct> {
    if a.num_factors() != b.num_factors() {
        return Err(QdtError::invalid(
            "ring_product",
            format!(
                "operands span {} and {} factors",
                a.num_factors(),
                b.num_factors()
            ),
        ));
    }
    Ok(if a == b {
        ActionProduct::Elementary(a.clone())
    } else {
        ActionProduct::Empty
    })
}

/// All multi-indices over the given factor dimensions, row-major (last factor
/// varies fastest).
pub fn enumerate_dims(dims: &[usize]) -> Result<Vec<ElementaryProspect>> {
    if dims.is_empty() {
        return Err(QdtError::invalid("factors", "at least one factor is required"));
    }
    if let Some(k) = dims.iter().position(|&m| m == 0) {
        return Err(QdtError::invalid(
            format!("factors[{k}].modes"),
            "factor has no modes",
        ));
    }
    let total: usize = dims.iter().product();
    let mut out = Vec::with_capacity(total);
    let mut current = vec![0usize; dims.len()];
    for _ in 0..total {
        out.push(ElementaryProspect(current.clone()));
        for k in (0..dims.len()).rev() {
            current[k] += 1;
            if current[k] < dims[k] {
                break;
            }
            current[k] = 0;
        }
    }
    Ok(out)
}

/// Enumerates the elementary prospects of a list of factors in row-major order.
pub fn enumerate_elementary(factors: &[ActionFactor]) -> Result<Vec<ElementaryProspect>> {
    let dims: Vec<usize> = factors.iter().map(ActionFactor::dim).collect();
    enumerate_dims(&dims)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PayoffSign {
    Gain,
    Loss,
    Neutral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certainty {
    Certain,
    Uncertain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activity {
    Active,
    Passive,
    Neutral,
}

/// Qualitative labels used to check the sign ordering of interference terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProspectAttributes {
    pub payoff_sign: PayoffSign,
    pub certainty: Certainty,
    pub activity: Activity,
}

/// How amplitude keys relate to the declared mode subsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SupportPolicy {
    /// Amplitudes must lie in the Cartesian product of the mode subsets.
    #[default]
    Product,
    /// Any valid multi-index may carry amplitude.
    Free,
}

/// A prospect: a conjunction of (possibly composite) actions together with its
/// amplitudes over the elementary prospects.
#[derive(Debug, Clone, PartialEq)]
pub struct ProspectSpec {
    pub name: String,
    /// Per factor, the sorted mode indices the prospect draws on.
    pub mode_subsets: Vec<Vec<usize>>,
    pub amplitudes: BTreeMap<ElementaryProspect, Complex64>,
    pub attributes: Option<ProspectAttributes>,
    /// Marks the empty prospect, whose state is the vacuum.
    pub empty: bool,
}

impl ProspectSpec {
    pub fn new(
        name: impl Into<String>,
        mode_subsets: Vec<Vec<usize>>,
        amplitudes: impl IntoIterator<Item = (ElementaryProspect, Complex64)>,
    ) -> Self {
        let mode_subsets = mode_subsets
            .into_iter()
            .map(|s| action_sum(&s, &[]))
            .collect();
        ProspectSpec {
            name: name.into(),
            mode_subsets,
            amplitudes: amplitudes.into_iter().collect(),
            attributes: None,
            empty: false,
        }
    }

    /// The empty prospect. It has no support and maps to the vacuum state.
    pub fn empty(name: impl Into<String>) -> Self {
        ProspectSpec {
            name: name.into(),
            mode_subsets: Vec::new(),
            amplitudes: BTreeMap::new(),
            attributes: None,
            empty: true,
        }
    }

    pub fn with_attributes(mut self, attributes: ProspectAttributes) -> Self {
        self.attributes = Some(attributes);
        self
    }
}

/// The Cartesian product of the prospect's mode subsets, after checking that
/// every amplitude key lies inside it.
pub fn prospect_support(
    spec: &ProspectSpec,
    factors: &[ActionFactor],
) -> Result<BTreeSet<ElementaryProspect>> {
    let dims: Vec<usize> = factors.iter().map(ActionFactor::dim).collect();
    support_with_policy(spec, &dims, SupportPolicy::Product)
}

/// Validates a prospect and returns its support set.
///
/// Under [`SupportPolicy::Product`] the support is the product of the mode
/// subsets. Under [`SupportPolicy::Free`] it is the set of amplitude keys.
pub fn support_with_policy(
    spec: &ProspectSpec,
    dims: &[usize],
    policy: SupportPolicy,
) -> Result<BTreeSet<ElementaryProspect>> {
    let violation = |message: String| QdtError::SupportViolation {
        prospect: spec.name.clone(),
        message,
    };

    if spec.empty {
        if !spec.amplitudes.is_empty() {
            return Err(violation("the empty prospect cannot carry amplitudes".into()));
        }
        return Ok(BTreeSet::new());
    }

    if spec.mode_subsets.len() != dims.len() {
        return Err(QdtError::invalid(
            format!("prospects.{}.modes", spec.name),
            format!(
                "{} mode subsets given for {} factors",
                spec.mode_subsets.len(),
                dims.len()
            ),
        ));
    }
    for (k, (subset, &m)) in spec.mode_subsets.iter().zip(dims).enumerate() {
        if subset.is_empty() {
            return Err(QdtError::invalid(
                format!("prospects.{}.modes[{k}]", spec.name),
                "mode subset is empty",
            ));
        }
        if let Some(&j) = subset.iter().find(|&&j| j >= m) {
            return Err(QdtError::Index(format!(
                "prospect `{}` selects mode {j} of factor {k}, which has {m} modes",
                spec.name
            )));
        }
    }
    for key in spec.amplitudes.keys() {
        key.check_dims(dims)?;
    }

    match policy {
        SupportPolicy::Free => Ok(spec.amplitudes.keys().cloned().collect()),
        SupportPolicy::Product => {
            let sub_dims: Vec<usize> = spec.mode_subsets.iter().map(Vec::len).collect();
            let support: BTreeSet<ElementaryProspect> = enumerate_dims(&sub_dims)?
                .into_iter()
                .map(|local| {
                    ElementaryProspect(
                        local
                            .0
                            .iter()
                            .zip(&spec.mode_subsets)
                            .map(|(&i, subset)| subset[i])
                            .collect(),
                    )
                })
                .collect();
            if let Some(bad) = spec.amplitudes.keys().find(|k| !support.contains(*k)) {
                return Err(violation(format!(
                    "amplitude on {:?} lies outside the declared mode subsets",
                    bad.0
                )));
            }
            Ok(support)
        }
    }
}

/// True when at least one factor contributes more than one mode.
pub fn is_composite(spec: &ProspectSpec) -> bool {
    spec.mode_subsets.iter().any(|s| s.len() > 1)
}
