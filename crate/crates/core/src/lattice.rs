//! Ordering prospects by probability and checking attraction/repulsion.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::algebra::{Activity, Certainty, PayoffSign, ProspectAttributes, ProspectSpec};
use crate::measure::ProbabilisticState;
use crate::{QdtError, Result, IDENTITY_TOLERANCE};

/// Prospects of a scenario in declaration order.
#[derive(Debug, Clone, PartialEq)]
pub struct ProspectLattice {
    pub prospects: Vec<ProspectSpec>,
    /// Index of the declared empty prospect, if any.
    pub minimal: Option<usize>,
    /// Index of the optimal prospect once computed.
    pub maximal: Option<usize>,
}

impl ProspectLattice {
    pub fn new(prospects: Vec<ProspectSpec>) -> Self {
        let minimal = prospects.iter().position(|p| p.empty);
        ProspectLattice {
            prospects,
            minimal,
            maximal: None,
        }
    }

    pub fn name(&self, index: usize) -> Option<&str> {
        self.prospects.get(index).map(|p| p.name.as_str())
    }

    /// Computes and records the optimal prospect.
    pub fn resolve_maximal(&mut self, state: &ProbabilisticState, tie_epsilon: f64) -> Result<Optimum> {
        let opt = optimal_prospect(self, state, tie_epsilon)?;
        self.maximal = Some(opt.index);
        Ok(opt)
    }

    /// Largest amount by which any prospect falls below the empty prospect or
    /// exceeds the optimal one. Zero when the bounds hold.
    pub fn bound_violation(&self, state: &ProbabilisticState) -> Result<f64> {
        let mut worst: f64 = 0.0;
        let low = match self.minimal {
            Some(i) => Some(state.ordering_probability(i)?),
            None => None,
        };
        let high = match self.maximal {
            Some(i) => Some(state.ordering_probability(i)?),
            None => None,
        };
        for i in 0..self.prospects.len() {
            let p = state.ordering_probability(i)?;
            if let Some(low) = low {
                worst = worst.max(low - p);
            }
            if let Some(high) = high {
                worst = worst.max(p - high);
            }
        }
        Ok(worst)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Less,
    Equal,
    Greater,
}

/// Outcome of comparing two prospects.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderingRelation {
    pub relation: Relation,
    /// `p(π1) − p(π2)` in the ordering field.
    pub p_gap: f64,
    /// `q(π1) − q(π2)`.
    pub q_gap: f64,
}

/// Compares two evaluated prospects by the state's ordering probability.
pub fn compare(
    first: usize,
    second: usize,
    state: &ProbabilisticState,
    tie_epsilon: f64,
) -> Result<OrderingRelation> {
    let p_gap = state.ordering_probability(first)? - state.ordering_probability(second)?;
    let q_gap = state.get(first)?.q - state.get(second)?.q;
    let relation = if p_gap.abs() <= tie_epsilon {
        Relation::Equal
    } else if p_gap > 0.0 {
        Relation::Greater
    } else {
        Relation::Less
    };
    Ok(OrderingRelation {
        relation,
        p_gap,
        q_gap,
    })
}

/// The optimal prospect.
#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub index: usize,
    pub name: String,
    /// Other prospects within the tie threshold of the maximum.
    pub tied_with: Vec<usize>,
}

impl Optimum {
    pub fn is_tie(&self) -> bool {
        !self.tied_with.is_empty()
    }
}

/// The prospect with the largest probability. Prospects within `tie_epsilon`
/// of the maximum are tied; the lowest declaration index wins.
pub fn optimal_prospect(
    lattice: &ProspectLattice,
    state: &ProbabilisticState,
    tie_epsilon: f64,
) -> Result<Optimum> {
    if lattice.prospects.is_empty() {
        return Err(QdtError::invalid("prospects", "the lattice has no prospects"));
    }
    let probs = (0..lattice.prospects.len())
        .map(|i| state.ordering_probability(i))
        .collect::<Result<Vec<f64>>>()?;
    let max = probs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut candidates = probs
        .iter()
        .enumerate()
        .filter(|(_, &p)| max - p <= tie_epsilon)
        .map(|(i, _)| i);
    let index = candidates.next().expect("the maximum is attained");
    Ok(Optimum {
        index,
        name: lattice.prospects[index].name.clone(),
        tied_with: candidates.collect(),
    })
}

/// Prospect indices sorted by descending probability. Runs of prospects whose
/// neighbouring gaps are within `tie_epsilon` keep declaration order.
pub fn ranking(state: &ProbabilisticState, tie_epsilon: f64) -> Result<Vec<usize>> {
    let probs = (0..state.len())
        .map(|i| state.ordering_probability(i))
        .collect::<Result<Vec<f64>>>()?;
    let mut order: Vec<usize> = (0..probs.len()).collect();
    order.sort_by(|&a, &b| probs[b].total_cmp(&probs[a]).then(a.cmp(&b)));
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && probs[order[end - 1]] - probs[order[end]] <= tie_epsilon {
            end += 1;
        }
        order[start..end].sort_unstable();
        start = end;
    }
    Ok(order)
}

/// `Σ_α [p(π1 e_α) − p(π2 e_α)] > q(π2) − q(π1)`.
///
/// The direct comparison `p(π1) > p(π2)` is evaluated too. If the two
/// disagree while the probabilities are separated by more than the identity
/// tolerance, the decomposition is broken and an error is returned.
pub fn preference_criterion(
    first: usize,
    second: usize,
    state: &ProbabilisticState,
) -> Result<bool> {
    let a = state.get(first)?;
    let b = state.get(second)?;
    let diag_gap: f64 = a
        .conjunction
        .iter()
        .zip(&b.conjunction)
        .map(|(x, y)| x - y)
        .sum();
    let criterion = diag_gap > b.q - a.q;
    let direct = a.p_raw > b.p_raw;
    if criterion != direct && (a.p_raw - b.p_raw).abs() > IDENTITY_TOLERANCE {
        return Err(QdtError::Numerical(format!(
            "preference criterion ({criterion}) disagrees with p comparison ({direct}) for prospects {first} and {second}"
        )));
    }
    Ok(criterion)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Attraction {
    MoreRepulsive,
    Equal,
    LessRepulsive,
}

/// Attraction ordering of two interference terms.
pub fn attraction_compare(q1: f64, q2: f64, tie_epsilon: f64) -> Attraction {
    if (q1 - q2).abs() <= tie_epsilon {
        Attraction::Equal
    } else if q1 < q2 {
        Attraction::MoreRepulsive
    } else {
        Attraction::LessRepulsive
    }
}

/// Why one prospect is expected to be more repulsive than another.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepulsionReason {
    UncertainGain,
    CertainLoss,
    ActiveUnderUncertainty,
    PassiveUnderCertainty,
}

impl RepulsionReason {
    pub fn as_str(self) -> &'static str {
        match self {
            RepulsionReason::UncertainGain => "more uncertain gain",
            RepulsionReason::CertainLoss => "more certain loss",
            RepulsionReason::ActiveUnderUncertainty => "more active under uncertainty",
            RepulsionReason::PassiveUnderCertainty => "more passive under certainty",
        }
    }
}

/// Reasons for which `a` is declared more repulsive than `b`.
pub fn repulsion_reasons(a: &ProspectAttributes, b: &ProspectAttributes) -> Vec<RepulsionReason> {
    let mut out = Vec::new();
    if a.payoff_sign == PayoffSign::Gain
        && b.payoff_sign == PayoffSign::Gain
        && a.certainty == Certainty::Uncertain
        && b.certainty == Certainty::Certain
    {
        out.push(RepulsionReason::UncertainGain);
    }
    if a.payoff_sign == PayoffSign::Loss
        && b.payoff_sign == PayoffSign::Loss
        && a.certainty == Certainty::Certain
        && b.certainty == Certainty::Uncertain
    {
        out.push(RepulsionReason::CertainLoss);
    }
    if a.certainty == b.certainty && a.activity != b.activity {
        match (a.certainty, a.activity, b.activity) {
            (Certainty::Uncertain, Activity::Active, Activity::Passive) => {
                out.push(RepulsionReason::ActiveUnderUncertainty)
            }
            (Certainty::Certain, Activity::Passive, Activity::Active) => {
                out.push(RepulsionReason::PassiveUnderCertainty)
            }
            _ => {}
        }
    }
    out
}

/// One attribute-implied constraint `q(π_i) < q(π_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AttractionCheck {
    pub more_repulsive: usize,
    pub less_repulsive: usize,
    pub reasons: Vec<RepulsionReason>,
    pub q_gap: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkippedPair {
    pub first: usize,
    pub second: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AttractionReport {
    pub checks: Vec<AttractionCheck>,
    pub skipped: Vec<SkippedPair>,
}

impl AttractionReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Checks that declared attributes agree with the signs of interference gaps.
///
/// Pairs where neither prospect is declared more repulsive emit nothing. Pairs
/// with missing attributes, or whose attributes point both ways, are skipped
/// and listed.
pub fn check_attraction_consistency(
    lattice: &ProspectLattice,
    state: &ProbabilisticState,
    tie_epsilon: f64,
) -> Result<AttractionReport> {
    let mut report = AttractionReport::default();
    let n = lattice.prospects.len();
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (&lattice.prospects[i], &lattice.prospects[j]);
            let (Some(attr_a), Some(attr_b)) = (a.attributes, b.attributes) else {
                if a.attributes.is_some() || b.attributes.is_some() {
                    report.skipped.push(SkippedPair {
                        first: i,
                        second: j,
                        reason: "missing attributes".into(),
                    });
                }
                continue;
            };
            let forward = repulsion_reasons(&attr_a, &attr_b);
            let backward = repulsion_reasons(&attr_b, &attr_a);
            let (more, less, reasons) = match (forward.is_empty(), backward.is_empty()) {
                (true, true) => continue,
                (false, true) => (i, j, forward),
                (true, false) => (j, i, backward),
                (false, false) => {
                    report.skipped.push(SkippedPair {
                        first: i,
                        second: j,
                        reason: "attributes rank the pair both ways".into(),
                    });
                    continue;
                }
            };
            let q_more = state.get(more)?.q;
            let q_less = state.get(less)?.q;
            report.checks.push(AttractionCheck {
                more_repulsive: more,
                less_repulsive: less,
                reasons,
                q_gap: q_more - q_less,
                passed: attraction_compare(q_more, q_less, tie_epsilon) == Attraction::MoreRepulsive,
            });
        }
    }
    Ok(report)
}
