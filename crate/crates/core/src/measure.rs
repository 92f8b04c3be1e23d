//! Prospect probabilities, conjunction probabilities and interference terms.
//!
//! Write `b_α = ⟨e_α|π⟩` for the prospect amplitudes and `c_α = ⟨e_α|ψ⟩` for
//! the state of mind. Then
//!
//! ```text
//! p(π)      = |Σ_α b_α* c_α|²
//! p(π e_α)  = |b_α|² |c_α|²
//! q(π)      = Σ_{α≠β} c_α* b_α b_β* c_β
//! ```
//!
//! and `p(π) = Σ_α p(π e_α) + q(π)` holds identically. The three quantities
//! are computed by separate sums so that identity stays a real check.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use alloc::format;

use num_complex::Complex64;

use crate::hilbert::{inner, AmplitudeMatrix, StateOfMind, StateVector};
use crate::{QdtError, Result, IDENTITY_TOLERANCE, VALIDATION_TOLERANCE};

/// Which normalization conditions are enforced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormalizationMode {
    /// `Σ_n p(π_n) = 1` and unit column norms must hold for the given ψ.
    #[default]
    Strict,
    /// Residuals are reported, never enforced.
    Given,
    /// Probabilities are divided by their sum; raw and normalized are kept.
    Renorm,
}

impl NormalizationMode {
    pub fn as_str(self) -> &'static str {
        match self {
            NormalizationMode::Strict => "strict",
            NormalizationMode::Given => "given",
            NormalizationMode::Renorm => "renorm",
        }
    }
}

impl core::str::FromStr for NormalizationMode {
    type Err = QdtError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(NormalizationMode::Strict),
            "given" => Ok(NormalizationMode::Given),
            "renorm" => Ok(NormalizationMode::Renorm),
            other => Err(QdtError::invalid(
                "options.normalization",
                format!("unknown normalization `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationPolicy {
    pub mode: NormalizationMode,
    pub tolerance: f64,
    /// Also require pairwise-orthonormal amplitude columns (strict mode only).
    pub unitary_strict: bool,
}

impl NormalizationPolicy {
    pub fn new(mode: NormalizationMode, tolerance: f64) -> Result<Self> {
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(QdtError::invalid(
                "options.tolerance",
                format!("tolerance must be positive, got {tolerance}"),
            ));
        }
        Ok(NormalizationPolicy {
            mode,
            tolerance,
            unitary_strict: false,
        })
    }

    pub fn strict() -> Self {
        NormalizationPolicy {
            mode: NormalizationMode::Strict,
            tolerance: VALIDATION_TOLERANCE,
            unitary_strict: false,
        }
    }

    pub fn given() -> Self {
        NormalizationPolicy {
            mode: NormalizationMode::Given,
            ..Self::strict()
        }
    }

    pub fn renorm() -> Self {
        NormalizationPolicy {
            mode: NormalizationMode::Renorm,
            ..Self::strict()
        }
    }
}

impl Default for NormalizationPolicy {
    fn default() -> Self {
        Self::strict()
    }
}

/// Probability field used to order prospects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbabilityField {
    Raw,
    Normalized,
}

impl ProbabilityField {
    pub fn as_str(self) -> &'static str {
        match self {
            ProbabilityField::Raw => "p_raw",
            ProbabilityField::Normalized => "p_normalized",
        }
    }
}

/// Everything computed for one prospect.
#[derive(Debug, Clone, PartialEq)]
pub struct ProspectProbabilities {
    pub p_raw: f64,
    /// `Σ_α p(π e_α)`.
    pub diag_sum: f64,
    pub q: f64,
    pub p_normalized: Option<f64>,
    /// `p(π e_α)` for every basis index α.
    pub conjunction: Vec<f64>,
}

impl ProspectProbabilities {
    pub fn decomposition_residual(&self) -> f64 {
        (self.p_raw - self.diag_sum - self.q).abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub sum_p: f64,
    pub sum_q: f64,
    /// `Σ_{n,α} p(π_n e_α)`.
    pub sum_conjunction: f64,
    pub column_norm_max_dev: f64,
    pub gram_max_dev: f64,
    pub prop1_max_residual: f64,
}

/// The probabilities of every prospect in a scenario, with diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilisticState {
    pub prospects: Vec<ProspectProbabilities>,
    pub diagnostics: Diagnostics,
    pub policy: NormalizationPolicy,
}

impl ProbabilisticState {
    pub fn len(&self) -> usize {
        self.prospects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prospects.is_empty()
    }

    pub fn get(&self, index: usize) -> Result<&ProspectProbabilities> {
        self.prospects.get(index).ok_or_else(|| {
            QdtError::State(format!(
                "prospect {index} has not been evaluated ({} evaluated)",
                self.prospects.len()
            ))
        })
    }

    pub fn ordering_field(&self) -> ProbabilityField {
        match self.policy.mode {
            NormalizationMode::Renorm => ProbabilityField::Normalized,
            _ => ProbabilityField::Raw,
        }
    }

    /// The probability that orders the lattice.
    pub fn ordering_probability(&self, index: usize) -> Result<f64> {
        let pr = self.get(index)?;
        Ok(match self.ordering_field() {
            ProbabilityField::Normalized => pr.p_normalized.unwrap_or(pr.p_raw),
            ProbabilityField::Raw => pr.p_raw,
        })
    }

    /// Named residuals of the normalization conditions.
    pub fn residuals(&self) -> Vec<(String, f64)> {
        let d = &self.diagnostics;
        let mut out = vec![
            ("sum_p".into(), (d.sum_p - 1.0).abs()),
            ("column_norm_max_dev".into(), d.column_norm_max_dev),
        ];
        if self.policy.unitary_strict {
            out.push(("gram_max_dev".into(), d.gram_max_dev));
        }
        out
    }

    /// Enforces the policy; only strict mode can fail.
    pub fn check(&self) -> Result<()> {
        if self.policy.mode != NormalizationMode::Strict {
            return Ok(());
        }
        let residuals = self.residuals();
        if residuals.iter().any(|(_, r)| r.is_nan() || *r > self.policy.tolerance) {
            return Err(QdtError::Normalization {
                tolerance: self.policy.tolerance,
                residuals,
            });
        }
        Ok(())
    }
}

fn check_dims(state: &StateVector, psi: &StateOfMind) -> Result<()> {
    if state.dimension() != psi.dimension() {
        return Err(QdtError::Dimension {
            expected: psi.dimension(),
            found: state.dimension(),
        });
    }
    Ok(())
}

/// `|⟨π|ψ⟩|²`.
pub fn prospect_probability(prospect: &StateVector, psi: &StateOfMind) -> Result<f64> {
    check_dims(prospect, psi)?;
    Ok(inner(prospect, psi.as_state())?.norm_sqr())
}

/// `|b_{nα}|² |c_α|²`.
pub fn conjunction_probability(b: Complex64, c: Complex64) -> f64 {
    b.norm_sqr() * c.norm_sqr()
}

/// The off-diagonal double sum `Σ_{α≠β} c_α* b_α b_β* c_β`.
///
/// Fails with [`QdtError::Numerical`] if the imaginary part does not cancel.
pub fn interference_term(prospect: &StateVector, psi: &StateOfMind) -> Result<f64> {
    check_dims(prospect, psi)?;
    let b = prospect.amplitudes();
    let c = psi.amplitudes();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut magnitude = 0.0;
    for alpha in 0..b.len() {
        let left = c[alpha].conj() * b[alpha];
        if left.norm_sqr() == 0.0 {
            continue;
        }
        for beta in 0..b.len() {
            if alpha == beta {
                continue;
            }
            let term = left * b[beta].conj() * c[beta];
            magnitude += term.norm();
            sum += term;
        }
    }
    if sum.im.abs() > VALIDATION_TOLERANCE * (1.0 + magnitude) {
        return Err(QdtError::Numerical(format!(
            "interference term has imaginary residue {:e}",
            sum.im
        )));
    }
    Ok(sum.re)
}

/// A prospect probability split into its diagonal and interference parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decomposition {
    pub p: f64,
    pub diag_sum: f64,
    pub q: f64,
}

impl Decomposition {
    pub fn residual(&self) -> f64 {
        (self.p - self.diag_sum - self.q).abs()
    }
}

pub fn decompose(prospect: &StateVector, psi: &StateOfMind) -> Result<Decomposition> {
    let p = prospect_probability(prospect, psi)?;
    let q = interference_term(prospect, psi)?;
    let diag_sum = prospect
        .amplitudes()
        .iter()
        .zip(psi.amplitudes())
        .map(|(b, c)| conjunction_probability(*b, *c))
        .sum();
    Ok(Decomposition { p, diag_sum, q })
}

/// Computes every field of the probabilistic state without enforcing the
/// policy (apart from renormalization, which needs `Σ p > 0`).
pub fn evaluate(
    prospects: &[StateVector],
    psi: &StateOfMind,
    policy: NormalizationPolicy,
) -> Result<ProbabilisticState> {
    let mut rows = Vec::with_capacity(prospects.len());
    for prospect in prospects {
        let d = decompose(prospect, psi)?;
        let conjunction = prospect
            .amplitudes()
            .iter()
            .zip(psi.amplitudes())
            .map(|(b, c)| conjunction_probability(*b, *c))
            .collect();
        rows.push(ProspectProbabilities {
            p_raw: d.p,
            diag_sum: d.diag_sum,
            q: d.q,
            p_normalized: None,
            conjunction,
        });
    }

    let matrix = AmplitudeMatrix::from_states(prospects)?;
    let sum_p: f64 = rows.iter().map(|r| r.p_raw).sum();
    let diagnostics = Diagnostics {
        sum_p,
        sum_q: rows.iter().map(|r| r.q).sum(),
        sum_conjunction: rows.iter().map(|r| r.conjunction.iter().sum::<f64>()).sum(),
        column_norm_max_dev: if matrix.rows() == 0 {
            1.0
        } else {
            matrix.column_norm_max_dev()
        },
        gram_max_dev: if policy.unitary_strict {
            matrix.gram_max_dev()
        } else {
            0.0
        },
        prop1_max_residual: rows
            .iter()
            .map(ProspectProbabilities::decomposition_residual)
            .fold(0.0, f64::max),
    };

    if policy.mode == NormalizationMode::Renorm {
        if sum_p.is_nan() || sum_p <= 0.0 {
            return Err(QdtError::Normalization {
                tolerance: policy.tolerance,
                residuals: vec![("sum_p".into(), sum_p)],
            });
        }
        for r in &mut rows {
            r.p_normalized = Some(r.p_raw / sum_p);
        }
    }

    if diagnostics.prop1_max_residual > IDENTITY_TOLERANCE * (1.0 + sum_p) {
        return Err(QdtError::Numerical(format!(
            "p - diag_sum - q = {:e} exceeds identity tolerance",
            diagnostics.prop1_max_residual
        )));
    }

    Ok(ProbabilisticState {
        prospects: rows,
        diagnostics,
        policy,
    })
}

/// [`evaluate`] followed by [`ProbabilisticState::check`].
pub fn evaluate_all(
    prospects: &[StateVector],
    psi: &StateOfMind,
    policy: NormalizationPolicy,
) -> Result<ProbabilisticState> {
    let state = evaluate(prospects, psi, policy)?;
    state.check()?;
    Ok(state)
}
