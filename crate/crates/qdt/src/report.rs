//! Scenario evaluation and report emitters (table, JSON, CSV).

use std::fmt::Write as _;

use qdt_core::lattice::{
    check_attraction_consistency, ranking, AttractionReport, ProspectLattice,
};
use qdt_core::measure::{evaluate, NormalizationMode, ProbabilisticState, ProbabilityField};
use qdt_core::oracle::{evaluate_dense, DenseEvaluation, DEFAULT_MAX_DIMENSION};
use qdt_core::{QdtError, IDENTITY_TOLERANCE, RANKING_TIE_EPSILON};
use serde::Serialize;

use crate::error::{Result, ScenarioError};
use crate::format::Scenario;

/// Output format of the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProspectRow {
    pub name: String,
    pub p_raw: f64,
    pub diag_sum: f64,
    pub q: f64,
    pub p_normalized: Option<f64>,
    /// 1-based position in the ranking.
    pub rank: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Checks {
    pub sum_p: f64,
    pub sum_q: f64,
    pub column_norm_max_dev: f64,
    pub gram_max_dev: Option<f64>,
    pub identity_residual: Option<f64>,
    pub prop1_max_residual: f64,
    pub oracle_max_deviation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttractionLine {
    pub more_repulsive: String,
    pub less_repulsive: String,
    pub reasons: Vec<&'static str>,
    pub q_gap: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkippedLine {
    pub first: String,
    pub second: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AttractionSummary {
    pub checks: Vec<AttractionLine>,
    pub skipped: Vec<SkippedLine>,
}

/// Everything reported for one evaluated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionReport {
    /// Rows in declaration order.
    pub prospects: Vec<ProspectRow>,
    /// Prospect names, best first.
    pub ranking: Vec<String>,
    pub optimal: String,
    pub optimal_ties: Vec<String>,
    pub ordered_by: ProbabilityField,
    pub normalization: NormalizationMode,
    pub tolerance: f64,
    pub checks: Checks,
    pub attraction: Option<AttractionSummary>,
    /// How far any prospect falls outside the [empty, optimal] bounds.
    pub lattice_bound_violation: f64,
    pub state: ProbabilisticState,
}

/// A report plus the reason the scenario failed validation, if it did.
#[derive(Debug)]
pub struct Analysis {
    pub report: DecisionReport,
    pub failure: Option<ScenarioError>,
}

impl Analysis {
    pub fn exit_code(&self) -> i32 {
        self.failure.as_ref().map_or(0, ScenarioError::exit_code)
    }
}

fn oracle_deviation(state: &ProbabilisticState, dense: &DenseEvaluation) -> f64 {
    let mut worst: f64 = 0.0;
    for (fast, slow) in state.prospects.iter().zip(&dense.prospects) {
        worst = worst.max((fast.p_raw - slow.p).abs());
        worst = worst.max((fast.q - slow.q).abs());
        for (a, b) in fast.conjunction.iter().zip(&slow.conjunction) {
            worst = worst.max((a - b).abs());
        }
    }
    worst
}

fn attraction_summary(lattice: &ProspectLattice, report: &AttractionReport) -> AttractionSummary {
    let name = |i: usize| lattice.prospects[i].name.clone();
    AttractionSummary {
        checks: report
            .checks
            .iter()
            .map(|c| AttractionLine {
                more_repulsive: name(c.more_repulsive),
                less_repulsive: name(c.less_repulsive),
                reasons: c.reasons.iter().map(|r| r.as_str()).collect(),
                q_gap: c.q_gap,
                passed: c.passed,
            })
            .collect(),
        skipped: report
            .skipped
            .iter()
            .map(|s| SkippedLine {
                first: name(s.first),
                second: name(s.second),
                reason: s.reason.clone(),
            })
            .collect(),
    }
}

/// Evaluates a scenario. Errors are returned for unusable input; violated
/// normalization or oracle checks are reported in [`Analysis::failure`].
pub fn analyze(scenario: &Scenario) -> Result<Analysis> {
    analyze_with(scenario, DEFAULT_MAX_DIMENSION)
}

pub fn analyze_with(scenario: &Scenario, oracle_max_dimension: usize) -> Result<Analysis> {
    let policy = scenario.policy()?;
    let states = scenario.prospect_states()?;
    let psi = scenario.psi()?;
    let state = evaluate(&states, &psi, policy)?;

    let mut lattice = ProspectLattice::new(scenario.prospects.clone());
    let optimum = lattice.resolve_maximal(&state, RANKING_TIE_EPSILON)?;
    let order = ranking(&state, RANKING_TIE_EPSILON)?;
    let mut ranks = vec![0; order.len()];
    for (pos, &i) in order.iter().enumerate() {
        ranks[i] = pos + 1;
    }

    let dense = if scenario.options.oracle {
        Some(evaluate_dense(&states, &psi, oracle_max_dimension)?)
    } else {
        None
    };

    let d = state.diagnostics;
    let checks = Checks {
        sum_p: d.sum_p,
        sum_q: d.sum_q,
        column_norm_max_dev: d.column_norm_max_dev,
        gram_max_dev: policy.unitary_strict.then_some(d.gram_max_dev),
        identity_residual: dense.as_ref().map(|o| o.identity_residual),
        prop1_max_residual: d.prop1_max_residual,
        oracle_max_deviation: dense.as_ref().map(|o| oracle_deviation(&state, o)),
    };

    let attraction = if scenario.prospects.iter().any(|p| p.attributes.is_some()) {
        let report = check_attraction_consistency(&lattice, &state, RANKING_TIE_EPSILON)?;
        Some(attraction_summary(&lattice, &report))
    } else {
        None
    };

    let strict = policy.mode == NormalizationMode::Strict;
    let scale = 1.0 + d.sum_p.abs();
    let mut failure: Option<ScenarioError> = state.check().err().map(Into::into);
    if failure.is_none() && strict && d.sum_q.abs() > 10.0 * policy.tolerance {
        failure = Some(
            QdtError::Numerical(format!(
                "normalized scenario has sum_q = {:e}",
                d.sum_q
            ))
            .into(),
        );
    }
    if failure.is_none() {
        if let Some(dev) = checks.oracle_max_deviation {
            if dev > IDENTITY_TOLERANCE * scale {
                failure = Some(
                    QdtError::Numerical(format!("dense oracle deviates by {dev:e}")).into(),
                );
            }
        }
    }
    if failure.is_none() && strict {
        if let Some(residual) = checks.identity_residual {
            if residual > policy.tolerance {
                failure = Some(
                    QdtError::Normalization {
                        tolerance: policy.tolerance,
                        residuals: vec![("identity_residual".into(), residual)],
                    }
                    .into(),
                );
            }
        }
    }

    let report = DecisionReport {
        prospects: state
            .prospects
            .iter()
            .zip(&scenario.prospects)
            .zip(&ranks)
            .map(|((p, spec), &rank)| ProspectRow {
                name: spec.name.clone(),
                p_raw: p.p_raw,
                diag_sum: p.diag_sum,
                q: p.q,
                p_normalized: p.p_normalized,
                rank,
            })
            .collect(),
        ranking: order.iter().map(|&i| scenario.prospects[i].name.clone()).collect(),
        optimal: optimum.name.clone(),
        optimal_ties: optimum
            .tied_with
            .iter()
            .map(|&i| scenario.prospects[i].name.clone())
            .collect(),
        ordered_by: state.ordering_field(),
        normalization: policy.mode,
        tolerance: policy.tolerance,
        checks,
        attraction,
        lattice_bound_violation: lattice.bound_violation(&state)?,
        state,
    };
    Ok(Analysis { report, failure })
}

#[derive(Serialize)]
struct JsonProspect<'a> {
    name: &'a str,
    p_raw: f64,
    diag_sum: f64,
    q: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    p_normalized: Option<f64>,
    rank: usize,
}

#[derive(Serialize)]
struct JsonChecks {
    sum_p: f64,
    sum_q: f64,
    column_norm_max_dev: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    identity_residual: Option<f64>,
    prop1_max_residual: f64,
}

#[derive(Serialize)]
struct JsonAttractionCheck<'a> {
    more_repulsive: &'a str,
    less_repulsive: &'a str,
    reasons: &'a [&'static str],
    q_gap: f64,
    passed: bool,
}

#[derive(Serialize)]
struct JsonSkipped<'a> {
    first: &'a str,
    second: &'a str,
    reason: &'a str,
}

#[derive(Serialize)]
struct JsonAttraction<'a> {
    checks: Vec<JsonAttractionCheck<'a>>,
    skipped: Vec<JsonSkipped<'a>>,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    prospects: Vec<JsonProspect<'a>>,
    checks: JsonChecks,
    optimal: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    attraction: Option<JsonAttraction<'a>>,
}

impl DecisionReport {
    /// Rows sorted by rank.
    pub fn ranked_rows(&self) -> Vec<&ProspectRow> {
        let mut rows: Vec<&ProspectRow> = self.prospects.iter().collect();
        rows.sort_by_key(|r| r.rank);
        rows
    }

    fn json_view<'a>(&'a self, rows: &[&'a ProspectRow]) -> JsonReport<'a> {
        JsonReport {
            prospects: rows
                .iter()
                .map(|r| JsonProspect {
                    name: &r.name,
                    p_raw: r.p_raw,
                    diag_sum: r.diag_sum,
                    q: r.q,
                    p_normalized: r.p_normalized,
                    rank: r.rank,
                })
                .collect(),
            checks: JsonChecks {
                sum_p: self.checks.sum_p,
                sum_q: self.checks.sum_q,
                column_norm_max_dev: self.checks.column_norm_max_dev,
                identity_residual: self.checks.identity_residual,
                prop1_max_residual: self.checks.prop1_max_residual,
            },
            optimal: &self.optimal,
            attraction: self.attraction.as_ref().map(|a| JsonAttraction {
                checks: a
                    .checks
                    .iter()
                    .map(|c| JsonAttractionCheck {
                        more_repulsive: &c.more_repulsive,
                        less_repulsive: &c.less_repulsive,
                        reasons: &c.reasons,
                        q_gap: c.q_gap,
                        passed: c.passed,
                    })
                    .collect(),
                skipped: a
                    .skipped
                    .iter()
                    .map(|s| JsonSkipped {
                        first: &s.first,
                        second: &s.second,
                        reason: &s.reason,
                    })
                    .collect(),
            }),
        }
    }

    fn rows(&self, ranked: bool) -> Vec<&ProspectRow> {
        if ranked {
            self.ranked_rows()
        } else {
            self.prospects.iter().collect()
        }
    }

    pub fn to_json(&self, ranked: bool) -> String {
        let rows = self.rows(ranked);
        let mut out = serde_json::to_string_pretty(&self.json_view(&rows))
            .expect("report serializes");
        out.push('\n');
        out
    }

    pub fn to_csv(&self, ranked: bool) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["name", "p_raw", "diag_sum", "q", "p_normalized", "rank"])
            .expect("in-memory write");
        for r in self.rows(ranked) {
            w.write_record([
                r.name.clone(),
                num(r.p_raw),
                num(r.diag_sum),
                num(r.q),
                r.p_normalized.map(num).unwrap_or_default(),
                r.rank.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    pub fn to_table(&self, ranked: bool) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "ordered by {} (normalization {}, tolerance {:e})",
            self.ordered_by.as_str(),
            self.normalization.as_str(),
            self.tolerance
        );
        let width = self
            .prospects
            .iter()
            .map(|r| r.name.len())
            .max()
            .unwrap_or(4)
            .max(4);
        let _ = write!(
            out,
            "{:>4}  {:<width$}  {:>16}  {:>16}  {:>16}",
            "rank", "name", "p_raw", "diag_sum", "q"
        );
        let renorm = self.prospects.iter().any(|r| r.p_normalized.is_some());
        if renorm {
            let _ = write!(out, "  {:>16}", "p_normalized");
        }
        out.push('\n');
        for r in self.rows(ranked) {
            let _ = write!(
                out,
                "{:>4}  {:<width$}  {:>16.12}  {:>16.12}  {:>16.12}",
                r.rank, r.name, r.p_raw, r.diag_sum, r.q
            );
            if let Some(p) = r.p_normalized {
                let _ = write!(out, "  {p:>16.12}");
            }
            out.push('\n');
        }
        let _ = write!(out, "optimal: {}", self.optimal);
        if !self.optimal_ties.is_empty() {
            let _ = write!(out, " (tied with {})", self.optimal_ties.join(", "));
        }
        out.push('\n');
        out.push_str("checks:\n");
        for (name, value) in self.check_values() {
            let _ = writeln!(out, "  {name:<22} {value:>12.3e}");
        }
        if let Some(a) = &self.attraction {
            out.push_str("attraction:\n");
            for c in &a.checks {
                let _ = writeln!(
                    out,
                    "  {} more repulsive than {} ({}): q gap {:.6e} {}",
                    c.more_repulsive,
                    c.less_repulsive,
                    c.reasons.join("; "),
                    c.q_gap,
                    if c.passed { "PASS" } else { "FAIL" }
                );
            }
            for s in &a.skipped {
                let _ = writeln!(out, "  skipped {} / {}: {}", s.first, s.second, s.reason);
            }
        }
        out
    }

    /// Named check values in report order.
    pub fn check_values(&self) -> Vec<(&'static str, f64)> {
        let c = &self.checks;
        let mut out = vec![
            ("sum_p", c.sum_p),
            ("sum_q", c.sum_q),
            ("column_norm_max_dev", c.column_norm_max_dev),
        ];
        if let Some(g) = c.gram_max_dev {
            out.push(("gram_max_dev", g));
        }
        if let Some(r) = c.identity_residual {
            out.push(("identity_residual", r));
        }
        out.push(("prop1_max_residual", c.prop1_max_residual));
        if let Some(o) = c.oracle_max_deviation {
            out.push(("oracle_max_deviation", o));
        }
        out.push(("lattice_bound_violation", self.lattice_bound_violation));
        out
    }

    pub fn render(&self, format: Format, ranked: bool) -> String {
        match format {
            Format::Table => self.to_table(ranked),
            Format::Json => self.to_json(ranked),
            Format::Csv => self.to_csv(ranked),
        }
    }
}

/// 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Result of `validate`, rendered in the chosen format.
pub fn render_validation(analysis: &Analysis, format: Format) -> String {
    let report = &analysis.report;
    let valid = analysis.failure.is_none();
    match format {
        Format::Json => {
            let checks: serde_json::Map<String, serde_json::Value> = report
                .check_values()
                .into_iter()
                .map(|(k, v)| (k.to_string(), serde_json::json!(v)))
                .collect();
            let value = serde_json::json!({
                "valid": valid,
                "normalization": report.normalization.as_str(),
                "tolerance": report.tolerance,
                "checks": checks,
                "error": analysis.failure.as_ref().map(|e| e.to_string()),
            });
            let mut out = serde_json::to_string_pretty(&value).expect("json value serializes");
            out.push('\n');
            out
        }
        Format::Csv => {
            let mut out = String::from("check,value\n");
            for (k, v) in report.check_values() {
                let _ = writeln!(out, "{k},{}", num(v));
            }
            let _ = writeln!(out, "valid,{valid}");
            out
        }
        Format::Table => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "normalization {}, tolerance {:e}",
                report.normalization.as_str(),
                report.tolerance
            );
            for (k, v) in report.check_values() {
                let _ = writeln!(out, "  {k:<22} {v:>12.3e}");
            }
            match &analysis.failure {
                None => out.push_str("valid\n"),
                Some(e) => {
                    let _ = writeln!(out, "INVALID: {e}");
                }
            }
            out
        }
    }
}
