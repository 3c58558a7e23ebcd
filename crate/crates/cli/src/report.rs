//! Machine-readable run reports.
//!
//! Everything here is a pure function of the scenario and flags, so two runs
//! with identical inputs serialize to identical bytes. Wall-clock timing is
//! only printed in the text report.

use coherent_core::dot::indifference_classes;
use coherent_core::model::CommutativityViolation;
use coherent_core::solver::{Check, EliminationReason, UnsatCertificate};
use coherent_core::{
    Fact, ForcedMap, PairOption, PairStatus, PairVerdict, RelationState, Scenario,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunReport {
    pub command: String,
    pub scenario: ScenarioSummary,
    pub strong: bool,
    /// Verdicts only speak about the finite window.
    pub window_relative: bool,
    pub commutativity_violations: Vec<ViolationOut>,
    pub consistent: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycle_witness: Option<String>,
    pub counts: Counts,
    pub seed_pairs: Vec<PairOut>,
    pub closure_forced: Vec<PairOut>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_forced: Option<Vec<PairOut>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub novel: Option<Vec<PairOut>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdicts: Option<Vec<VerdictOut>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extension: Option<ExtensionOut>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleOut>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSummary {
    pub name: String,
    pub description: String,
    pub elements: usize,
    pub commutative: bool,
    pub total: bool,
    pub generators: Vec<GeneratorSummary>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSummary {
    pub name: String,
    pub defined_on: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ViolationOut {
    pub first: String,
    pub second: String,
    pub element: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Counts {
    pub seed: usize,
    pub closure_forced: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_forced: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub novel: Option<usize>,
}

/// `better ≻ worse` when `strict`, otherwise `better ≽ worse`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairOut {
    pub better: String,
    pub worse: String,
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerdictOut {
    pub first: String,
    pub second: String,
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub above: Option<String>,
    pub surviving: Vec<String>,
    pub eliminated: Vec<EliminationOut>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EliminationOut {
    pub option: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionOut {
    pub satisfiable: bool,
    /// Indifference classes, best first.
    #[serde(default)]
    pub classes: Vec<Vec<String>>,
    #[serde(default)]
    pub verification: Vec<CheckOut>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateOut>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckOut {
    pub name: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateOut {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_cycle: Option<String>,
    pub dead_pairs: Vec<[String; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleOut {
    pub cap: usize,
    pub extensions: usize,
    pub solver_satisfiable: bool,
    pub mismatches: Vec<String>,
}

pub fn summarize(s: &Scenario) -> ScenarioSummary {
    ScenarioSummary {
        name: s.name().to_owned(),
        description: s.description().to_owned(),
        elements: s.len(),
        commutative: s.is_commutative(),
        total: s.is_total(),
        generators: s
            .generators()
            .iter()
            .map(|g| GeneratorSummary {
                name: g.name().to_owned(),
                defined_on: g.domain_len(),
            })
            .collect(),
    }
}

pub fn violations(s: &Scenario, report: &[CommutativityViolation]) -> Vec<ViolationOut> {
    report
        .iter()
        .map(|v| ViolationOut {
            first: s.generators()[v.first].name().to_owned(),
            second: s.generators()[v.second].name().to_owned(),
            element: s.label(v.element).to_owned(),
        })
        .collect()
}

pub fn pair_out(s: &Scenario, f: Fact) -> PairOut {
    PairOut {
        better: s.label(f.x).to_owned(),
        worse: s.label(f.y).to_owned(),
        strict: f.strict,
    }
}

pub fn facts_out(s: &Scenario, facts: impl IntoIterator<Item = Fact>) -> Vec<PairOut> {
    facts.into_iter().map(|f| pair_out(s, f)).collect()
}

fn option_name(o: PairOption) -> &'static str {
    match o {
        PairOption::Above => "first_above",
        PairOption::Below => "second_above",
        PairOption::Indifferent => "indifferent",
    }
}

pub fn verdict_out(s: &Scenario, v: &PairVerdict) -> VerdictOut {
    let (status, above) = match v.status {
        PairStatus::ForcedStrict { above, .. } => {
            ("forced_strict", Some(s.label(above).to_owned()))
        }
        PairStatus::ForcedIndifferent => ("forced_indifferent", None),
        PairStatus::Free => ("free_within_window", None),
        PairStatus::LocallyUnextendable => ("locally_unextendable", None),
    };
    VerdictOut {
        first: s.label(v.first).to_owned(),
        second: s.label(v.second).to_owned(),
        status: status.to_owned(),
        above,
        surviving: v
            .surviving
            .iter()
            .map(|o| option_name(o).to_owned())
            .collect(),
        eliminated: v
            .eliminated
            .iter()
            .map(|e| EliminationOut {
                option: option_name(e.option).to_owned(),
                reason: match e.reason {
                    EliminationReason::Cycle { witness } => {
                        format!("cycle through {}", s.label(witness))
                    }
                    EliminationReason::NoCompletion => "no completion".to_owned(),
                    EliminationReason::NoCandidate => "no candidate".to_owned(),
                },
            })
            .collect(),
    }
}

pub fn verdicts_out(s: &Scenario, forced: &ForcedMap) -> Vec<VerdictOut> {
    forced.values().map(|v| verdict_out(s, v)).collect()
}

pub fn classes_out(s: &Scenario, e: &RelationState) -> Vec<Vec<String>> {
    let mut classes = indifference_classes(e);
    // best first: fewer elements strictly above
    classes.sort_by_key(|c| {
        let x = c[0];
        (0..e.len())
            .filter(|&y| e.weak(y, x) && !e.weak(x, y))
            .count()
    });
    classes
        .into_iter()
        .map(|c| c.into_iter().map(|x| s.label(x).to_owned()).collect())
        .collect()
}

pub fn checks_out(checks: &[Check]) -> Vec<CheckOut> {
    checks
        .iter()
        .map(|c| CheckOut {
            name: c.name.to_owned(),
            passed: c.passed,
            detail: c.detail.clone(),
        })
        .collect()
}

pub fn certificate_out(s: &Scenario, c: &UnsatCertificate) -> CertificateOut {
    CertificateOut {
        seed_cycle: c.seed_cycle.map(|x| s.label(x).to_owned()),
        dead_pairs: c
            .dead_pairs
            .iter()
            .map(|&(x, y)| [s.label(x).to_owned(), s.label(y).to_owned()])
            .collect(),
    }
}
