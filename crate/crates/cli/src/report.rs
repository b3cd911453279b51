//! Verification report written by `verify`.

use std::collections::BTreeMap;

use jensen_refine::refine::ConvexityReport;
use jensen_refine::{IdentityCheck, Middle, RefinementChain, Witness};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Slacks {
    pub lower: f64,
    pub upper: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inner: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedChain {
    pub name: String,
    #[serde(flatten)]
    pub chain: RefinementChain,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportCheck {
    pub chain: String,
    #[serde(flatten)]
    pub check: IdentityCheck,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportWitness {
    pub chain: String,
    #[serde(flatten)]
    pub witness: Witness,
}

/// Top-level fields mirror the primary (first) chain; `chains` carries every
/// chain evaluated. `pass` is the conjunction over all chains and the
/// convexity check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub application: String,
    pub pass: bool,
    pub rel_tol: f64,
    pub tol: f64,
    pub lower: f64,
    pub middle: Middle,
    pub upper: f64,
    pub slacks: Slacks,
    pub identity_checks: Vec<ReportCheck>,
    pub witnesses: Vec<ReportWitness>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub labels: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convexity: Option<ConvexityReport>,
    pub chains: Vec<NamedChain>,
}

impl Report {
    /// `chains` must be nonempty; the first is the primary chain.
    pub fn new(application: &str, chains: Vec<NamedChain>) -> Self {
        let primary = chains.first().expect("at least one chain").chain.clone();
        let mut identity_checks = Vec::new();
        let mut witnesses = Vec::new();
        for c in &chains {
            identity_checks.extend(c.chain.identity_checks.iter().map(|check| ReportCheck {
                chain: c.name.clone(),
                check: check.clone(),
            }));
            witnesses.extend(c.chain.witnesses.iter().map(|w| ReportWitness {
                chain: c.name.clone(),
                witness: w.clone(),
            }));
        }
        Self {
            application: application.to_string(),
            pass: chains.iter().all(|c| c.chain.pass),
            rel_tol: primary.rel_tol,
            tol: primary.tol,
            lower: primary.lower,
            middle: primary.middle.clone(),
            upper: primary.upper,
            slacks: Slacks {
                lower: primary.slack_lower,
                upper: primary.slack_upper,
                inner: primary.slack_inner,
            },
            identity_checks,
            witnesses,
            labels: BTreeMap::new(),
            convexity: None,
            chains,
        }
    }

    pub fn with_labels(mut self, labels: BTreeMap<String, f64>) -> Self {
        self.labels = labels;
        self
    }

    pub fn with_convexity(mut self, convexity: ConvexityReport) -> Self {
        self.pass &= convexity.pass;
        self.convexity = Some(convexity);
        self
    }
}
