//! Mechanical audits of an index against the three invariance conditions.
//!
//! 1. Row-scale invariance: equivalent matrices must score the same.
//! 2. Bounds that do not move with the number of classes.
//! 3. A limit above the lower bound when a single class collapses.

pub mod condition1;
pub mod condition2;
pub mod condition3;
pub mod conformance;

use serde::Serialize;

pub use condition1::{audit_condition1, Condition1Config, Condition1Outcome, Condition1Verdict, Condition1Witness};
pub use condition2::{
    audit_condition2, enumerate_extremal, BoundRow, Condition2Config, Condition2Outcome, Condition2Verdict,
    Extremal, RowSumPlan,
};
pub use condition3::{
    audit_condition3, build_collapse_family, default_collapse_family, CollapseFamily, Condition3Outcome,
    Condition3Verdict, LimitSource,
};
pub use conformance::{check_conformance, Mismatch};

use crate::error::Result;
use crate::index::IndexId;

#[derive(Debug, Clone)]
pub struct AuditConfig {
    /// Subset of `{1, 2, 3}`.
    pub conditions: Vec<u8>,
    pub condition1: Condition1Config,
    pub condition2: Condition2Config,
    /// Class count of the default collapse family.
    pub collapse_classes: usize,
    pub collapsed_class: usize,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self {
            conditions: vec![1, 2, 3],
            condition1: Condition1Config::default(),
            condition2: Condition2Config::default(),
            collapse_classes: 10,
            collapsed_class: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub index: IndexId,
    pub audited: Vec<u8>,
    pub condition1: Option<Condition1Outcome>,
    pub condition2: Option<Condition2Outcome>,
    pub condition3: Option<Condition3Outcome>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl AuditReport {
    pub fn empty(index: IndexId) -> Self {
        Self {
            index,
            audited: Vec::new(),
            condition1: None,
            condition2: None,
            condition3: None,
            notes: Vec::new(),
        }
    }
}

pub fn audit_index(index: IndexId, cfg: &AuditConfig) -> Result<AuditReport> {
    let mut report = AuditReport::empty(index);
    report.audited = cfg.conditions.clone();
    report.audited.sort_unstable();
    report.audited.dedup();
    if report.audited.contains(&1) {
        report.condition1 = Some(audit_condition1(index, &cfg.condition1));
    }
    if report.audited.contains(&2) {
        report.condition2 = Some(audit_condition2(index, &cfg.condition2)?);
    }
    if report.audited.contains(&3) {
        let classes = if index.is_binary() { 2 } else { cfg.collapse_classes };
        let family = default_collapse_family(classes, cfg.collapsed_class.min(classes - 1))?;
        match audit_condition3(index, &family) {
            Ok(out) => report.condition3 = Some(out),
            Err(e @ crate::Error::UndefinedAlongFamily { .. }) => report.notes.push(e.to_string()),
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}

pub fn audit_all(indices: &[IndexId], cfg: &AuditConfig) -> Result<Vec<AuditReport>> {
    indices.iter().map(|&id| audit_index(id, cfg)).collect()
}
