//! The expected verdict pattern for every audited index, and a checker against it.

use serde::Serialize;

use super::condition1::Condition1Verdict as V1;
use super::condition2::Condition2Verdict as V2;
use super::condition3::Condition3Verdict as V3;
use super::AuditReport;
use crate::index::IndexId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Expectation {
    pub index: IndexId,
    pub condition1: V1,
    pub condition2: V2,
    /// `None` where no claim is made about the collapse limit.
    pub condition3: Option<V3>,
}

const fn e(index: IndexId, condition1: V1, condition2: V2, condition3: Option<V3>) -> Expectation {
    Expectation {
        index,
        condition1,
        condition2,
        condition3,
    }
}

pub const EXPECTED: [Expectation; 13] = [
    e(IndexId::GMean2, V1::Invariant, V2::NotApplicable, Some(V3::NotApplicable)),
    e(IndexId::Auroc, V1::Invariant, V2::NotApplicable, Some(V3::NotApplicable)),
    e(IndexId::Precision, V1::Violated, V2::NotApplicable, Some(V3::NotApplicable)),
    e(IndexId::Aurpc, V1::Violated, V2::NotApplicable, Some(V3::NotApplicable)),
    e(IndexId::MPrecision, V1::Invariant, V2::NotApplicable, Some(V3::NotApplicable)),
    e(IndexId::MAurpc, V1::Invariant, V2::NotApplicable, Some(V3::NotApplicable)),
    e(IndexId::GMeanC, V1::Invariant, V2::StableBounds, Some(V3::Collapses)),
    e(IndexId::Acsa, V1::Invariant, V2::StableBounds, Some(V3::Informative)),
    e(IndexId::AurocOvo, V1::Invariant, V2::CDependentBounds, None),
    e(IndexId::AurocOva, V1::Violated, V2::CDependentBounds, None),
    e(IndexId::NAurocOva, V1::Violated, V2::StableBounds, None),
    e(IndexId::AurpcOva, V1::Violated, V2::StableBounds, None),
    e(IndexId::MAurpcOva, V1::Invariant, V2::StableBounds, Some(V3::Informative)),
];

pub fn expectation(index: IndexId) -> Option<&'static Expectation> {
    EXPECTED.iter().find(|x| x.index == index)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub index: IndexId,
    pub condition: u8,
    pub expected: String,
    pub found: String,
}

fn compare<T: std::fmt::Debug + PartialEq>(
    out: &mut Vec<Mismatch>,
    index: IndexId,
    condition: u8,
    expected: T,
    found: Option<T>,
) {
    if found.as_ref() != Some(&expected) {
        out.push(Mismatch {
            index,
            condition,
            expected: format!("{expected:?}"),
            found: found.map_or_else(|| "not audited".to_string(), |f| format!("{f:?}")),
        });
    }
}

/// Compares each report with the expected pattern. Only conditions present in
/// a report are checked, and indices outside the table are ignored.
pub fn check_conformance(reports: &[AuditReport]) -> Vec<Mismatch> {
    let mut out = Vec::new();
    for r in reports {
        let Some(x) = expectation(r.index) else {
            continue;
        };
        if let Some(c1) = &r.condition1 {
            compare(&mut out, r.index, 1, x.condition1, Some(c1.verdict));
            if c1.verdict == V1::Violated && c1.witness.is_none() {
                out.push(Mismatch {
                    index: r.index,
                    condition: 1,
                    expected: "witness for Violated".into(),
                    found: "none".into(),
                });
            }
        }
        if let Some(c2) = &r.condition2 {
            compare(&mut out, r.index, 2, x.condition2, Some(c2.verdict));
        }
        if r.audited.contains(&3) {
            if let Some(expected) = x.condition3 {
                compare(&mut out, r.index, 3, expected, r.condition3.as_ref().map(|c| c.verdict));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_covers_the_audited_indices() {
        let ids: Vec<IndexId> = EXPECTED.iter().map(|x| x.index).collect();
        assert_eq!(ids, IndexId::AUDITED.to_vec());
        assert!(EXPECTED
            .iter()
            .all(|x| x.index.is_binary() == (x.condition2 == V2::NotApplicable)));
    }

    #[test]
    fn flags_a_wrong_verdict() {
        let mut report = AuditReport::empty(IndexId::Acsa);
        report.audited = vec![3];
        let found = check_conformance(&[report]);
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].found, "not audited");
    }
}
