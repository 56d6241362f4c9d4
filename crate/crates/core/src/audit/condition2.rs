//! Class-count independence of bounds (Condition 2), backed by exhaustive enumeration.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::confusion::ConfusionMatrix;
use crate::error::{Error, Result};
use crate::index::IndexId;
use crate::multiclass::theoretical_bounds;
use crate::VALUE_TOLERANCE;

pub const DEFAULT_BUDGET: u64 = 2_000_000;

/// All ways of writing `n` as an ordered sum of `parts` non-negative integers,
/// in lexicographically decreasing order of the leading parts.
pub fn compositions(n: u64, parts: usize) -> Vec<Vec<u64>> {
    fn go(n: u64, parts: usize, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if parts == 1 {
            prefix.push(n);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in (0..=n).rev() {
            prefix.push(first);
            go(n - first, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if parts > 0 {
        go(n, parts, &mut Vec::with_capacity(parts), &mut out);
    }
    out
}

fn binomial(n: u128, k: u128) -> Option<u128> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// Number of matrices with the given row sums, or `None` on overflow.
pub fn matrix_count(row_sums: &[u64]) -> Option<u128> {
    let c = row_sums.len() as u128;
    row_sums.iter().try_fold(1u128, |acc, &n| {
        acc.checked_mul(binomial(n as u128 + c - 1, c - 1)?)
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Extremal {
    pub min: Option<(ConfusionMatrix, f64)>,
    pub max: Option<(ConfusionMatrix, f64)>,
    pub evaluated: u64,
    pub undefined: u64,
}

impl Extremal {
    fn empty() -> Self {
        Self {
            min: None,
            max: None,
            evaluated: 0,
            undefined: 0,
        }
    }

    fn offer(&mut self, m: &ConfusionMatrix, v: f64) {
        if self.min.as_ref().is_none_or(|(_, best)| v < *best) {
            self.min = Some((m.clone(), v));
        }
        if self.max.as_ref().is_none_or(|(_, best)| v > *best) {
            self.max = Some((m.clone(), v));
        }
    }

    /// Folds a later chunk into this one; earlier matrices win ties.
    fn merge(mut self, later: Extremal) -> Self {
        if let Some((m, v)) = later.min {
            if self.min.as_ref().is_none_or(|(_, best)| v < *best) {
                self.min = Some((m, v));
            }
        }
        if let Some((m, v)) = later.max {
            if self.max.as_ref().is_none_or(|(_, best)| v > *best) {
                self.max = Some((m, v));
            }
        }
        self.evaluated += later.evaluated;
        self.undefined += later.undefined;
        self
    }
}

/// Exact extrema of `index` over every confusion matrix with the given row sums.
///
/// Ties keep the first matrix in enumeration order, so results do not depend
/// on how the work is split across threads.
pub fn enumerate_extremal(index: IndexId, row_sums: &[u64], budget: u64) -> Result<Extremal> {
    let c = row_sums.len();
    if c < 2 {
        return Err(Error::TooFewClasses { found: c });
    }
    if index.is_binary() && c != 2 {
        return Err(Error::NotTwoClass { index, found: c });
    }
    if let Some(row) = row_sums.iter().position(|&n| n == 0) {
        return Err(Error::EmptyRow { row });
    }
    match matrix_count(row_sums) {
        Some(total) if total <= budget as u128 => {}
        other => {
            return Err(Error::BudgetExceeded {
                required: other.map_or_else(|| "more than 2^128".to_string(), |t| t.to_string()),
                budget,
            })
        }
    }

    let per_row: Vec<Vec<Vec<u64>>> = row_sums.iter().map(|&n| compositions(n, c)).collect();
    let chunks: Vec<Extremal> = per_row[0]
        .par_iter()
        .map(|first| {
            let mut acc = Extremal::empty();
            let mut odometer = vec![0usize; c];
            let mut flat = vec![0u64; c * c];
            flat[..c].copy_from_slice(first);
            loop {
                for (r, &k) in odometer.iter().enumerate().skip(1) {
                    flat[r * c..(r + 1) * c].copy_from_slice(&per_row[r][k]);
                }
                let m = ConfusionMatrix::from_flat(c, flat.clone()).expect("row sums are positive");
                acc.evaluated += 1;
                match index.evaluate(&m).expect("class count checked").value() {
                    Some(v) => acc.offer(&m, v),
                    None => acc.undefined += 1,
                }
                let mut r = c - 1;
                loop {
                    if r == 0 {
                        return acc;
                    }
                    odometer[r] += 1;
                    if odometer[r] < per_row[r].len() {
                        break;
                    }
                    odometer[r] = 0;
                    r -= 1;
                }
            }
        })
        .collect();
    Ok(chunks.into_iter().fold(Extremal::empty(), Extremal::merge))
}

/// How row sums are chosen for the enumeration at each class count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum RowSumPlan {
    /// Every row sums to the same value.
    Uniform(u64),
    /// The largest uniform row sum up to `max` whose enumeration fits the budget.
    Auto { max: u64 },
    /// Explicit row sums per class count.
    PerClassCount(BTreeMap<usize, Vec<u64>>),
}

impl Default for RowSumPlan {
    fn default() -> Self {
        Self::Auto { max: 3 }
    }
}

impl RowSumPlan {
    pub fn row_sums(&self, classes: usize, budget: u64) -> Result<Vec<u64>> {
        match self {
            Self::Uniform(n) => Ok(vec![*n; classes]),
            Self::Auto { max } => {
                for n in (1..=*max).rev() {
                    let rows = vec![n; classes];
                    if matrix_count(&rows).is_some_and(|t| t <= budget as u128) {
                        return Ok(rows);
                    }
                }
                Ok(vec![1; classes])
            }
            Self::PerClassCount(map) => map.get(&classes).cloned().ok_or_else(|| Error::InvalidSpec {
                path: format!("row_sums.{classes}"),
                message: "no row sums given for this class count".into(),
            }),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Condition2Config {
    pub class_counts: Vec<usize>,
    pub row_sums: RowSumPlan,
    pub budget: u64,
}

impl Default for Condition2Config {
    fn default() -> Self {
        Self {
            class_counts: vec![2, 3, 4],
            row_sums: RowSumPlan::default(),
            budget: DEFAULT_BUDGET,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundRow {
    pub row_sums: Vec<u64>,
    pub enumerated_min: Option<f64>,
    pub enumerated_max: Option<f64>,
    pub theoretical_min: f64,
    pub theoretical_max: f64,
    pub argmin: Option<ConfusionMatrix>,
    pub argmax: Option<ConfusionMatrix>,
    pub matrices: u64,
    pub undefined: u64,
    pub within_theory: bool,
    pub min_attained: bool,
    pub max_attained: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Condition2Verdict {
    StableBounds,
    CDependentBounds,
    /// The index is defined for two classes only.
    NotApplicable,
}

#[derive(Debug, Clone, Serialize)]
pub struct Condition2Outcome {
    pub verdict: Condition2Verdict,
    pub table: BTreeMap<usize, BoundRow>,
}

pub fn bound_row(index: IndexId, row_sums: &[u64], budget: u64) -> Result<BoundRow> {
    let (theoretical_min, theoretical_max) = theoretical_bounds(index, row_sums.len(), Some(row_sums))?;
    let ex = enumerate_extremal(index, row_sums, budget)?;
    let enumerated_min = ex.min.as_ref().map(|(_, v)| *v);
    let enumerated_max = ex.max.as_ref().map(|(_, v)| *v);
    let within_theory = enumerated_min.is_none_or(|v| v >= theoretical_min - VALUE_TOLERANCE)
        && enumerated_max.is_none_or(|v| v <= theoretical_max + VALUE_TOLERANCE);
    Ok(BoundRow {
        row_sums: row_sums.to_vec(),
        enumerated_min,
        enumerated_max,
        theoretical_min,
        theoretical_max,
        min_attained: enumerated_min.is_some_and(|v| (v - theoretical_min).abs() <= VALUE_TOLERANCE),
        max_attained: enumerated_max.is_some_and(|v| (v - theoretical_max).abs() <= VALUE_TOLERANCE),
        argmin: ex.min.map(|(m, _)| m),
        argmax: ex.max.map(|(m, _)| m),
        matrices: ex.evaluated,
        undefined: ex.undefined,
        within_theory,
    })
}

/// Builds the bound table over the configured class counts.
///
/// The verdict compares the closed-form bounds across `C`; the enumerated
/// columns certify that those bounds hold and are reached.
pub fn audit_condition2(index: IndexId, cfg: &Condition2Config) -> Result<Condition2Outcome> {
    if index.is_binary() {
        return Ok(Condition2Outcome {
            verdict: Condition2Verdict::NotApplicable,
            table: BTreeMap::new(),
        });
    }
    let mut table = BTreeMap::new();
    for &c in &cfg.class_counts {
        let rows = cfg.row_sums.row_sums(c, cfg.budget)?;
        if rows.len() != c {
            return Err(Error::DimensionMismatch {
                left: c,
                right: rows.len(),
            });
        }
        table.insert(c, bound_row(index, &rows, cfg.budget)?);
    }
    let mut bounds = table.values().map(|r| (r.theoretical_min, r.theoretical_max));
    let first = bounds.next();
    let stable = bounds.all(|(lo, hi)| {
        first.is_some_and(|(lo0, hi0)| (lo - lo0).abs() <= VALUE_TOLERANCE && (hi - hi0).abs() <= VALUE_TOLERANCE)
    });
    Ok(Condition2Outcome {
        verdict: if stable {
            Condition2Verdict::StableBounds
        } else {
            Condition2Verdict::CDependentBounds
        },
        table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_counts() {
        assert_eq!(compositions(3, 3).len(), 10);
        assert_eq!(compositions(0, 4), vec![vec![0, 0, 0, 0]]);
        assert_eq!(compositions(2, 2), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(matrix_count(&[2, 3, 4]), Some(900));
    }

    #[test]
    fn acsa_two_class_extrema() {
        let ex = enumerate_extremal(IndexId::Acsa, &[2, 2], DEFAULT_BUDGET).unwrap();
        let (lo, hi) = (ex.min.unwrap(), ex.max.unwrap());
        assert_eq!(lo.1, 0.0);
        assert_eq!(lo.0.rows(), vec![vec![0, 2], vec![2, 0]]);
        assert_eq!(hi.1, 1.0);
        assert_eq!(hi.0.rows(), vec![vec![2, 0], vec![0, 2]]);
        assert_eq!(ex.evaluated, 9);
    }

    #[test]
    fn auroc_ova_minimum_matches_extremal_construction() {
        let ex = enumerate_extremal(IndexId::AurocOva, &[2, 3, 4], DEFAULT_BUDGET).unwrap();
        assert_eq!(ex.evaluated, 900);
        let (m, v) = ex.min.unwrap();
        assert!((v - (2.0 - 4.0 / 6.0) / 6.0).abs() <= 1e-12);
        assert_eq!(m.rows(), vec![vec![0, 0, 2], vec![0, 0, 3], vec![0, 4, 0]]);
    }

    #[test]
    fn auroc_ovo_minimum_three_classes() {
        let ex = enumerate_extremal(IndexId::AurocOvo, &[5, 5, 5], DEFAULT_BUDGET).unwrap();
        assert!((ex.min.unwrap().1 - 0.25).abs() <= 1e-12);
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(
            enumerate_extremal(IndexId::Acsa, &[3; 6], 1000),
            Err(Error::BudgetExceeded { budget: 1000, .. })
        ));
    }

    #[test]
    fn acsa_is_stable() {
        let cfg = Condition2Config {
            row_sums: RowSumPlan::Uniform(3),
            ..Default::default()
        };
        let out = audit_condition2(IndexId::Acsa, &cfg).unwrap();
        assert_eq!(out.verdict, Condition2Verdict::StableBounds);
        for row in out.table.values() {
            assert_eq!(
                (row.enumerated_min, row.enumerated_max, row.theoretical_min, row.theoretical_max),
                (Some(0.0), Some(1.0), 0.0, 1.0)
            );
        }
    }

    #[test]
    fn auroc_ovo_depends_on_c() {
        let out = audit_condition2(IndexId::AurocOvo, &Condition2Config::default()).unwrap();
        assert_eq!(out.verdict, Condition2Verdict::CDependentBounds);
        let mins: Vec<f64> = out.table.values().map(|r| r.theoretical_min).collect();
        for (got, want) in mins.iter().zip([0.0, 0.25, 1.0 / 3.0]) {
            assert!((got - want).abs() <= 1e-12);
        }
        assert!(out.table.values().all(|r| r.within_theory && r.min_attained && r.max_attained));
    }

    #[test]
    fn auroc_ova_depends_on_c() {
        let cfg = Condition2Config {
            class_counts: vec![3, 4],
            ..Default::default()
        };
        let out = audit_condition2(IndexId::AurocOva, &cfg).unwrap();
        assert_eq!(out.verdict, Condition2Verdict::CDependentBounds);
        assert!(out.table.values().all(|r| r.within_theory && r.min_attained));
    }

    #[test]
    fn parallel_split_is_deterministic() {
        let a = enumerate_extremal(IndexId::AurpcOva, &[3, 3, 3], DEFAULT_BUDGET).unwrap();
        let b = enumerate_extremal(IndexId::AurpcOva, &[3, 3, 3], DEFAULT_BUDGET).unwrap();
        assert_eq!(a.min.unwrap().0, b.min.unwrap().0);
        assert_eq!(a.undefined, b.undefined);
    }
}
