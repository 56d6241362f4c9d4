//! The confusion matrix and the relations defined on it.
//!
//! Entry `(i, j)` counts test points of true class `i` predicted as class `j`.
//! For two classes the layout is fixed: row 0 is the positive (minority)
//! class, `[[TP, FN], [FP, TN]]`.

use std::fmt;

use num::rational::Ratio;
use num::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConfusionMatrix {
    classes: usize,
    counts: Vec<u64>,
    row_sums: Vec<u64>,
    col_sums: Vec<u64>,
    total: u64,
}

impl ConfusionMatrix {
    /// Validates a grid of signed integers.
    pub fn validate(grid: &[Vec<i64>]) -> Result<Self> {
        check_shape(grid.iter().map(Vec::len), grid.len())?;
        for (i, row) in grid.iter().enumerate() {
            if let Some((j, &v)) = row.iter().enumerate().find(|(_, &v)| v < 0) {
                return Err(Error::NegativeEntry {
                    row: i,
                    col: j,
                    value: v,
                });
            }
        }
        let counts = grid.iter().flatten().map(|&v| v as u64).collect();
        Self::from_flat(grid.len(), counts)
    }

    pub fn new(rows: Vec<Vec<u64>>) -> Result<Self> {
        check_shape(rows.iter().map(Vec::len), rows.len())?;
        let classes = rows.len();
        Self::from_flat(classes, rows.into_iter().flatten().collect())
    }

    /// Builds from row-major counts; `counts.len()` must be `classes²`.
    pub(crate) fn from_flat(classes: usize, counts: Vec<u64>) -> Result<Self> {
        debug_assert_eq!(counts.len(), classes * classes);
        let row_sums: Vec<u64> = counts.chunks(classes).map(|r| r.iter().sum()).collect();
        if let Some(row) = row_sums.iter().position(|&n| n == 0) {
            return Err(Error::EmptyRow { row });
        }
        let col_sums = (0..classes)
            .map(|j| (0..classes).map(|i| counts[i * classes + j]).sum())
            .collect();
        let total = row_sums.iter().sum();
        Ok(Self {
            classes,
            counts,
            row_sums,
            col_sums,
            total,
        })
    }

    pub fn class_count(&self) -> usize {
        self.classes
    }

    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.counts[row * self.classes + col]
    }

    pub fn row(&self, row: usize) -> &[u64] {
        &self.counts[row * self.classes..(row + 1) * self.classes]
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.counts.chunks(self.classes).map(<[u64]>::to_vec).collect()
    }

    /// `n_i`, the number of test points of class `i`.
    pub fn row_sum(&self, row: usize) -> u64 {
        self.row_sums[row]
    }

    pub fn row_sums(&self) -> &[u64] {
        &self.row_sums
    }

    /// `k_j`, the number of test points predicted as class `j`.
    pub fn col_sum(&self, col: usize) -> u64 {
        self.col_sums[col]
    }

    pub fn col_sums(&self) -> &[u64] {
        &self.col_sums
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn diagonal(&self, class: usize) -> u64 {
        self.get(class, class)
    }

    /// Class-specific accuracy `m_ii / n_i`.
    pub fn class_accuracy(&self, class: usize) -> f64 {
        self.diagonal(class) as f64 / self.row_sum(class) as f64
    }

    /// The per-class test counts as a ratio profile (RRT lives here).
    pub fn test_profile(&self) -> ClassRatioProfile {
        ClassRatioProfile {
            per_class_counts: self.row_sums.clone(),
        }
    }
}

fn check_shape(row_lengths: impl Iterator<Item = usize>, classes: usize) -> Result<()> {
    if classes < 2 {
        return Err(Error::TooFewClasses { found: classes });
    }
    for (row, found) in row_lengths.enumerate() {
        if found != classes {
            return Err(Error::NonSquare {
                row,
                expected: classes,
                found,
            });
        }
    }
    Ok(())
}

impl fmt::Display for ConfusionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.counts.chunks(self.classes).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{row:?}")?;
        }
        write!(f, "]")
    }
}

impl Serialize for ConfusionMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ConfusionMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let grid = Vec::<Vec<i64>>::deserialize(deserializer)?;
        ConfusionMatrix::validate(&grid).map_err(serde::de::Error::custom)
    }
}

/// Per-class counts (training `p_i` or test `n_i`) and their pairwise ratios.
///
/// Over training counts the maximum ratio is the IR; over test counts it is the RRT.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassRatioProfile {
    per_class_counts: Vec<u64>,
}

impl ClassRatioProfile {
    pub fn new(per_class_counts: Vec<u64>) -> Result<Self> {
        if let Some(position) = per_class_counts.iter().position(|&c| c == 0) {
            return Err(Error::ZeroClassCount { position });
        }
        if per_class_counts.len() < 2 {
            return Err(Error::TooFewClasses {
                found: per_class_counts.len(),
            });
        }
        Ok(Self { per_class_counts })
    }

    pub fn counts(&self) -> &[u64] {
        &self.per_class_counts
    }

    /// All ratios `c_i / c_j` for `i != j`.
    pub fn ratio_set(&self) -> Vec<Ratio<u64>> {
        let c = &self.per_class_counts;
        let mut out = Vec::with_capacity(c.len() * (c.len() - 1));
        for (i, &a) in c.iter().enumerate() {
            for (j, &b) in c.iter().enumerate() {
                if i != j {
                    out.push(Ratio::new(a, b));
                }
            }
        }
        out
    }

    pub fn max_ratio(&self) -> Ratio<u64> {
        let max = *self.per_class_counts.iter().max().expect("non-empty");
        let min = *self.per_class_counts.iter().min().expect("non-empty");
        Ratio::new(max, min)
    }
}

/// Largest pairwise ratio of the given per-class counts.
pub fn max_ratio(counts: &[u64]) -> Result<Ratio<u64>> {
    if let Some(position) = counts.iter().position(|&c| c == 0) {
        return Err(Error::ZeroClassCount { position });
    }
    match (counts.iter().max(), counts.iter().min()) {
        (Some(&max), Some(&min)) => Ok(Ratio::new(max, min)),
        _ => Err(Error::TooFewClasses { found: 0 }),
    }
}

/// Positive rational per-row factors `b_i`.
///
/// Multiplying row `i` of a matrix by `b_i` keeps its row profile, so the
/// result is equivalent to the original whenever the products stay integral.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowScaling {
    factors: Vec<Ratio<u64>>,
}

impl RowScaling {
    pub fn new(factors: Vec<Ratio<u64>>) -> Result<Self> {
        if let Some(position) = factors.iter().position(|f| *f.numer() == 0) {
            return Err(Error::NonPositiveFactor { position });
        }
        Ok(Self { factors })
    }

    /// Builds a scaling and checks integrality against `target` up front.
    pub fn for_matrix(factors: Vec<Ratio<u64>>, target: &ConfusionMatrix) -> Result<Self> {
        let scaling = Self::new(factors)?;
        scaling.check(target)?;
        Ok(scaling)
    }

    pub fn from_integers(factors: &[u64]) -> Result<Self> {
        Self::new(factors.iter().map(|&f| Ratio::from_integer(f)).collect())
    }

    pub fn factors(&self) -> &[Ratio<u64>] {
        &self.factors
    }

    pub fn fits(&self, m: &ConfusionMatrix) -> bool {
        self.check(m).is_ok()
    }

    fn check(&self, m: &ConfusionMatrix) -> Result<()> {
        if self.factors.len() != m.class_count() {
            return Err(Error::DimensionMismatch {
                left: m.class_count(),
                right: self.factors.len(),
            });
        }
        for (i, b) in self.factors.iter().enumerate() {
            if let Some(col) = m.row(i).iter().position(|&v| (v * b.numer()) % b.denom() != 0) {
                return Err(Error::NonIntegerResult {
                    row: i,
                    col,
                    factor: b.to_string(),
                });
            }
        }
        Ok(())
    }

    /// Textual factors, e.g. `["1/2", "3"]`, as stored in audit witnesses.
    pub fn to_strings(&self) -> Vec<String> {
        self.factors.iter().map(Ratio::to_string).collect()
    }
}

impl Serialize for RowScaling {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(serializer)
    }
}

/// Multiplies row `i` of `m` by `b_i`.
pub fn apply_scaling(m: &ConfusionMatrix, s: &RowScaling) -> Result<ConfusionMatrix> {
    s.check(m)?;
    let c = m.class_count();
    let mut counts = Vec::with_capacity(c * c);
    for (i, b) in s.factors().iter().enumerate() {
        counts.extend(m.row(i).iter().map(|&v| v * b.numer() / b.denom()));
    }
    ConfusionMatrix::from_flat(c, counts)
}

/// Exact test of `m_ij / n_i == m'_ij / n'_i` for every cell.
pub fn are_equivalent(a: &ConfusionMatrix, b: &ConfusionMatrix) -> Result<bool> {
    if a.class_count() != b.class_count() {
        return Err(Error::DimensionMismatch {
            left: a.class_count(),
            right: b.class_count(),
        });
    }
    Ok((0..a.class_count()).all(|i| {
        let (na, nb) = (a.row_sum(i) as u128, b.row_sum(i) as u128);
        a.row(i)
            .iter()
            .zip(b.row(i))
            .all(|(&x, &y)| x as u128 * nb == y as u128 * na)
    }))
}

/// Tallies `(true, predicted)` label pairs against an ordered class list.
pub fn ingest_labels<S: AsRef<str>>(
    records: impl IntoIterator<Item = (S, S)>,
    class_list: &[String],
) -> Result<ConfusionMatrix> {
    let c = class_list.len();
    if c < 2 {
        return Err(Error::TooFewClasses { found: c });
    }
    let position = |label: &str, record: usize| {
        class_list
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel {
                label: label.to_string(),
                record,
            })
    };
    let mut counts = vec![0u64; c * c];
    for (record, (truth, predicted)) in records.into_iter().enumerate() {
        let i = position(truth.as_ref(), record)?;
        let j = position(predicted.as_ref(), record)?;
        counts[i * c + j] += 1;
    }
    ConfusionMatrix::from_flat(c, counts)
}

/// Classes in order of first appearance, scanning true then predicted label of each record.
pub fn infer_classes<S: AsRef<str>>(records: &[(S, S)]) -> Vec<String> {
    let mut classes: Vec<String> = Vec::new();
    for (t, p) in records {
        for label in [t.as_ref(), p.as_ref()] {
            if !classes.iter().any(|c| c == label) {
                classes.push(label.to_string());
            }
        }
    }
    classes
}

/// Greatest common divisor of a row, 0 for an all-zero row.
pub(crate) fn row_gcd(row: &[u64]) -> u64 {
    row.iter().fold(0u64, |g, &v| g.gcd(&v))
}
