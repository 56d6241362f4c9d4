//! Changing the class ratio of a test set, on points or directly on a matrix.
//!
//! Nothing is ever oversampled: reaching a ratio always means removing points
//! from one class.

use num::rational::Ratio;
use rand::seq::index::sample;
use rand::Rng;

use super::gaussian::Dataset;
use crate::audit::condition3::spread_row;
use crate::confusion::{apply_scaling, ConfusionMatrix, RowScaling};
use crate::error::{Error, Result};

const INTEGRAL_SLACK: f64 = 1e-9;

fn unachievable(target: f64, detail: impl Into<String>) -> Error {
    Error::UnachievableRrt {
        target: target.to_string(),
        detail: detail.into(),
    }
}

/// Class sizes `(majority, minority)` realising `majority / minority = rrt`.
///
/// When the target is at or above the current ratio the minority class
/// shrinks; below it the majority class shrinks.
pub fn rrt_counts(majority: usize, minority: usize, rrt: f64) -> Result<(usize, usize)> {
    if !(rrt.is_finite() && rrt > 0.0) {
        return Err(unachievable(rrt, "ratio must be positive"));
    }
    if majority == 0 || minority == 0 {
        return Err(unachievable(rrt, "both classes need points"));
    }
    let current = majority as f64 / minority as f64;
    let (maj, min) = if rrt >= current {
        (majority, (majority as f64 / rrt).round() as usize)
    } else {
        ((rrt * minority as f64).round() as usize, minority)
    };
    if maj == 0 || min == 0 {
        return Err(unachievable(
            rrt,
            format!("{majority}/{minority} points would leave an empty class"),
        ));
    }
    Ok((maj, min))
}

/// Uniformly subsamples each class without replacement to `counts[c]` points.
/// The output keeps the input order.
pub fn subsample_to_counts<R: Rng>(rng: &mut R, data: &Dataset, counts: &[usize]) -> Result<Dataset> {
    if counts.len() != data.classes {
        return Err(Error::DimensionMismatch {
            left: data.classes,
            right: counts.len(),
        });
    }
    let mut keep = Vec::with_capacity(counts.iter().sum());
    for (c, &want) in counts.iter().enumerate() {
        let members = data.members(c);
        if want > members.len() {
            return Err(Error::UnachievableRrt {
                target: format!("{counts:?}"),
                detail: format!("class {c} has {} points, {want} requested", members.len()),
            });
        }
        keep.extend(sample(rng, members.len(), want).into_iter().map(|k| members[k]));
    }
    keep.sort_unstable();
    Ok(data.select(&keep))
}

pub fn resample_points_to_rrt<R: Rng>(
    rng: &mut R,
    data: &Dataset,
    majority_class: usize,
    minority_class: usize,
    rrt: f64,
) -> Result<Dataset> {
    let mut counts = data.class_counts();
    let (maj, min) = rrt_counts(counts[majority_class], counts[minority_class], rrt)?;
    counts[majority_class] = maj;
    counts[minority_class] = min;
    subsample_to_counts(rng, data, &counts)
}

fn integral_target(x: f64, what: impl FnOnce() -> String) -> Result<u64> {
    let r = x.round();
    if r < 1.0 || (x - r).abs() > INTEGRAL_SLACK {
        return Err(Error::IntegralityImpossible { what: what() });
    }
    Ok(r as u64)
}

/// Rescales every row to `counts[i]` points, keeping each row profile exactly.
pub fn resample_matrix_to_counts(m: &ConfusionMatrix, counts: &[u64]) -> Result<ConfusionMatrix> {
    if counts.len() != m.class_count() {
        return Err(Error::DimensionMismatch {
            left: m.class_count(),
            right: counts.len(),
        });
    }
    if let Some(position) = counts.iter().position(|&c| c == 0) {
        return Err(Error::ZeroClassCount { position });
    }
    let factors = counts
        .iter()
        .zip(m.row_sums())
        .map(|(&want, &have)| Ratio::new(want, have))
        .collect();
    apply_scaling(m, &RowScaling::new(factors)?)
}

/// Keeps row 0 (the minority) and rescales every other row to `rrt · n_0` points.
pub fn resample_matrix_to_rrt(m: &ConfusionMatrix, rrt: f64) -> Result<ConfusionMatrix> {
    if !(rrt.is_finite() && rrt > 0.0) {
        return Err(unachievable(rrt, "ratio must be positive"));
    }
    let n0 = m.row_sum(0);
    let target = integral_target(rrt * n0 as f64, || format!("{rrt} times {n0} points"))?;
    let mut counts = vec![target; m.class_count()];
    counts[0] = n0;
    resample_matrix_to_counts(m, &counts)
}

/// A matrix with `accuracy · n_i` on the diagonal and the rest of each row
/// spread evenly over the other classes, remainder to the lowest index.
pub fn synthetic_multiclass_confusion(accuracy: f64, profile: &[u64]) -> Result<ConfusionMatrix> {
    let c = profile.len();
    if c < 2 {
        return Err(Error::TooFewClasses { found: c });
    }
    if !(0.0..=1.0).contains(&accuracy) {
        return Err(Error::IntegralityImpossible {
            what: format!("accuracy {accuracy} outside [0, 1]"),
        });
    }
    if let Some(position) = profile.iter().position(|&n| n == 0) {
        return Err(Error::ZeroClassCount { position });
    }
    let mut counts = Vec::with_capacity(c * c);
    for (i, &n) in profile.iter().enumerate() {
        let x = accuracy * n as f64;
        let diag = x.round();
        if (x - diag).abs() > INTEGRAL_SLACK {
            return Err(Error::IntegralityImpossible {
                what: format!("accuracy {accuracy} of {n} points in class {i}"),
            });
        }
        let diag = diag as u64;
        counts.extend(spread_row(c, i, diag, n - diag));
    }
    ConfusionMatrix::from_flat(c, counts)
}
