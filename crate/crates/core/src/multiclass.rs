//! Multi-class indices and their closed-form bounds.

use crate::confusion::ConfusionMatrix;
use crate::error::{Error, Result};
use crate::index::{IndexId, IndexValue, Outcome, UndefinedReason};
use crate::scalar::Scalar;

fn class_accuracy<S: Scalar>(m: &ConfusionMatrix, i: usize) -> S {
    S::ratio(m.diagonal(i), m.row_sum(i))
}

/// Product of class accuracies; the GMean is its `C`-th root.
pub(crate) fn gmean_product_kernel<S: Scalar>(m: &ConfusionMatrix) -> S {
    (0..m.class_count()).fold(S::one(), |acc, i| acc * class_accuracy(m, i))
}

pub(crate) fn acsa_kernel<S: Scalar>(m: &ConfusionMatrix) -> S {
    let c = m.class_count();
    let sum = (0..c).fold(S::zero(), |acc, i| acc + class_accuracy(m, i));
    sum / S::from_count(c as u64)
}

pub(crate) fn auroc_ovo_kernel<S: Scalar>(m: &ConfusionMatrix) -> S {
    let c = m.class_count();
    let spread = S::from_count(c as u64 - 1);
    let mut sum = S::zero();
    for i in 0..c {
        let false_pos = (0..c)
            .filter(|&j| j != i)
            .fold(S::zero(), |acc, j| acc + S::ratio(m.get(j, i), m.row_sum(j)) / spread.clone());
        sum = sum + S::one() + class_accuracy(m, i) - false_pos;
    }
    sum / S::from_count(2 * c as u64)
}

pub(crate) fn auroc_ova_kernel<S: Scalar>(m: &ConfusionMatrix) -> S {
    let c = m.class_count();
    let mut sum = S::zero();
    for i in 0..c {
        let false_pos = S::ratio(m.col_sum(i) - m.diagonal(i), m.total() - m.row_sum(i));
        sum = sum + S::one() + class_accuracy(m, i) - false_pos;
    }
    sum / S::from_count(2 * c as u64)
}

/// `λ_C = (C − 2) / (2C)`.
pub fn ova_normalizer<S: Scalar>(classes: usize) -> S {
    S::ratio(classes as u64 - 2, 2 * classes as u64)
}

pub(crate) fn n_auroc_ova_kernel<S: Scalar>(m: &ConfusionMatrix) -> S {
    let lambda: S = ova_normalizer(m.class_count());
    (auroc_ova_kernel::<S>(m) - lambda.clone()) / (S::one() - lambda)
}

pub(crate) fn aurpc_ova_kernel<S: Scalar>(m: &ConfusionMatrix) -> Outcome<S> {
    let c = m.class_count();
    let mut sum = S::zero();
    for i in 0..c {
        if m.col_sum(i) == 0 {
            return Err(UndefinedReason::ClassNeverPredicted(i));
        }
        sum = sum + S::ratio(m.diagonal(i), m.col_sum(i)) + class_accuracy(m, i);
    }
    Ok(sum / S::from_count(2 * c as u64))
}

pub(crate) fn m_aurpc_ova_kernel<S: Scalar>(m: &ConfusionMatrix) -> Outcome<S> {
    let c = m.class_count();
    let mut sum = S::zero();
    for i in 0..c {
        let rate_column = (0..c).fold(S::zero(), |acc, j| acc + S::ratio(m.get(j, i), m.row_sum(j)));
        if rate_column.is_zero() {
            return Err(UndefinedReason::RateColumnZero(i));
        }
        let acc: S = class_accuracy(m, i);
        sum = sum + acc.clone() / rate_column + acc;
    }
    Ok(sum / S::from_count(2 * c as u64))
}

/// Geometric mean of class accuracies; 0 as soon as one class is never correct.
pub fn gmean_c(m: &ConfusionMatrix) -> IndexValue {
    let c = m.class_count() as f64;
    IndexValue::Defined(gmean_product_kernel::<f64>(m).powf(1.0 / c))
}

/// Average class-specific accuracy.
pub fn acsa(m: &ConfusionMatrix) -> IndexValue {
    IndexValue::Defined(acsa_kernel::<f64>(m))
}

pub fn auroc_ovo(m: &ConfusionMatrix) -> IndexValue {
    IndexValue::Defined(auroc_ovo_kernel::<f64>(m))
}

pub fn auroc_ova(m: &ConfusionMatrix) -> IndexValue {
    IndexValue::Defined(auroc_ova_kernel::<f64>(m))
}

/// AUROC-OVA shifted and rescaled by `λ_C`. May in principle drop below 0.
pub fn n_auroc_ova(m: &ConfusionMatrix) -> IndexValue {
    IndexValue::Defined(n_auroc_ova_kernel::<f64>(m))
}

pub fn aurpc_ova(m: &ConfusionMatrix) -> IndexValue {
    aurpc_ova_kernel::<f64>(m).into()
}

pub fn m_aurpc_ova(m: &ConfusionMatrix) -> IndexValue {
    m_aurpc_ova_kernel::<f64>(m).into()
}

/// Closed-form `(lower, upper)` bounds of an index over all `C`-class matrices.
///
/// Only AUROC-OVA needs the test-set profile; it is sorted ascending before
/// the bound is computed. Two-class indices accept `C = 2` only.
pub fn theoretical_bounds(index: IndexId, classes: usize, profile: Option<&[u64]>) -> Result<(f64, f64)> {
    if classes < 2 {
        return Err(Error::TooFewClasses { found: classes });
    }
    if index.is_binary() && classes != 2 {
        return Err(Error::NotTwoClass { index, found: classes });
    }
    let c = classes as f64;
    let lower = match index {
        IndexId::AurocOvo => (c - 2.0) / (2.0 * (c - 1.0)),
        IndexId::AurocOva => {
            let profile = profile.ok_or(Error::ProfileRequired { index })?;
            auroc_ova_lower_bound(profile)?
        }
        _ => 0.0,
    };
    Ok((lower, 1.0))
}

/// `(1/2C)(C − 1 − n_C / (n − n_{C−1}))` over the ascending-sorted profile.
pub fn auroc_ova_lower_bound(profile: &[u64]) -> Result<f64> {
    if profile.len() < 2 {
        return Err(Error::TooFewClasses { found: profile.len() });
    }
    if let Some(position) = profile.iter().position(|&n| n == 0) {
        return Err(Error::ZeroClassCount { position });
    }
    let mut sorted = profile.to_vec();
    sorted.sort_unstable();
    let c = sorted.len();
    let n: u64 = sorted.iter().sum();
    let largest = sorted[c - 1] as f64;
    let runner_up = sorted[c - 2];
    Ok((c as f64 - 1.0 - largest / (n - runner_up) as f64) / (2.0 * c as f64))
}
