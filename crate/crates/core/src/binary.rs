//! Two-class indices.
//!
//! All functions expect the fixed layout `[[TP, FN], [FP, TN]]` with the
//! positive (minority) class in row 0. There is no smoothing: a vanishing
//! denominator yields [`IndexValue::Undefined`].

use crate::confusion::ConfusionMatrix;
use crate::error::{Error, Result};
use crate::index::{IndexId, IndexValue, Outcome, UndefinedReason};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BinaryCounts {
    pub tp: u64,
    pub fn_: u64,
    pub fp: u64,
    pub tn: u64,
}

impl BinaryCounts {
    pub fn from_matrix(m: &ConfusionMatrix, index: IndexId) -> Result<Self> {
        if m.class_count() != 2 {
            return Err(Error::NotTwoClass {
                index,
                found: m.class_count(),
            });
        }
        Ok(Self {
            tp: m.get(0, 0),
            fn_: m.get(0, 1),
            fp: m.get(1, 0),
            tn: m.get(1, 1),
        })
    }

    fn n1(&self) -> u64 {
        self.tp + self.fn_
    }

    fn n2(&self) -> u64 {
        self.fp + self.tn
    }
}

pub(crate) fn recall_kernel<S: Scalar>(c: &BinaryCounts) -> S {
    S::ratio(c.tp, c.n1())
}

pub(crate) fn specificity_kernel<S: Scalar>(c: &BinaryCounts) -> S {
    S::ratio(c.tn, c.n2())
}

/// Product of the two class accuracies; the GMean is its square root.
pub(crate) fn gmean2_squared_kernel<S: Scalar>(c: &BinaryCounts) -> S {
    recall_kernel::<S>(c) * specificity_kernel(c)
}

pub(crate) fn auroc_kernel<S: Scalar>(c: &BinaryCounts) -> S {
    (recall_kernel::<S>(c) + specificity_kernel(c)) / S::from_count(2)
}

pub(crate) fn precision_kernel<S: Scalar>(c: &BinaryCounts) -> Outcome<S> {
    if c.tp + c.fp == 0 {
        return Err(UndefinedReason::NoPositivePredictions);
    }
    Ok(S::ratio(c.tp, c.tp + c.fp))
}

pub(crate) fn aurpc_kernel<S: Scalar>(c: &BinaryCounts) -> Outcome<S> {
    Ok((recall_kernel::<S>(c) + precision_kernel(c)?) / S::from_count(2))
}

pub(crate) fn m_precision_kernel<S: Scalar>(c: &BinaryCounts) -> Outcome<S> {
    let tpr: S = S::ratio(c.tp, c.n1());
    let fpr: S = S::ratio(c.fp, c.n2());
    let denom = tpr.clone() + fpr;
    if denom.is_zero() {
        return Err(UndefinedReason::NoPositiveRatePredictions);
    }
    Ok(tpr / denom)
}

pub(crate) fn m_aurpc_kernel<S: Scalar>(c: &BinaryCounts) -> Outcome<S> {
    Ok((recall_kernel::<S>(c) + m_precision_kernel(c)?) / S::from_count(2))
}

fn counts(m: &ConfusionMatrix, index: IndexId) -> Result<BinaryCounts> {
    BinaryCounts::from_matrix(m, index)
}

/// Geometric mean of recall and specificity.
pub fn gmean2(m: &ConfusionMatrix) -> Result<IndexValue> {
    let c = counts(m, IndexId::GMean2)?;
    Ok(IndexValue::Defined(gmean2_squared_kernel::<f64>(&c).sqrt()))
}

/// Discrete AUROC: arithmetic mean of recall and specificity.
pub fn auroc(m: &ConfusionMatrix) -> Result<IndexValue> {
    Ok(IndexValue::Defined(auroc_kernel::<f64>(&counts(m, IndexId::Auroc)?)))
}

pub fn precision(m: &ConfusionMatrix) -> Result<IndexValue> {
    Ok(precision_kernel::<f64>(&counts(m, IndexId::Precision)?).into())
}

pub fn recall(m: &ConfusionMatrix) -> Result<IndexValue> {
    Ok(IndexValue::Defined(recall_kernel::<f64>(&counts(m, IndexId::Recall)?)))
}

pub fn specificity(m: &ConfusionMatrix) -> Result<IndexValue> {
    Ok(IndexValue::Defined(specificity_kernel::<f64>(&counts(m, IndexId::Specificity)?)))
}

/// Discrete AURPC: mean of recall and precision.
pub fn aurpc(m: &ConfusionMatrix) -> Result<IndexValue> {
    Ok(aurpc_kernel::<f64>(&counts(m, IndexId::Aurpc)?).into())
}

/// Precision computed from class-conditional rates instead of raw counts.
pub fn m_precision(m: &ConfusionMatrix) -> Result<IndexValue> {
    Ok(m_precision_kernel::<f64>(&counts(m, IndexId::MPrecision)?).into())
}

pub fn m_aurpc(m: &ConfusionMatrix) -> Result<IndexValue> {
    Ok(m_aurpc_kernel::<f64>(&counts(m, IndexId::MAurpc)?).into())
}
