//! Two-dimensional Gaussian class generators and threshold classifiers.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::audit::condition1::trial_rng;
use crate::confusion::ConfusionMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianClassSpec {
    pub mean: [f64; 2],
    /// Diagonal of the covariance matrix.
    pub covariance: [f64; 2],
    pub sample_count: usize,
}

impl GaussianClassSpec {
    pub fn validate(&self) -> std::result::Result<(), String> {
        if !self.covariance.iter().all(|&v| v > 0.0 && v.is_finite()) {
            return Err("covariance entries must be positive".into());
        }
        if !self.mean.iter().all(|v| v.is_finite()) {
            return Err("mean must be finite".into());
        }
        if self.sample_count == 0 {
            return Err("sample_count must be positive".into());
        }
        Ok(())
    }
}

/// Two classes: a wide cluster at `[3, 3]` and a tight one at `[7.5, 3]`, 5000 points each.
pub fn type1_specs() -> Vec<GaussianClassSpec> {
    vec![
        GaussianClassSpec {
            mean: [3.0, 3.0],
            covariance: [0.45, 0.45],
            sample_count: 5000,
        },
        GaussianClassSpec {
            mean: [7.5, 3.0],
            covariance: [0.25, 0.25],
            sample_count: 5000,
        },
    ]
}

pub const HEXAGON_COUNTS: [usize; 6] = [5000, 1500, 4000, 500, 3500, 4500];

/// Six classes on the vertices of a regular hexagon with edge 5, listed anticlockwise.
pub fn hexagon_specs() -> Vec<GaussianClassSpec> {
    let means = [
        [-2.5, -4.33],
        [-5.0, 0.0],
        [-2.5, 4.33],
        [2.5, 4.33],
        [5.0, 0.0],
        [2.5, -4.33],
    ];
    means
        .into_iter()
        .zip(HEXAGON_COUNTS)
        .map(|(mean, sample_count)| GaussianClassSpec {
            mean,
            covariance: [0.08, 0.08],
            sample_count,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub points: Vec<[f64; 2]>,
    pub labels: Vec<usize>,
    pub classes: usize,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.classes];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Positions of the points of class `c`, in order.
    pub fn members(&self, c: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.labels[i] == c).collect()
    }

    pub fn select(&self, keep: &[usize]) -> Dataset {
        Dataset {
            points: keep.iter().map(|&i| self.points[i]).collect(),
            labels: keep.iter().map(|&i| self.labels[i]).collect(),
            classes: self.classes,
        }
    }
}

pub fn sample_gaussians<R: Rng>(rng: &mut R, specs: &[GaussianClassSpec]) -> Dataset {
    let total = specs.iter().map(|s| s.sample_count).sum();
    let mut points = Vec::with_capacity(total);
    let mut labels = Vec::with_capacity(total);
    for (label, s) in specs.iter().enumerate() {
        let sd = [s.covariance[0].sqrt(), s.covariance[1].sqrt()];
        for _ in 0..s.sample_count {
            let z: [f64; 2] = [rng.sample(StandardNormal), rng.sample(StandardNormal)];
            points.push([s.mean[0] + sd[0] * z[0], s.mean[1] + sd[1] * z[1]]);
            labels.push(label);
        }
    }
    Dataset {
        points,
        labels,
        classes: specs.len(),
    }
}

/// Deterministic dataset for `seed`; each class keeps its spec order and count.
pub fn generate_gaussian_dataset(specs: &[GaussianClassSpec], seed: u64) -> Result<Dataset> {
    if specs.len() < 2 {
        return Err(Error::TooFewClasses { found: specs.len() });
    }
    for (i, s) in specs.iter().enumerate() {
        s.validate().map_err(|message| Error::InvalidSpec {
            path: format!("generator[{i}]"),
            message,
        })?;
    }
    Ok(sample_gaussians(&mut trial_rng(seed, 0), specs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    #[default]
    Above,
    Below,
}

/// A vertical decision line `x = threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRule {
    pub threshold: f64,
    pub positive_class: usize,
    /// Which side of the line is predicted positive.
    pub positive_side: Side,
}

impl ThresholdRule {
    pub fn predicts_positive(&self, p: &[f64; 2]) -> bool {
        match self.positive_side {
            Side::Above => p[0] > self.threshold,
            Side::Below => p[0] < self.threshold,
        }
    }
}

/// Two-class confusion matrix of `rule` on `data`, positive class in row 0.
pub fn threshold_classifier_confusion(data: &Dataset, rule: &ThresholdRule) -> Result<ConfusionMatrix> {
    if data.classes != 2 {
        return Err(Error::DimensionMismatch {
            left: 2,
            right: data.classes,
        });
    }
    if rule.positive_class > 1 {
        return Err(Error::InvalidSpec {
            path: "positive_class".into(),
            message: "must be 0 or 1".into(),
        });
    }
    let mut counts = [0u64; 4];
    for (p, &label) in data.points.iter().zip(&data.labels) {
        let row = usize::from(label != rule.positive_class);
        let col = usize::from(!rule.predicts_positive(p));
        counts[row * 2 + col] += 1;
    }
    ConfusionMatrix::from_flat(2, counts.to_vec())
}
