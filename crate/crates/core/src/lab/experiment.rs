//! Declarative distortion experiments and their tabular results.

use std::collections::BTreeMap;
use std::io::Write;

use num::{BigRational, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gaussian::{sample_gaussians, threshold_classifier_confusion, type1_specs, GaussianClassSpec, Side, ThresholdRule};
use super::resample::{resample_matrix_to_counts, resample_matrix_to_rrt, resample_points_to_rrt, synthetic_multiclass_confusion};
use crate::audit::condition1::{trial_rng, DEFAULT_SEED};
use crate::confusion::{max_ratio, ConfusionMatrix};
use crate::error::{Error, Result};
use crate::index::{IndexId, IndexValue};
use crate::multiclass::theoretical_bounds;

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "one")]
    pub trials: usize,
    /// Empty means every index applicable to the data.
    #[serde(default)]
    pub indices: Vec<IndexId>,
    #[serde(flatten)]
    pub kind: ExperimentKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Threshold classifiers on two Gaussian classes, test sets subsampled to each ratio.
    Type1Sweep(PointSweep),
    /// Fixed per-class accuracy on a growing number of classes.
    Type2Growth(Growth),
    RrtStability(Stability),
}

fn default_positive() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSweep {
    #[serde(default = "type1_specs")]
    pub generator: Vec<GaussianClassSpec>,
    pub thresholds: Vec<f64>,
    pub rrt: Vec<f64>,
    /// The positive class is the minority; the other class is the majority.
    #[serde(default = "default_positive")]
    pub positive_class: usize,
    #[serde(default)]
    pub positive_side: Side,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Growth {
    pub profiles: Vec<Vec<u64>>,
    pub accuracies: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityMode {
    Matrix,
    Point,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stability {
    pub mode: StabilityMode,
    #[serde(default)]
    pub datasets: Vec<MatrixDataset>,
    #[serde(default)]
    pub point: Option<PointSweep>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixDataset {
    pub name: String,
    pub matrix: Vec<Vec<u64>>,
    pub schedule: Vec<ScheduleEntry>,
}

/// One test set of a schedule: a target ratio, or explicit per-class counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScheduleEntry {
    Rrt { rrt: f64 },
    Counts { counts: Vec<u64> },
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::InvalidSpec {
        path: path.into(),
        message: message.into(),
    }
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text).map_err(|e| invalid(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(invalid("name", "must not be empty"));
        }
        if self.trials == 0 {
            return Err(invalid("trials", "must be at least 1"));
        }
        match &self.kind {
            ExperimentKind::Type1Sweep(p) => {
                p.validate("")?;
                self.check_indices(&[2], "")
            }
            ExperimentKind::Type2Growth(g) => {
                if g.profiles.is_empty() {
                    return Err(invalid("profiles", "must not be empty"));
                }
                for (i, p) in g.profiles.iter().enumerate() {
                    if p.len() < 2 {
                        return Err(invalid(format!("profiles[{i}]"), "needs at least 2 classes"));
                    }
                    if p.contains(&0) {
                        return Err(invalid(format!("profiles[{i}]"), "class counts must be positive"));
                    }
                }
                if g.accuracies.is_empty() {
                    return Err(invalid("accuracies", "must not be empty"));
                }
                for (i, a) in g.accuracies.iter().enumerate() {
                    if !(0.0..=1.0).contains(a) {
                        return Err(invalid(format!("accuracies[{i}]"), "must lie in [0, 1]"));
                    }
                }
                let sizes: Vec<usize> = g.profiles.iter().map(Vec::len).collect();
                self.check_indices(&sizes, "")
            }
            ExperimentKind::RrtStability(s) => match s.mode {
                StabilityMode::Point => {
                    let p = s.point.as_ref().ok_or_else(|| invalid("point", "required in point mode"))?;
                    p.validate("point.")?;
                    self.check_indices(&[2], "")
                }
                StabilityMode::Matrix => {
                    if s.datasets.is_empty() {
                        return Err(invalid("datasets", "required in matrix mode"));
                    }
                    let mut sizes = Vec::new();
                    for (i, d) in s.datasets.iter().enumerate() {
                        let m = ConfusionMatrix::new(d.matrix.clone())
                            .map_err(|e| invalid(format!("datasets[{i}].matrix"), e.to_string()))?;
                        if d.schedule.is_empty() {
                            return Err(invalid(format!("datasets[{i}].schedule"), "must not be empty"));
                        }
                        for (j, entry) in d.schedule.iter().enumerate() {
                            let path = format!("datasets[{i}].schedule[{j}]");
                            match entry {
                                ScheduleEntry::Rrt { rrt } if !(rrt.is_finite() && *rrt > 0.0) => {
                                    return Err(invalid(path + ".rrt", "must be positive"))
                                }
                                ScheduleEntry::Counts { counts } if counts.len() != m.class_count() => {
                                    return Err(invalid(
                                        path + ".counts",
                                        format!("expected {} counts, found {}", m.class_count(), counts.len()),
                                    ))
                                }
                                ScheduleEntry::Counts { counts } if counts.contains(&0) => {
                                    return Err(invalid(path + ".counts", "counts must be positive"))
                                }
                                _ => {}
                            }
                        }
                        sizes.push(m.class_count());
                    }
                    self.check_indices(&sizes, "")
                }
            },
        }
    }

    fn check_indices(&self, class_counts: &[usize], prefix: &str) -> Result<()> {
        for (i, id) in self.indices.iter().enumerate() {
            if let Some(&c) = class_counts.iter().find(|&&c| !id.applies_to(c)) {
                return Err(invalid(
                    format!("{prefix}indices[{i}]"),
                    format!("{id} does not apply to {c}-class data"),
                ));
            }
        }
        Ok(())
    }

    fn indices_for(&self, classes: usize) -> Vec<IndexId> {
        if self.indices.is_empty() {
            IndexId::ALL.into_iter().filter(|id| id.applies_to(classes)).collect()
        } else {
            self.indices.clone()
        }
    }
}

impl PointSweep {
    fn validate(&self, prefix: &str) -> Result<()> {
        if self.generator.len() != 2 {
            return Err(invalid(format!("{prefix}generator"), "needs exactly 2 classes"));
        }
        for (i, g) in self.generator.iter().enumerate() {
            g.validate().map_err(|m| invalid(format!("{prefix}generator[{i}]"), m))?;
        }
        if self.thresholds.is_empty() {
            return Err(invalid(format!("{prefix}thresholds"), "must not be empty"));
        }
        if self.rrt.is_empty() {
            return Err(invalid(format!("{prefix}rrt"), "must not be empty"));
        }
        for (i, r) in self.rrt.iter().enumerate() {
            if !(r.is_finite() && *r > 0.0) {
                return Err(invalid(format!("{prefix}rrt[{i}]"), "must be positive"));
            }
        }
        if self.positive_class > 1 {
            return Err(invalid(format!("{prefix}positive_class"), "must be 0 or 1"));
        }
        Ok(())
    }
}

/// One cell of the long-form table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub experiment: String,
    pub trial: usize,
    pub setting: String,
    pub rrt_or_c: f64,
    pub index: IndexId,
    pub value: Option<f64>,
    pub status: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    /// Mean over trials at one schedule point.
    Mean,
    /// Population standard deviation of the means over the schedule.
    StdDev,
    /// Smallest value over all settings at one class count.
    Min,
    TheoreticalMin,
}

impl Statistic {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Mean => "mean",
            Self::StdDev => "std_dev",
            Self::Min => "min",
            Self::TheoreticalMin => "theoretical_min",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub experiment: String,
    pub setting: String,
    pub index: IndexId,
    pub statistic: Statistic,
    pub rrt_or_c: Option<f64>,
    pub value: Option<f64>,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub name: String,
    pub rows: Vec<ResultRow>,
    pub summary: Vec<SummaryRow>,
}

const OK: &str = "ok";

fn cell(spec: &ExperimentSpec, trial: usize, setting: &str, x: f64, index: IndexId, v: Result<IndexValue>) -> ResultRow {
    let (value, status) = match v {
        Ok(IndexValue::Defined(v)) => (Some(v), OK.to_string()),
        Ok(IndexValue::Undefined(r)) => (None, r.to_string()),
        Err(e) => (None, e.to_string()),
    };
    ResultRow {
        experiment: spec.name.clone(),
        trial,
        setting: setting.to_string(),
        rrt_or_c: x,
        index,
        value,
        status,
    }
}

fn matrix_cells(
    spec: &ExperimentSpec,
    trial: usize,
    setting: &str,
    x: f64,
    indices: &[IndexId],
    m: &Result<ConfusionMatrix>,
) -> Vec<ResultRow> {
    indices
        .iter()
        .map(|&id| {
            let v = match m {
                Ok(m) => id.evaluate(m),
                Err(e) => Err(Error::InvalidSpec {
                    path: setting.to_string(),
                    message: e.to_string(),
                }),
            };
            cell(spec, trial, setting, x, id, v)
        })
        .collect()
}

fn threshold_setting(t: f64) -> String {
    format!("threshold={t}")
}

fn run_point_sweep(spec: &ExperimentSpec, p: &PointSweep) -> Vec<ResultRow> {
    let indices = spec.indices_for(2);
    let majority = 1 - p.positive_class;
    let per_trial: Vec<Vec<ResultRow>> = (0..spec.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(spec.seed, trial as u64);
            let data = sample_gaussians(&mut rng, &p.generator);
            let mut rows = Vec::new();
            for &r in &p.rrt {
                let test = resample_points_to_rrt(&mut rng, &data, majority, p.positive_class, r);
                for &t in &p.thresholds {
                    let rule = ThresholdRule {
                        threshold: t,
                        positive_class: p.positive_class,
                        positive_side: p.positive_side,
                    };
                    let m = match &test {
                        Ok(d) => threshold_classifier_confusion(d, &rule),
                        Err(e) => Err(Error::UnachievableRrt {
                            target: r.to_string(),
                            detail: e.to_string(),
                        }),
                    };
                    rows.extend(matrix_cells(spec, trial, &threshold_setting(t), r, &indices, &m));
                }
            }
            rows
        })
        .collect();
    per_trial.into_iter().flatten().collect()
}

/// Class ratio of a matrix's rows: `n_1 / n_0` for two classes, the largest pairwise ratio otherwise.
fn realised_rrt(counts: &[u64]) -> f64 {
    if counts.len() == 2 {
        counts[1] as f64 / counts[0] as f64
    } else {
        max_ratio(counts).map_or(f64::NAN, |r| *r.numer() as f64 / *r.denom() as f64)
    }
}

fn run_matrix_stability(spec: &ExperimentSpec, s: &Stability) -> Vec<ResultRow> {
    let mut rows = Vec::new();
    for d in &s.datasets {
        let base = ConfusionMatrix::new(d.matrix.clone()).expect("validated");
        let indices = spec.indices_for(base.class_count());
        for entry in &d.schedule {
            let (m, x) = match entry {
                ScheduleEntry::Rrt { rrt } => (resample_matrix_to_rrt(&base, *rrt), *rrt),
                ScheduleEntry::Counts { counts } => (resample_matrix_to_counts(&base, counts), realised_rrt(counts)),
            };
            rows.extend(matrix_cells(spec, 0, &d.name, x, &indices, &m));
        }
    }
    rows
}

fn accuracy_setting(a: f64) -> String {
    format!("accuracy={a}")
}

fn run_growth(spec: &ExperimentSpec, g: &Growth) -> Vec<ResultRow> {
    let mut rows = Vec::new();
    for &a in &g.accuracies {
        for profile in &g.profiles {
            let m = synthetic_multiclass_confusion(a, profile);
            let indices = spec.indices_for(profile.len());
            rows.extend(matrix_cells(spec, 0, &accuracy_setting(a), profile.len() as f64, &indices, &m));
        }
    }
    rows
}

/// Population standard deviation, computed exactly on the given floats.
pub fn population_std_dev(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let exact: Vec<BigRational> = values
        .iter()
        .map(|&v| BigRational::from_float(v).expect("finite value"))
        .collect();
    let n = BigRational::from_integer(values.len().into());
    let mean = exact.iter().fold(BigRational::zero(), |a, b| a + b) / &n;
    let var = exact
        .iter()
        .map(|x| (x - &mean) * (x - &mean))
        .fold(BigRational::zero(), |a, b| a + b)
        / n;
    if var.is_zero() {
        0.0
    } else {
        var.to_f64().unwrap_or(f64::NAN).sqrt()
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Schedule point, defined values, undefined count.
type Cell = (f64, Vec<f64>, usize);

fn summarise(spec: &ExperimentSpec, rows: &[ResultRow]) -> Vec<SummaryRow> {
    // (setting order, index order) -> schedule point -> defined values
    let mut settings: Vec<String> = Vec::new();
    let mut cells: BTreeMap<(usize, IndexId), Vec<Cell>> = BTreeMap::new();
    for r in rows {
        let s = settings.iter().position(|x| *x == r.setting).unwrap_or_else(|| {
            settings.push(r.setting.clone());
            settings.len() - 1
        });
        let points = cells.entry((s, r.index)).or_default();
        let slot = match points.iter().position(|(x, _, _)| x.to_bits() == r.rrt_or_c.to_bits()) {
            Some(p) => p,
            None => {
                points.push((r.rrt_or_c, Vec::new(), 0));
                points.len() - 1
            }
        };
        match r.value {
            Some(v) => points[slot].1.push(v),
            None => points[slot].2 += 1,
        }
    }

    let row = |setting: &str, index, statistic, x, value: Option<f64>, status: String| SummaryRow {
        experiment: spec.name.clone(),
        setting: setting.to_string(),
        index,
        statistic,
        rrt_or_c: x,
        value,
        status,
    };
    let mut out = Vec::new();
    let mut minima: BTreeMap<(u64, IndexId), f64> = BTreeMap::new();
    for ((s, index), points) in &cells {
        let setting = &settings[*s];
        let mut means = Vec::with_capacity(points.len());
        for (x, values, undefined) in points {
            if values.is_empty() {
                out.push(row(setting, *index, Statistic::Mean, Some(*x), None, "UNDEFINED in every trial".into()));
                continue;
            }
            let m = mean(values);
            means.push(m);
            let status = if *undefined > 0 {
                format!("{undefined} undefined trials excluded")
            } else {
                OK.to_string()
            };
            out.push(row(setting, *index, Statistic::Mean, Some(*x), Some(m), status));
            let key = (x.to_bits(), *index);
            minima.entry(key).and_modify(|v| *v = v.min(m)).or_insert(m);
        }
        if means.len() == points.len() {
            out.push(row(setting, *index, Statistic::StdDev, None, Some(population_std_dev(&means)), OK.into()));
        } else {
            out.push(row(setting, *index, Statistic::StdDev, None, None, "undefined at some schedule points".into()));
        }
    }

    if let ExperimentKind::Type2Growth(g) = &spec.kind {
        for profile in &g.profiles {
            let c = profile.len();
            for index in spec.indices_for(c) {
                let x = c as f64;
                let min = minima.get(&(x.to_bits(), index)).copied();
                let status = if min.is_some() { OK } else { "UNDEFINED" };
                out.push(row("all", index, Statistic::Min, Some(x), min, status.into()));
                match theoretical_bounds(index, c, Some(profile)) {
                    Ok((lo, _)) => out.push(row("all", index, Statistic::TheoreticalMin, Some(x), Some(lo), OK.into())),
                    Err(e) => out.push(row("all", index, Statistic::TheoreticalMin, Some(x), None, e.to_string())),
                }
            }
        }
    }
    out
}

/// Runs an experiment. Cells that cannot be computed are recorded as undefined.
///
/// Output is identical for identical specs: each trial draws from its own
/// stream derived from the seed and results are gathered in trial order.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    spec.validate()?;
    let rows = match &spec.kind {
        ExperimentKind::Type1Sweep(p) => run_point_sweep(spec, p),
        ExperimentKind::Type2Growth(g) => run_growth(spec, g),
        ExperimentKind::RrtStability(s) => match s.mode {
            StabilityMode::Matrix => run_matrix_stability(spec, s),
            StabilityMode::Point => run_point_sweep(spec, s.point.as_ref().expect("validated")),
        },
    };
    let summary = summarise(spec, &rows);
    Ok(ExperimentResult {
        name: spec.name.clone(),
        rows,
        summary,
    })
}

fn fmt_value(v: Option<f64>) -> String {
    v.map_or_else(|| "UNDEFINED".to_string(), |v| v.to_string())
}

pub fn write_long_csv<W: Write>(out: W, result: &ExperimentResult) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["experiment", "trial", "setting", "rrt_or_c", "index", "value", "status"])?;
    for r in &result.rows {
        w.write_record([
            r.experiment.clone(),
            r.trial.to_string(),
            r.setting.clone(),
            r.rrt_or_c.to_string(),
            r.index.to_string(),
            fmt_value(r.value),
            r.status.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_csv<W: Write>(out: W, result: &ExperimentResult) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["experiment", "setting", "index", "statistic", "rrt_or_c", "value", "status"])?;
    for r in &result.summary {
        w.write_record([
            r.experiment.clone(),
            r.setting.clone(),
            r.index.to_string(),
            r.statistic.as_str().to_string(),
            r.rrt_or_c.map_or_else(String::new, |x| x.to_string()),
            fmt_value(r.value),
            r.status.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

impl ExperimentResult {
    /// Summary value for one cell, if present and defined.
    pub fn summary_value(&self, setting: &str, index: IndexId, statistic: Statistic, x: Option<f64>) -> Option<f64> {
        self.summary
            .iter()
            .find(|r| {
                r.setting == setting
                    && r.index == index
                    && r.statistic == statistic
                    && r.rrt_or_c.map(f64::to_bits) == x.map(f64::to_bits)
            })
            .and_then(|r| r.value)
    }

    /// Mean of the standard deviations per index, over every setting where it is defined.
    pub fn digest(&self) -> Vec<(IndexId, Option<f64>)> {
        let mut acc: BTreeMap<IndexId, Vec<f64>> = BTreeMap::new();
        for r in self.summary.iter().filter(|r| r.statistic == Statistic::StdDev) {
            let entry = acc.entry(r.index).or_default();
            if let Some(v) = r.value {
                entry.push(v);
            }
        }
        acc.into_iter()
            .map(|(id, v)| (id, (!v.is_empty()).then(|| mean(&v))))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizedRow {
    pub index: IndexId,
    pub dataset: String,
    pub std_dev: Option<f64>,
    /// `None` when the normalizer is zero or the std-dev is undefined.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizedStability {
    pub rows: Vec<NormalizedRow>,
    /// Indices whose smallest std-dev across datasets is zero.
    pub degenerate: Vec<IndexId>,
}

/// Each index's per-dataset std-dev divided by its smallest std-dev across datasets.
pub fn normalized_stability(result: &ExperimentResult, indices: &[IndexId]) -> Result<NormalizedStability> {
    let mut rows = Vec::new();
    let mut degenerate = Vec::new();
    for &index in indices {
        let per_dataset: Vec<(&str, Option<f64>)> = result
            .summary
            .iter()
            .filter(|r| r.index == index && r.statistic == Statistic::StdDev)
            .map(|r| (r.setting.as_str(), r.value))
            .collect();
        if per_dataset.len() < 2 {
            return Err(invalid(
                format!("{index}"),
                format!("needs std-devs on at least 2 datasets, found {}", per_dataset.len()),
            ));
        }
        let min = per_dataset
            .iter()
            .filter_map(|(_, v)| *v)
            .fold(f64::INFINITY, f64::min);
        let usable = min.is_finite() && min > 0.0;
        if !usable {
            degenerate.push(index);
        }
        rows.extend(per_dataset.into_iter().map(|(dataset, std_dev)| NormalizedRow {
            index,
            dataset: dataset.to_string(),
            std_dev,
            ratio: std_dev.filter(|_| usable).map(|s| s / min),
        }));
    }
    Ok(NormalizedStability { rows, degenerate })
}
