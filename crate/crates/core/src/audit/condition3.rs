//! Behaviour when one class collapses (Condition 3).

use num::integer::lcm;
use num::rational::Ratio;
use num::{One, Zero};
use serde::Serialize;

use crate::confusion::ConfusionMatrix;
use crate::error::{Error, Result};
use crate::index::IndexId;
use crate::multiclass::theoretical_bounds;

/// Tolerance for deciding that a limit sits on the lower bound.
pub const LIMIT_TOLERANCE: f64 = 1e-9;

/// Matrices in which class `collapsed_class` is recognised at rate `ε` and every
/// other class at rate `1 − ε`, for a decreasing schedule of `ε`.
#[derive(Debug, Clone, Serialize)]
pub struct CollapseFamily {
    pub class_count: usize,
    /// Zero-based.
    pub collapsed_class: usize,
    #[serde(serialize_with = "ratios_as_strings")]
    pub epsilons: Vec<Ratio<u64>>,
    pub row_sums: Vec<u64>,
    pub members: Vec<ConfusionMatrix>,
}

fn ratios_as_strings<S: serde::Serializer>(v: &[Ratio<u64>], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|r| r.to_string()))
}

/// Splits `mass` over every column except `diag` as evenly as possible,
/// remainder to the lowest-indexed other column.
pub(crate) fn spread_row(classes: usize, diag: usize, on_diag: u64, mass: u64) -> Vec<u64> {
    let others = (classes - 1) as u64;
    let (share, rem) = (mass / others, mass % others);
    let mut row = vec![share; classes];
    row[diag] = on_diag;
    let lowest = if diag == 0 { 1 } else { 0 };
    row[lowest] += rem;
    row
}

fn integral(x: Ratio<u64>, what: impl FnOnce() -> String) -> Result<u64> {
    if x.is_integer() {
        Ok(x.to_integer())
    } else {
        Err(Error::IntegralityImpossible { what: what() })
    }
}

pub fn build_collapse_family(
    classes: usize,
    collapsed_class: usize,
    epsilons: &[Ratio<u64>],
    row_sums: &[u64],
) -> Result<CollapseFamily> {
    if classes < 2 {
        return Err(Error::TooFewClasses { found: classes });
    }
    if collapsed_class >= classes {
        return Err(Error::InvalidSchedule(format!(
            "collapsed class {collapsed_class} out of range for {classes} classes"
        )));
    }
    if row_sums.len() != classes {
        return Err(Error::DimensionMismatch {
            left: classes,
            right: row_sums.len(),
        });
    }
    if let Some(row) = row_sums.iter().position(|&n| n == 0) {
        return Err(Error::EmptyRow { row });
    }
    let Some(first) = epsilons.first() else {
        return Err(Error::InvalidSchedule("schedule is empty".into()));
    };
    if *first > Ratio::new(1, classes as u64) {
        return Err(Error::InvalidSchedule(format!("first epsilon {first} exceeds 1/{classes}")));
    }
    if epsilons.iter().any(|e| e.is_zero()) {
        return Err(Error::InvalidSchedule("epsilon must be positive".into()));
    }
    if epsilons.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidSchedule("epsilons must strictly decrease".into()));
    }

    let mut members = Vec::with_capacity(epsilons.len());
    for eps in epsilons {
        let mut counts = Vec::with_capacity(classes * classes);
        for (row, &n) in row_sums.iter().enumerate() {
            let rate = if row == collapsed_class { *eps } else { Ratio::one() - eps };
            let diag = integral(rate * n, || format!("{rate} of {n} points in row {row}"))?;
            counts.extend(spread_row(classes, row, diag, n - diag));
        }
        members.push(ConfusionMatrix::from_flat(classes, counts)?);
    }
    Ok(CollapseFamily {
        class_count: classes,
        collapsed_class,
        epsilons: epsilons.to_vec(),
        row_sums: row_sums.to_vec(),
        members,
    })
}

/// The schedule `{1/C, 1/100, 1/10000}` on equal rows sized to keep every count integral.
pub fn default_collapse_family(classes: usize, collapsed_class: usize) -> Result<CollapseFamily> {
    let c = classes.max(1) as u64;
    let epsilons = [Ratio::new(1, c), Ratio::new(1, 100), Ratio::new(1, 10_000)];
    let n = lcm(c, 10_000);
    build_collapse_family(classes, collapsed_class, &epsilons, &vec![n; classes])
}

impl CollapseFamily {
    /// The `ε = 0` end point: the collapsed class is never recognised and the
    /// others are recognised perfectly.
    pub fn closure(&self) -> ConfusionMatrix {
        let c = self.class_count;
        let mut counts = Vec::with_capacity(c * c);
        for (row, &n) in self.row_sums.iter().enumerate() {
            if row == self.collapsed_class {
                counts.extend(spread_row(c, row, 0, n));
            } else {
                counts.extend(spread_row(c, row, n, 0));
            }
        }
        ConfusionMatrix::from_flat(c, counts).expect("row sums are positive")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Condition3Verdict {
    Informative,
    Collapses,
    NotApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LimitSource {
    /// The index evaluated on the `ε = 0` matrix.
    Closure,
    /// The closure is undefined for this index; the smallest `ε` stands in.
    SmallestEpsilon,
}

#[derive(Debug, Clone, Serialize)]
pub struct Condition3Outcome {
    pub verdict: Condition3Verdict,
    pub class_count: usize,
    pub collapsed_class: usize,
    pub epsilons: Vec<String>,
    pub values: Vec<f64>,
    pub limit_estimate: f64,
    pub limit_source: LimitSource,
    pub lower_bound: f64,
    /// Closed-form limit, where one is known.
    pub theoretical_limit: Option<f64>,
    /// A strict lower bound on the limit, where one is known.
    pub limit_floor: Option<f64>,
    /// Values move in one direction only along the schedule.
    pub monotone: bool,
}

impl Condition3Outcome {
    fn not_applicable(family: &CollapseFamily) -> Self {
        Self {
            verdict: Condition3Verdict::NotApplicable,
            class_count: family.class_count,
            collapsed_class: family.collapsed_class,
            epsilons: family.epsilons.iter().map(|e| e.to_string()).collect(),
            values: Vec::new(),
            limit_estimate: f64::NAN,
            limit_source: LimitSource::SmallestEpsilon,
            lower_bound: f64::NAN,
            theoretical_limit: None,
            limit_floor: None,
            monotone: true,
        }
    }

    pub fn matches_theoretical_limit(&self) -> Option<bool> {
        self.theoretical_limit
            .map(|t| (self.limit_estimate - t).abs() <= LIMIT_TOLERANCE)
    }

    /// Every value along the schedule, and the limit estimate, exceed the floor.
    pub fn above_floor(&self) -> Option<bool> {
        self.limit_floor
            .map(|f| self.values.iter().all(|&v| v > f) && self.limit_estimate > f)
    }
}

fn monotone(values: &[f64]) -> bool {
    let up = values.windows(2).all(|w| w[1] >= w[0] - LIMIT_TOLERANCE);
    let down = values.windows(2).all(|w| w[1] <= w[0] + LIMIT_TOLERANCE);
    up || down
}

pub fn audit_condition3(index: IndexId, family: &CollapseFamily) -> Result<Condition3Outcome> {
    if index.is_binary() {
        return Ok(Condition3Outcome::not_applicable(family));
    }
    let c = family.class_count;
    let mut values = Vec::with_capacity(family.members.len());
    for (eps, m) in family.epsilons.iter().zip(&family.members) {
        match index.evaluate(m)? {
            crate::IndexValue::Defined(v) => values.push(v),
            crate::IndexValue::Undefined(reason) => {
                return Err(Error::UndefinedAlongFamily {
                    index,
                    epsilon: eps.to_string(),
                    reason: reason.to_string(),
                })
            }
        }
    }
    let (limit_estimate, limit_source) = match index.evaluate(&family.closure())?.value() {
        Some(v) => (v, LimitSource::Closure),
        None => (*values.last().expect("family is non-empty"), LimitSource::SmallestEpsilon),
    };
    let (lower_bound, _) = theoretical_bounds(index, c, Some(&family.row_sums))?;
    let cf = c as f64;
    let theoretical_limit = match index {
        IndexId::GMeanC => Some(0.0),
        IndexId::Acsa => Some((cf - 1.0) / cf),
        _ => None,
    };
    let limit_floor = match index {
        IndexId::MAurpcOva => Some(3.0 * (cf - 1.0) / (4.0 * cf)),
        _ => None,
    };
    Ok(Condition3Outcome {
        verdict: if limit_estimate <= lower_bound + LIMIT_TOLERANCE {
            Condition3Verdict::Collapses
        } else {
            Condition3Verdict::Informative
        },
        class_count: c,
        collapsed_class: family.collapsed_class,
        epsilons: family.epsilons.iter().map(|e| e.to_string()).collect(),
        monotone: monotone(&values),
        values,
        limit_estimate,
        limit_source,
        lower_bound,
        theoretical_limit,
        limit_floor,
    })
}
