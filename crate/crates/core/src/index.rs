//! Registry of every implemented index.

use std::fmt;
use std::str::FromStr;

use num::BigRational;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::binary::{self, BinaryCounts};
use crate::confusion::ConfusionMatrix;
use crate::error::{Error, Result};
use crate::multiclass;
use crate::scalar::Scalar;

/// Why an index has no value on a particular matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UndefinedReason {
    NoPositivePredictions,
    NoPositiveRatePredictions,
    ClassNeverPredicted(usize),
    RateColumnZero(usize),
    RequiresTwoClasses,
}

impl fmt::Display for UndefinedReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NoPositivePredictions => write!(f, "no positive predictions"),
            Self::NoPositiveRatePredictions => write!(f, "no positive predictions in rate terms"),
            Self::ClassNeverPredicted(i) => write!(f, "class {i} never predicted"),
            Self::RateColumnZero(i) => write!(f, "rate column {i} sums to zero"),
            Self::RequiresTwoClasses => write!(f, "index requires exactly two classes"),
        }
    }
}

pub(crate) type Outcome<S> = std::result::Result<S, UndefinedReason>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IndexValue {
    Defined(f64),
    Undefined(UndefinedReason),
}

impl IndexValue {
    pub fn value(&self) -> Option<f64> {
        match self {
            Self::Defined(v) => Some(*v),
            Self::Undefined(_) => None,
        }
    }

    pub fn is_defined(&self) -> bool {
        matches!(self, Self::Defined(_))
    }

    pub fn undefined_reason(&self) -> Option<UndefinedReason> {
        match self {
            Self::Defined(_) => None,
            Self::Undefined(r) => Some(*r),
        }
    }
}

impl From<Outcome<f64>> for IndexValue {
    fn from(o: Outcome<f64>) -> Self {
        match o {
            Ok(v) => Self::Defined(v),
            Err(r) => Self::Undefined(r),
        }
    }
}

/// An index value tagged with the index that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub index: IndexId,
    pub value: IndexValue,
}

impl Serialize for Evaluation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("Evaluation", 3)?;
        s.serialize_field("index", &self.index)?;
        s.serialize_field("value", &self.value.value())?;
        s.serialize_field("status", &self.value.undefined_reason().map_or("ok".to_string(), |r| r.to_string()))?;
        s.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IndexId {
    GMean2,
    Auroc,
    Precision,
    Recall,
    Specificity,
    Aurpc,
    MPrecision,
    MAurpc,
    GMeanC,
    Acsa,
    AurocOvo,
    AurocOva,
    NAurocOva,
    AurpcOva,
    MAurpcOva,
}

impl IndexId {
    pub const ALL: [IndexId; 15] = [
        Self::GMean2,
        Self::Auroc,
        Self::Precision,
        Self::Recall,
        Self::Specificity,
        Self::Aurpc,
        Self::MPrecision,
        Self::MAurpc,
        Self::GMeanC,
        Self::Acsa,
        Self::AurocOvo,
        Self::AurocOva,
        Self::NAurocOva,
        Self::AurpcOva,
        Self::MAurpcOva,
    ];

    pub const BINARY: [IndexId; 8] = [
        Self::GMean2,
        Self::Auroc,
        Self::Precision,
        Self::Recall,
        Self::Specificity,
        Self::Aurpc,
        Self::MPrecision,
        Self::MAurpc,
    ];

    pub const MULTICLASS: [IndexId; 7] = [
        Self::GMeanC,
        Self::Acsa,
        Self::AurocOvo,
        Self::AurocOva,
        Self::NAurocOva,
        Self::AurpcOva,
        Self::MAurpcOva,
    ];

    /// The thirteen indices whose condition behaviour is established analytically
    /// (recall and specificity are helpers, not audited indices).
    pub const AUDITED: [IndexId; 13] = [
        Self::GMean2,
        Self::Auroc,
        Self::Precision,
        Self::Aurpc,
        Self::MPrecision,
        Self::MAurpc,
        Self::GMeanC,
        Self::Acsa,
        Self::AurocOvo,
        Self::AurocOva,
        Self::NAurocOva,
        Self::AurpcOva,
        Self::MAurpcOva,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Self::GMean2 => "gmean2",
            Self::Auroc => "auroc",
            Self::Precision => "precision",
            Self::Recall => "recall",
            Self::Specificity => "specificity",
            Self::Aurpc => "aurpc",
            Self::MPrecision => "m_precision",
            Self::MAurpc => "m_aurpc",
            Self::GMeanC => "gmean_c",
            Self::Acsa => "acsa",
            Self::AurocOvo => "auroc_ovo",
            Self::AurocOva => "auroc_ova",
            Self::NAurocOva => "n_auroc_ova",
            Self::AurpcOva => "aurpc_ova",
            Self::MAurpcOva => "m_aurpc_ova",
        }
    }

    /// Conventional symbol and name, for help text.
    pub fn describe(self) -> &'static str {
        match self {
            Self::GMean2 => "γ₂   GMean (two-class)",
            Self::Auroc => "ρ    AUROC (discrete, two-class)",
            Self::Precision => "ζ    Precision",
            Self::Recall => "β    Recall",
            Self::Specificity => "     Specificity",
            Self::Aurpc => "κ    AURPC (discrete, two-class)",
            Self::MPrecision => "ζ̂    mPrecision (rate-based precision)",
            Self::MAurpc => "κ̂    mAURPC",
            Self::GMeanC => "γ_C  GMean (multi-class)",
            Self::Acsa => "α    ACSA (average class-specific accuracy)",
            Self::AurocOvo => "ρ_o  AUROC one-vs-one",
            Self::AurocOva => "ρ_a  AUROC one-vs-all",
            Self::NAurocOva => "     nAUROC-OVA (normalised by λ_C = (C-2)/(2C))",
            Self::AurpcOva => "κ_a  AURPC one-vs-all",
            Self::MAurpcOva => "κ̂_a  mAURPC-OVA",
        }
    }

    pub fn is_binary(self) -> bool {
        Self::BINARY.contains(&self)
    }

    pub fn is_gmean(self) -> bool {
        matches!(self, Self::GMean2 | Self::GMeanC)
    }

    pub fn applies_to(self, classes: usize) -> bool {
        classes >= 2 && (!self.is_binary() || classes == 2)
    }

    fn kernel<S: Scalar>(self, m: &ConfusionMatrix) -> Result<Outcome<S>> {
        if self.is_binary() {
            let c = BinaryCounts::from_matrix(m, self)?;
            return Ok(match self {
                Self::GMean2 => Ok(binary::gmean2_squared_kernel(&c)),
                Self::Auroc => Ok(binary::auroc_kernel(&c)),
                Self::Precision => binary::precision_kernel(&c),
                Self::Recall => Ok(binary::recall_kernel(&c)),
                Self::Specificity => Ok(binary::specificity_kernel(&c)),
                Self::Aurpc => binary::aurpc_kernel(&c),
                Self::MPrecision => binary::m_precision_kernel(&c),
                Self::MAurpc => binary::m_aurpc_kernel(&c),
                _ => unreachable!(),
            });
        }
        Ok(match self {
            Self::GMeanC => Ok(multiclass::gmean_product_kernel(m)),
            Self::Acsa => Ok(multiclass::acsa_kernel(m)),
            Self::AurocOvo => Ok(multiclass::auroc_ovo_kernel(m)),
            Self::AurocOva => Ok(multiclass::auroc_ova_kernel(m)),
            Self::NAurocOva => Ok(multiclass::n_auroc_ova_kernel(m)),
            Self::AurpcOva => multiclass::aurpc_ova_kernel(m),
            Self::MAurpcOva => multiclass::m_aurpc_ova_kernel(m),
            _ => unreachable!(),
        })
    }

    /// Floating-point value of the index on `m`.
    pub fn evaluate(self, m: &ConfusionMatrix) -> Result<IndexValue> {
        let raw = self.kernel::<f64>(m)?;
        Ok(match raw {
            Ok(product) if self.is_gmean() => IndexValue::Defined(product.powf(1.0 / m.class_count() as f64)),
            other => other.into(),
        })
    }

    /// Exact rational evaluation.
    ///
    /// For the GMean indices the root is irrational in general, so this
    /// returns the product of class accuracies instead. The map is strictly
    /// monotone, which is all equality and ordering checks need.
    pub fn evaluate_exact(self, m: &ConfusionMatrix) -> Result<std::result::Result<BigRational, UndefinedReason>> {
        self.kernel::<BigRational>(m)
    }

    pub fn evaluation(self, m: &ConfusionMatrix) -> Result<Evaluation> {
        Ok(Evaluation {
            index: self,
            value: self.evaluate(m)?,
        })
    }
}

impl fmt::Display for IndexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for IndexId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        Self::ALL
            .into_iter()
            .find(|id| id.id() == key)
            .ok_or_else(|| Error::UnknownIndex(s.to_string()))
    }
}

impl Serialize for IndexId {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.id())
    }
}

impl<'de> Deserialize<'de> for IndexId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Every applicable index evaluated on `m`, in registry order.
pub fn evaluate_all(m: &ConfusionMatrix) -> Vec<Evaluation> {
    IndexId::ALL
        .into_iter()
        .filter(|id| id.applies_to(m.class_count()))
        .map(|id| id.evaluation(m).expect("applicable index"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for id in IndexId::ALL {
            assert_eq!(id.id().parse::<IndexId>().unwrap(), id);
        }
        assert_eq!("AUROC-OVA".parse::<IndexId>().unwrap(), IndexId::AurocOva);
        assert!("f1".parse::<IndexId>().is_err());
    }

    #[test]
    fn exact_matches_float() {
        let m = ConfusionMatrix::new(vec![vec![8, 1, 1], vec![1, 8, 1], vec![2, 2, 6]]).unwrap();
        for id in IndexId::MULTICLASS {
            let f = id.evaluate(&m).unwrap().value().unwrap();
            let exact = id.evaluate_exact(&m).unwrap().unwrap();
            let exact = Scalar::to_f64(&exact);
            let exact = if id.is_gmean() { exact.powf(1.0 / 3.0) } else { exact };
            assert!((f - exact).abs() < 1e-12, "{id}");
        }
    }

    #[test]
    fn evaluate_all_counts() {
        let two = ConfusionMatrix::new(vec![vec![8, 2], vec![10, 90]]).unwrap();
        assert_eq!(evaluate_all(&two).len(), 15);
        let three = ConfusionMatrix::new(vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        let all = evaluate_all(&three);
        assert_eq!(all.len(), 7);
        assert!(all.iter().all(|e| e.value == IndexValue::Defined(1.0)));
    }
}
