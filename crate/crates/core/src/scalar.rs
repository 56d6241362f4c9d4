//! Number types the index formulas are generic over.
//!
//! Every index is written once against [`Scalar`] and instantiated with
//! `f64` for reporting and with [`BigRational`] for exact comparisons.

use std::ops::{Add, Div, Mul, Sub};

use num::{BigInt, BigRational, ToPrimitive, Zero};

pub trait Scalar:
    Clone
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    fn from_count(v: u64) -> Self;

    fn ratio(num: u64, den: u64) -> Self {
        Self::from_count(num) / Self::from_count(den)
    }

    fn zero() -> Self {
        Self::from_count(0)
    }

    fn one() -> Self {
        Self::from_count(1)
    }

    fn is_zero(&self) -> bool;

    fn to_f64(&self) -> f64;
}

impl Scalar for f64 {
    fn from_count(v: u64) -> Self {
        v as f64
    }

    fn is_zero(&self) -> bool {
        *self == 0.0
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for BigRational {
    fn from_count(v: u64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn ratio(num: u64, den: u64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}
