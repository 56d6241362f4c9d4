//! Confusion-matrix based evaluation for class-imbalanced classification.
//!
//! The crate is organised bottom-up:
//!
//! - [`confusion`]: the confusion matrix, class-ratio measures (IR / RRT),
//!   row scalings and the equivalence relation between matrices.
//! - [`binary`] and [`multiclass`]: the two-class and multi-class indices.
//! - [`index`]: a uniform registry over every index, with float and exact
//!   rational evaluation.
//! - [`audit`]: mechanical checks of the three invariance conditions.
//! - [`lab`]: synthetic datasets and distortion experiments.

pub mod audit;
pub mod binary;
pub mod confusion;
mod error;
pub mod index;
pub mod io;
pub mod lab;
pub mod multiclass;
pub mod scalar;

pub use confusion::{are_equivalent, apply_scaling, ClassRatioProfile, ConfusionMatrix, RowScaling};
pub use error::{Error, Result};
pub use index::{Evaluation, IndexId, IndexValue, UndefinedReason};

/// Absolute tolerance used for every floating-point identity check on index values.
pub const VALUE_TOLERANCE: f64 = 1e-12;
