//! Resampling toolkit for imbalanced binary classification.
//!
//! The centerpiece is [`poqg`], an oversampler that picks two minority
//! neighbours of an anchor (Proxima and Orion) from a distance/density
//! weighted distribution and blends them with q-Gaussian weights. Five
//! SMOTE-family baselines live in [`baselines`]; [`eval`] and [`stats`]
//! provide cross-validated scoring and the Wilcoxon signed-rank test used
//! to compare methods across datasets.

pub mod baselines;
pub mod data;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod neighbors;
pub mod poqg;
pub mod resample;
pub mod seed;
pub mod stats;

pub use data::{Dataset, DatasetStats, FoldPlan, Label, MAJORITY, MINORITY};
pub use error::{Error, ParseErrorKind, Result};
pub use resample::{Provenance, Resampled, Resampler, ResamplerSpec, RowOrigin};
