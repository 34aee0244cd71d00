//! Generalized additive partial linear models with polynomial-spline
//! quasi-likelihood estimation, a focused information criterion over
//! submodels, and frequentist model averaging with bias-corrected
//! confidence intervals.
//!
//! The pieces compose bottom-up:
//!
//! - [`basis`]: clamped B-spline bases on [0, 1] and the additive design
//!   expansion with post-fit centering.
//! - [`family`]: quasi-likelihood families (bernoulli-logit,
//!   gaussian-identity, poisson-log) and their rho weights.
//! - [`fit`]: the IRLS maximizer over [intercept | spline | linear] with
//!   step halving, information matrix and covariance blocks.
//! - [`model`]: the certain/exploratory partition and submodel projections.
//! - [`fic`]: plug-in ingredients, per-submodel focused-criterion scores,
//!   smoothed weights, the model-average estimate and its interval.
//! - [`knots`]: BIC selection of the interior-knot count.
//! - [`sim`]: the Monte-Carlo coverage/MSE study harness.
//! - [`data`]: CSV ingestion with standardization and rescaling.
//! - [`analyze`]: the end-to-end analysis pipeline and leave-one-out
//!   cross-validation used by the CLI.

pub mod analyze;
pub mod basis;
pub mod data;
pub mod error;
pub mod family;
pub mod fic;
pub mod fit;
pub mod knots;
pub mod linalg;
pub mod model;
pub mod sim;
pub mod stats;

pub use error::{Error, Result};
