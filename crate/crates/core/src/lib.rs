//! Unsupervised ranking of multi-indicator data with a monotone cubic Bézier
//! curve, plus classical composite indices and a meta-criteria audit.
//!
//! Typical use: load an [`data::IndicatorTable`], fit with
//! [`fitting::FittedModel::fit`], read the ranking off the result, and audit
//! the method with [`evaluation::audit`].

// NaN-rejecting checks are written as `!(x > 0.0)` on purpose
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod bezier;
pub mod cli;
pub mod correlation;
pub mod data;
pub mod evaluation;
pub mod fitting;
pub mod pca;
pub mod plot;
pub mod projection;
pub mod ranking;
pub mod reference;
pub mod synthetic;
