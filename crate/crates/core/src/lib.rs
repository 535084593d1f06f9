//! Model-agnostic reliability evaluation for vessel trajectory predictors.
//!
//! The crate is organised along the evaluation pipeline:
//!
//! - [`trajectory`]: AIS-style ingestion, track splitting, resampling to a
//!   uniform 60 s grid and windowing into fixed-length sequences.
//! - [`traffic`]: detection of encounter / overtaking / overtaken events in
//!   the prediction window and the resulting traffic-situation label.
//! - [`metrics`]: displacement errors, 3 s densification and summary
//!   statistics per traffic situation.
//! - [`pod`]: the â-versus-a analysis producing probability-of-accurate-
//!   prediction (POAP) curves, their Wald lower bound and `a90` / `a90/95`.
//! - [`scenario`]: synthetic river scenes and baseline predictors.
//! - [`report`]: tables, CSV exports and SVG figures.
//! - [`pipeline`]: the end-to-end evaluation and the synthetic demo.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod metrics;
pub mod normal;
pub mod pipeline;
pub mod pod;
pub mod report;
pub mod scenario;
pub mod traffic;
pub mod trajectory;

pub use error::{Error, Result};
