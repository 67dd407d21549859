//! Electrostatic-discharge gait sensing toolkit.
//!
//! * [`simkit`] synthesizes labelled ESD signals from a capacitive-coupling model.
//! * [`dsp`] trims, standardizes and converts signals into MFCC feature vectors.
//! * [`forest`] is a from-scratch random forest with cross-validation, randomized
//!   hyperparameter search, MDI importances and evaluation metrics.
//! * [`legshake`] detects 5–6 Hz leg-shaking episodes in a sample stream.
//! * [`experiment`] wires the pieces into config-driven, reproducible runs.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dsp;
pub mod error;
pub mod experiment;
pub mod forest;
pub mod io;
pub mod legshake;
pub mod seed;
pub mod simkit;

pub use error::{Error, Result};
