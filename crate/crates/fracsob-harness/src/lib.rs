//! Experiment harness for the `fracsob` library: reproducible
//! embedding, density, extension, and convergence studies over the
//! built-in corpus, emitted as deterministic CSV/JSON artifacts.
//!
//! Every experiment follows the same shape: a schema-versioned JSON
//! [`ExperimentConfig`] names corpus members, norm parameters, a
//! domain box, and a resolution ladder; the drivers in [`experiments`]
//! measure each inequality instance and return an [`ExperimentResult`]
//! whose rows make the overall verdict recomputable offline. The
//! [`report`] module serializes rows with a fixed column set and fixed
//! float formatting, so a fixed config and corpus produce byte-identical
//! artifacts regardless of worker count; wall-clock metadata goes to a
//! separate sidecar file. The `fracsob` binary in this package is the
//! command-line front end.

// Validation guards are written `!(x > 0.0)` rather than `x <= 0.0` so
// that NaN input is rejected along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiments;
pub mod report;

pub use config::{ExperimentConfig, OUTPUT_DIR_ENV};
pub use error::{HarnessError, Result};
pub use experiments::{
    convergence_sweep, density_experiment, embedding_experiment, extension_experiment,
};
pub use report::{write_artifacts, ClaimRow, ExperimentResult, Verdict, WrittenFiles};
