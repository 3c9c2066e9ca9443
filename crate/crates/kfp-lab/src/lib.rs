//! Experiment harness for the kinetic Fokker-Planck convergence laboratory:
//! configuration, deterministic RNG streams, rate fitting, the experiment
//! registry, and CSV emission.

// Parameter guards use `!(x > 0.0)` on purpose: NaN must fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiments;
pub mod fit;
pub mod oracles;
pub mod report;
pub mod rng;
pub mod torus_bm;

pub use config::ExperimentConfig;
pub use error::{LabError, Result};
pub use report::Report;
