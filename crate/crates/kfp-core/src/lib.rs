//! Simulation primitives for the kinetic Fokker-Planck dynamics on the
//! torus: exact Gaussian transition sampling, wrapped-density estimates, the
//! mixture and reflection couplings with the meeting-time law, and exact
//! empirical W2 computation with the cylinder ground metric.

// Parameter guards use `!(x > 0.0)` on purpose: NaN must fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coupling;
pub mod error;
pub mod kernel;
pub mod stats;
pub mod torus;
pub mod wasserstein;

pub use error::{Error, Result};
pub use kernel::{ModelParams, PhasePoint};
pub use torus::{Torus, TorusCoord};
