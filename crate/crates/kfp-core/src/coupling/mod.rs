//! Joint constructions on two copies of the phase space: the one-shot
//! mixture coupling, the co-adapted reflection/synchronisation coupling with
//! its stopping-time law, and the synchronous baseline.

mod mixture;
mod reflection;
mod stopping;
mod synchronous;

pub use mixture::{mixture_coupling, residual_sampler};
pub use reflection::{
    bridge_crossing_prob, default_step, detect_interval_exit, initial_state,
    reflection_coupling_step, run_reflection_coupling, step_with, Boundary, CouplingPathState,
    Crossing, StepCoeffs,
};
pub use stopping::{second_moment_bound, stopping_time_tail, stopping_time_tail_bound};
pub use synchronous::synchronous_coupling;

use crate::kernel::PhasePoint;

/// Two phase points evolving under a joint law.
#[derive(Debug, Clone, Copy)]
pub struct CoupledPair {
    pub p1: PhasePoint,
    pub p2: PhasePoint,
}

impl CoupledPair {
    pub fn new(p1: PhasePoint, p2: PhasePoint) -> Self {
        CoupledPair { p1, p2 }
    }
}
