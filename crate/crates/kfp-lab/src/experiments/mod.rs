//! Experiment registry: every driver implements [`Experiment`] and is
//! registered by name; the CLI selects one at runtime.

mod coadapted_decay;
mod kernel_check;
mod martingale_h;
mod mixture_decay;
mod non_contraction;
mod sqrt_optimality;
mod stopping_time;

pub use non_contraction::non_contraction_bound;

use crate::config::ExperimentConfig;
use crate::error::{LabError, Result};
use crate::report::Report;

pub trait Experiment: Sync {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    fn run(&self, cfg: &ExperimentConfig) -> Result<Report>;
}

/// All registered experiments, in CLI listing order.
pub static REGISTRY: &[&dyn Experiment] = &[
    &kernel_check::KernelCheck,
    &mixture_decay::MixtureDecay,
    &coadapted_decay::CoadaptedDecay,
    &non_contraction::NonContraction,
    &sqrt_optimality::SqrtOptimality,
    &stopping_time::StoppingTime,
    &martingale_h::MartingaleH,
];

pub fn find(name: &str) -> Option<&'static dyn Experiment> {
    REGISTRY.iter().copied().find(|e| e.name() == name)
}

pub fn names() -> Vec<&'static str> {
    REGISTRY.iter().map(|e| e.name()).collect()
}

/// Validate, reconcile the config's experiment field with the selection,
/// and run.
pub fn run_by_name(name: &str, cfg: &ExperimentConfig) -> Result<Report> {
    let experiment = find(name).ok_or_else(|| {
        let listing: Vec<String> = REGISTRY
            .iter()
            .map(|e| format!("  {} — {}", e.name(), e.summary()))
            .collect();
        LabError::Config(format!(
            "unknown experiment '{name}'; available:\n{}",
            listing.join("\n")
        ))
    })?;
    if let Some(declared) = &cfg.experiment {
        if declared != name {
            return Err(LabError::Config(format!(
                "config declares experiment '{declared}' but '{name}' was requested"
            )));
        }
    }
    cfg.validate()?;
    experiment.run(cfg)
}
