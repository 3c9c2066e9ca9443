//! Experiment configuration: JSON in, strict validation, explicit defaults.
//! Unknown keys are rejected so config drift fails loudly.

use serde::{Deserialize, Serialize};

use kfp_core::coupling::CoupledPair;
use kfp_core::kernel::{ModelParams, PhasePoint};

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub lambda: f64,
    #[serde(rename = "L")]
    pub l: f64,
}

/// Dirac initial pair; positions wrap onto the torus.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairInit {
    pub x1: f64,
    pub v1: f64,
    pub x2: f64,
    pub v2: f64,
}

/// Driving-noise relation between two coupled torus Brownian motions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CouplingKind {
    Reflection,
    Synchronous,
    Independent,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Experiment name; must match the CLI selection when both are given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<String>,
    pub params: ParamsConfig,
    pub t_grid: Vec<f64>,
    pub n_samples: usize,
    pub n_trials: usize,
    pub h: f64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_path: Option<String>,

    /// Dirac initial pair; defaults to ((0,0),(πL,0)).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair0: Option<PairInit>,
    /// Initial separations for the square-root-dependence experiment;
    /// defaults to πL·{1/16, 1/8, 1/4, 1/2, 1}.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_grid: Option<Vec<f64>>,
    /// Brownian coupling for the martingale experiment; default reflection.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling: Option<CouplingKind>,
    /// Initial Dirac distance for the non-contraction bound; default πL.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dist: Option<f64>,
    /// Contraction rates to refute; default {0.1, 1, 10}.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gammas: Option<Vec<f64>>,
    /// Grid time at which the decay-envelope constant is fitted (nearest
    /// grid point is used); default 1.0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_fit_t: Option<f64>,
}

fn strictly_increasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[0] < w[1])
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let params = self.model_params()?;
        let half = params.torus().half_period();

        if self.t_grid.is_empty() {
            return Err(LabError::Config("t_grid must be nonempty".into()));
        }
        if !self.t_grid.iter().all(|t| t.is_finite() && *t > 0.0) {
            return Err(LabError::Config(
                "t_grid entries must be finite and positive".into(),
            ));
        }
        if !strictly_increasing(&self.t_grid) {
            return Err(LabError::Config("t_grid must be strictly increasing".into()));
        }
        if self.n_samples < 1 || self.n_trials < 1 {
            return Err(LabError::Config(
                "n_samples and n_trials must be at least 1".into(),
            ));
        }
        if !(self.h > 0.0) || !self.h.is_finite() {
            return Err(LabError::Config("h must be positive".into()));
        }
        if let Some(p) = &self.pair0 {
            if ![p.x1, p.v1, p.x2, p.v2].iter().all(|v| v.is_finite()) {
                return Err(LabError::Config("pair0 entries must be finite".into()));
            }
        }
        if let Some(zs) = &self.z_grid {
            if zs.is_empty() || !strictly_increasing(zs) {
                return Err(LabError::Config(
                    "z_grid must be nonempty and strictly increasing".into(),
                ));
            }
            if !zs.iter().all(|z| *z > 0.0 && *z <= half + 1e-12) {
                return Err(LabError::Config(format!(
                    "z_grid entries must lie in (0, {half}]"
                )));
            }
        }
        if let Some(d) = self.dist {
            if !(d > 0.0) || d > half + 1e-12 {
                return Err(LabError::Config(format!("dist must lie in (0, {half}]")));
            }
        }
        if let Some(gs) = &self.gammas {
            if gs.is_empty() || !gs.iter().all(|g| *g > 0.0 && g.is_finite()) {
                return Err(LabError::Config("gammas must be positive".into()));
            }
        }
        if let Some(c) = self.c_fit_t {
            if !(c > 0.0) || !c.is_finite() {
                return Err(LabError::Config("c_fit_t must be positive".into()));
            }
        }
        Ok(())
    }

    pub fn model_params(&self) -> Result<ModelParams> {
        ModelParams::new(self.params.lambda, self.params.l)
            .map_err(|e| LabError::Config(e.to_string()))
    }

    pub fn pair0_or_default(&self, params: &ModelParams) -> PairInit {
        self.pair0.unwrap_or(PairInit {
            x1: 0.0,
            v1: 0.0,
            x2: params.torus().half_period(),
            v2: 0.0,
        })
    }

    pub fn initial_pair(&self, params: &ModelParams) -> CoupledPair {
        let init = self.pair0_or_default(params);
        let torus = params.torus();
        CoupledPair::new(
            PhasePoint::new(torus.wrap(init.x1), init.v1),
            PhasePoint::new(torus.wrap(init.x2), init.v2),
        )
    }

    pub fn z_grid_or_default(&self, params: &ModelParams) -> Vec<f64> {
        self.z_grid.clone().unwrap_or_else(|| {
            let half = params.torus().half_period();
            vec![half / 16.0, half / 8.0, half / 4.0, half / 2.0, half]
        })
    }

    pub fn coupling_or_default(&self) -> CouplingKind {
        self.coupling.unwrap_or(CouplingKind::Reflection)
    }

    pub fn dist_or_default(&self, params: &ModelParams) -> f64 {
        self.dist.unwrap_or_else(|| params.torus().half_period())
    }

    pub fn gammas_or_default(&self) -> Vec<f64> {
        self.gammas.clone().unwrap_or_else(|| vec![0.1, 1.0, 10.0])
    }

    pub fn c_fit_t_or_default(&self) -> f64 {
        self.c_fit_t.unwrap_or(1.0)
    }

    /// Copy with every optional field resolved, for the CSV header.
    pub fn resolved(&self, experiment: &str) -> ExperimentConfig {
        let params = self.model_params().expect("validated");
        ExperimentConfig {
            experiment: Some(experiment.to_string()),
            params: self.params.clone(),
            t_grid: self.t_grid.clone(),
            n_samples: self.n_samples,
            n_trials: self.n_trials,
            h: self.h,
            seed: self.seed,
            out_path: self.out_path.clone(),
            pair0: Some(self.pair0_or_default(&params)),
            z_grid: Some(self.z_grid_or_default(&params)),
            coupling: Some(self.coupling_or_default()),
            dist: Some(self.dist_or_default(&params)),
            gammas: Some(self.gammas_or_default()),
            c_fit_t: Some(self.c_fit_t_or_default()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}
