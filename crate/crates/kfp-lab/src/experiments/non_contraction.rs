//! Deterministic lower bound on the short-time W2 between two Dirac starts,
//! exhibiting that no uniform contraction rate can exist.

use statrs::function::erf::erfc;

use kfp_core::kernel::{covariance, ModelParams};

use crate::config::ExperimentConfig;
use crate::error::{LabError, Result};
use crate::report::{col, Report};

/// Lower bound on W2(μ_t, ν_t) for Dirac starts at torus distance `dist`
/// with zero velocities: each spatial law keeps all but a Gaussian tail of
/// its mass within d = dist·t^{3/2} of its start, so at least that much
/// mass must travel at least dist − 2d.
///
/// The tail mass is evaluated exactly through the error function at
/// variance Σ_AA(t); the line tail dominates the torus tail while the
/// shifted intervals stay disjoint, which the preconditions enforce.
pub fn non_contraction_bound(t: f64, dist: f64, params: &ModelParams) -> Result<f64> {
    let torus = params.torus();
    if !(t > 0.0) || !t.is_finite() {
        return Err(LabError::Numerics(format!(
            "non-contraction bound needs t > 0 (got {t})"
        )));
    }
    if !(dist > 0.0) || dist > torus.half_period() + 1e-12 {
        return Err(LabError::Numerics(format!(
            "dist must lie in (0, {}] (got {dist})",
            torus.half_period()
        )));
    }
    let d = dist * t.powf(1.5);
    // Intervals of radius d around both starts must stay disjoint on the
    // torus, both through the near gap and around the far side.
    if 2.0 * d >= dist || 2.0 * d >= torus.period() - dist {
        return Err(LabError::Numerics(format!(
            "interval overlap at t = {t}: spread {d} too large for dist {dist}"
        )));
    }
    let sigma2 = covariance(t, params)?.s_aa;
    let tail = if sigma2 > 0.0 {
        erfc(d / (2.0 * sigma2).sqrt())
    } else {
        0.0
    };
    let mass = (1.0 - 2.0 * tail).max(0.0);
    Ok((dist - 2.0 * d) * mass.sqrt())
}

pub struct NonContraction;

impl super::Experiment for NonContraction {
    fn name(&self) -> &'static str {
        "non-contraction"
    }

    fn summary(&self) -> &'static str {
        "short-time W2 lower bound vs candidate contraction rates"
    }

    fn run(&self, cfg: &ExperimentConfig) -> Result<Report> {
        let params = cfg.model_params()?;
        let dist = cfg.dist_or_default(&params);
        let gammas = cfg.gammas_or_default();

        let mut columns = vec![
            col("t", "horizon"),
            col("bound", "deterministic lower bound on W2(mu_t, nu_t)"),
        ];
        for (i, g) in gammas.iter().enumerate() {
            columns.push(col(
                format!("floor_{i}"),
                format!("exp(-{g} t) * dist, the contraction candidate"),
            ));
            columns.push(col(
                format!("exceeds_{i}"),
                format!("1 when bound > exp(-{g} t) * dist"),
            ));
        }
        let mut report = Report::new("non-contraction", columns);
        report.notes.push(format!("dist = {dist:.6e}"));

        for &t in &cfg.t_grid {
            let bound = non_contraction_bound(t, dist, &params)?;
            let mut row = vec![t, bound];
            for g in &gammas {
                let floor = (-g * t).exp() * dist;
                row.push(floor);
                row.push(if bound > floor { 1.0 } else { 0.0 });
            }
            report.push_row(row);
        }
        Ok(report)
    }
}
