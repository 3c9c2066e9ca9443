//! Closed-form covariance and conditional law against the Euler–Maruyama
//! oracle.

use kfp_core::kernel::covariance;

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::oracles::em_covariance;
use crate::report::{col, Report};

pub struct KernelCheck;

impl super::Experiment for KernelCheck {
    fn name(&self) -> &'static str {
        "kernel-check"
    }

    fn summary(&self) -> &'static str {
        "closed-form noise covariance and conditional slope vs EM integration"
    }

    fn run(&self, cfg: &ExperimentConfig) -> Result<Report> {
        let params = cfg.model_params()?;
        let mut report = Report::new(
            "kernel-check",
            vec![
                col("t", "horizon"),
                col("saa", "closed-form Var(A)"),
                col("sab", "closed-form Cov(A,B)"),
                col("sbb", "closed-form Var(B)"),
                col("saa_em", "EM estimate of Var(A)"),
                col("sab_em", "EM estimate of Cov(A,B)"),
                col("sbb_em", "EM estimate of Var(B)"),
                col("saa_se", "standard error of saa_em"),
                col("sab_se", "standard error of sab_em"),
                col("sbb_se", "standard error of sbb_em"),
                col("slope", "closed-form conditional slope Cov/Var(B)"),
                col("slope_em", "regression slope from EM paths"),
                col("slope_se", "standard error of slope_em"),
            ],
        );

        let estimates = em_covariance(
            params.lambda(),
            &cfg.t_grid,
            cfg.h,
            cfg.n_trials,
            cfg.seed,
            0,
        );
        for est in estimates {
            let exact = covariance(est.t, &params)?;
            let slope = exact.s_ab / exact.s_bb;
            let slope_em = est.s_ab / est.s_bb;
            let vab_em = (est.s_aa - est.s_ab * est.s_ab / est.s_bb).max(0.0);
            let slope_se = (vab_em / (est.n_paths as f64 * est.s_bb)).sqrt();
            report.push_row(vec![
                est.t, exact.s_aa, exact.s_ab, exact.s_bb, est.s_aa, est.s_ab, est.s_bb,
                est.se_aa, est.se_ab, est.se_bb, slope, slope_em, slope_se,
            ]);
        }
        Ok(report)
    }
}
