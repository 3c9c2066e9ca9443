//! One-shot mixture coupling at a fixed horizon.
//!
//! After fixing the shared velocity noise B, the wrapped conditional law of
//! the position noise has a guaranteed uniform component β. With probability
//! β both particles land on one common uniform point; otherwise one shared
//! residual draw is added to both free flights. Velocities always share B,
//! so the velocity gap contracts by exactly e^{−λt} path-wise.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::kernel::{
    conditional_a_given_b, conditional_var, covariance, free_flight, ModelParams, PhasePoint,
};
use crate::torus::{spreading_beta, TorusCoord, WrappedGaussian, DEFAULT_PDF_TOL};

use super::CoupledPair;

/// Draw from the residual density s = (Qg_{A|B} − β/2πL)/(1 − β) by
/// rejection: propose from the wrapped conditional Gaussian and accept with
/// probability 1 − β/(2πL·Qg). Well defined because Qg ≥ β/2πL; expected
/// number of proposals is 1/(1−β).
pub fn residual_sampler<R: Rng + ?Sized>(
    t: f64,
    b: f64,
    params: &ModelParams,
    rng: &mut R,
) -> Result<TorusCoord> {
    let torus = params.torus();
    let vab = conditional_var(t, params)?;
    let beta = spreading_beta(vab, torus.scale())?;
    let cond = conditional_a_given_b(t, b, params)?;
    let proposal = WrappedGaussian::new(torus.wrap(cond.mean), vab)?;
    let floor = beta * torus.uniform_density();
    loop {
        let a = proposal.sample(&torus, rng);
        if beta == 0.0 {
            return Ok(a);
        }
        let q = proposal.pdf(a, &torus, DEFAULT_PDF_TOL);
        let accept = (1.0 - floor / q).clamp(0.0, 1.0);
        if rng.random::<f64>() < accept {
            return Ok(a);
        }
    }
}

/// Advance both particles of `pair0` by the coupled time-t kernel.
///
/// Each output marginal has the exact time-t transition law started from
/// the corresponding input point. Fails with
/// [`Error::SpreadingUnavailable`] when the spreading estimate is vacuous
/// at this horizon; callers choose a larger t.
pub fn mixture_coupling<R: Rng + ?Sized>(
    pair0: &CoupledPair,
    t: f64,
    params: &ModelParams,
    rng: &mut R,
) -> Result<CoupledPair> {
    let torus = params.torus();
    let vab = conditional_var(t, params)?;
    let beta = spreading_beta(vab, torus.scale())?;
    if beta <= 0.0 {
        return Err(Error::SpreadingUnavailable {
            sigma2: vab,
            l: torus.scale(),
        });
    }

    let cov = covariance(t, params)?;
    let b = Normal::new(0.0, cov.s_bb.sqrt()).unwrap().sample(rng);
    let selector: f64 = rng.random();

    let flight1 = free_flight(&pair0.p1, t, params);
    let flight2 = free_flight(&pair0.p2, t, params);

    let (x1, x2) = if selector <= beta {
        // Both particles collapse to one shared uniform point.
        let u = torus.sample_uniform(rng);
        (u, u)
    } else {
        // One shared residual draw shifts both free flights.
        let s = residual_sampler(t, b, params, rng)?;
        (torus.wrap(flight1 + s.value()), torus.wrap(flight2 + s.value()))
    };

    let decay = (-params.lambda() * t).exp();
    Ok(CoupledPair {
        p1: PhasePoint::new(x1, decay * pair0.p1.v + b),
        p2: PhasePoint::new(x2, decay * pair0.p2.v + b),
    })
}
