//! Synchronous baseline: one shared noise draw applied to both particles
//! through the explicit solution. Velocities contract, but the spatial gap
//! never decays — the baseline the other couplings are measured against.

use rand::Rng;

use crate::error::Result;
use crate::kernel::{covariance, free_flight, sample_joint_noise, ModelParams, PhasePoint};

use super::CoupledPair;

pub fn synchronous_coupling<R: Rng + ?Sized>(
    pair0: &CoupledPair,
    t: f64,
    params: &ModelParams,
    rng: &mut R,
) -> Result<CoupledPair> {
    let cov = covariance(t, params)?;
    let (a, b) = sample_joint_noise(&cov, rng);
    let torus = params.torus();
    let decay = (-params.lambda() * t).exp();
    Ok(CoupledPair {
        p1: PhasePoint::new(
            torus.wrap(free_flight(&pair0.p1, t, params) + a),
            decay * pair0.p1.v + b,
        ),
        p2: PhasePoint::new(
            torus.wrap(free_flight(&pair0.p2, t, params) + a),
            decay * pair0.p2.v + b,
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gap_evolution_is_deterministic() {
        let params = ModelParams::new(2.0, 1.5).unwrap();
        let torus = params.torus();
        let pair = CoupledPair::new(
            PhasePoint::new(torus.wrap(0.2), 0.9),
            PhasePoint::new(torus.wrap(1.7), -0.4),
        );
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let t = 0.8;
        let dv0 = pair.p1.v - pair.p2.v;
        let dx0 = pair.p1.x.value() - pair.p2.x.value();
        let p = 1.0 - (-params.lambda() * t).exp();
        for _ in 0..300 {
            let out = synchronous_coupling(&pair, t, &params, &mut rng).unwrap();
            let dv = out.p1.v - out.p2.v;
            assert!((dv - (-params.lambda() * t).exp() * dv0).abs() < 1e-14);
            // Lifted spatial gap follows the explicit solution exactly.
            let expected = dx0 + p / params.lambda() * dv0;
            let got = torus.signed_delta(out.p1.x, out.p2.x);
            let want = torus.signed_delta(torus.wrap(expected), torus.wrap(0.0));
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn equal_velocities_freeze_the_spatial_gap() {
        let params = ModelParams::new(1.0, 1.0).unwrap();
        let torus = params.torus();
        let pair = CoupledPair::new(
            PhasePoint::new(torus.wrap(0.0), 0.7),
            PhasePoint::new(torus.wrap(2.0), 0.7),
        );
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for t in [0.3, 1.0, 4.0] {
            let out = synchronous_coupling(&pair, t, &params, &mut rng).unwrap();
            let d = torus.dist(out.p1.x, out.p2.x);
            assert!((d - 2.0).abs() < 1e-12, "gap {d} at t {t}");
        }
    }
}
