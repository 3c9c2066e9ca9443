//! Closed-form law of the kinetic SDE dX = V dt, dV = −λV dt + dW on T×R.
//!
//! The noise pair (A_t, B_t) entering the explicit solution is jointly
//! Gaussian with a covariance known in closed form, so transitions are
//! sampled exactly — no time-stepping anywhere in this module.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::torus::{Torus, TorusCoord};

/// Physical constants of the model: friction λ and torus scale L.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    lambda: f64,
    l: f64,
}

impl ModelParams {
    pub fn new(lambda: f64, l: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::parameter(
                "lambda",
                "friction must be positive",
                lambda,
            ));
        }
        // Torus::new validates l.
        Torus::new(l)?;
        Ok(ModelParams { lambda, l })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn scale(&self) -> f64 {
        self.l
    }

    pub fn torus(&self) -> Torus {
        Torus::new(self.l).expect("validated at construction")
    }
}

/// A point (x, v) of the phase space T×R.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub x: TorusCoord,
    pub v: f64,
}

impl PhasePoint {
    pub fn new(x: TorusCoord, v: f64) -> Self {
        PhasePoint { x, v }
    }
}

/// Covariance of the noise pair (A_t, B_t) accumulated over a horizon t.
#[derive(Debug, Clone, Copy)]
pub struct TransitionCovariance {
    pub t: f64,
    pub s_aa: f64,
    pub s_ab: f64,
    pub s_bb: f64,
}

impl TransitionCovariance {
    pub fn det(&self) -> f64 {
        self.s_aa * self.s_bb - self.s_ab * self.s_ab
    }
}

/// Conditional law of A given B = b: a one-dimensional Gaussian.
#[derive(Debug, Clone, Copy)]
pub struct ConditionalGaussian {
    pub mean: f64,
    pub var: f64,
}

// Series coefficients of f(u) = u − 2(1−e^{−u}) + (1−e^{−2u})/2, the scaled
// position variance. The closed form cancels catastrophically for small u;
// the leading term is u³/3.
const F_SERIES: [f64; 9] = [
    1.0 / 3.0,                // u^3
    -0.25,                    // u^4
    7.0 / 60.0,               // u^5
    -1.0 / 24.0,              // u^6
    31.0 / 2520.0,            // u^7
    -1.0 / 320.0,             // u^8
    254.0 / 362880.0,         // u^9
    -510.0 / 3628800.0,       // u^10
    1022.0 / 39916800.0,      // u^11
];

const F_SERIES_CUTOFF: f64 = 0.08;

/// f(u) = u − 2(1−e^{−u}) + (1−e^{−2u})/2, accurate for all u ≥ 0.
fn f_scaled_aa(u: f64) -> f64 {
    if u <= F_SERIES_CUTOFF {
        let mut acc = 0.0;
        for c in F_SERIES.iter().rev() {
            acc = acc * u + c;
        }
        acc * u * u * u
    } else {
        // Algebraic reduction with p = 1 − e^{−u}:
        //   f(u) = (u − p) − p²/2,  u − p = u + expm1(−u).
        let p = -(-u).exp_m1();
        (u + (-u).exp_m1()) - 0.5 * p * p
    }
}

/// Closed-form covariance of (A_t, B_t).
///
/// With p = 1 − e^{−λt}:  Σ_AB = p²/(2λ²) and Σ_BB = p(2−p)/(2λ), both free
/// of cancellation; Σ_AA uses the guarded evaluation above.
pub fn covariance(t: f64, params: &ModelParams) -> Result<TransitionCovariance> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::parameter("t", "time must be nonnegative", t));
    }
    let lambda = params.lambda();
    let u = lambda * t;
    let p = -(-u).exp_m1();
    let s_ab = p * p / (2.0 * lambda * lambda);
    let s_bb = p * (2.0 - p) / (2.0 * lambda);
    let s_aa = f_scaled_aa(u) / (lambda * lambda * lambda);
    let cov = TransitionCovariance { t, s_aa, s_ab, s_bb };
    debug_assert!(cov.s_aa >= 0.0 && cov.s_bb >= 0.0);
    debug_assert!(cov.det() >= -1e-12 * (cov.s_aa * cov.s_bb).max(1.0));
    Ok(cov)
}

/// Variance of A given B, independent of the conditioning value b.
pub fn conditional_var(t: f64, params: &ModelParams) -> Result<f64> {
    let cov = covariance(t, params)?;
    if cov.s_bb <= 0.0 {
        return Err(Error::DegenerateConditioning { t });
    }
    Ok((cov.s_aa - cov.s_ab * cov.s_ab / cov.s_bb).max(0.0))
}

/// Conditional law of A given B = b: mean Σ_AB Σ_BB⁻¹ b, variance
/// Σ_AA − Σ_AB² Σ_BB⁻¹ (standard Gaussian conditioning).
pub fn conditional_a_given_b(t: f64, b: f64, params: &ModelParams) -> Result<ConditionalGaussian> {
    let cov = covariance(t, params)?;
    if cov.s_bb <= 0.0 {
        return Err(Error::DegenerateConditioning { t });
    }
    let slope = cov.s_ab / cov.s_bb;
    Ok(ConditionalGaussian {
        mean: slope * b,
        var: (cov.s_aa - cov.s_ab * slope).max(0.0),
    })
}

/// One exact joint draw of (A, B). Cholesky with the A-pivot first; when the
/// pivot degenerates (t ≈ 0) fall back to the symmetric eigendecomposition
/// with eigenvalues clamped at zero. Both branches consume exactly two
/// standard normals, so streams stay aligned across parameter values.
pub fn sample_joint_noise<R: Rng + ?Sized>(cov: &TransitionCovariance, rng: &mut R) -> (f64, f64) {
    let z1: f64 = StandardNormal.sample(rng);
    let z2: f64 = StandardNormal.sample(rng);
    let pivot = cov.s_aa.sqrt();
    if pivot > 1e-14 {
        let l21 = cov.s_ab / pivot;
        let l22 = (cov.s_bb - l21 * l21).max(0.0).sqrt();
        (pivot * z1, l21 * z1 + l22 * z2)
    } else {
        // 2x2 symmetric eigendecomposition.
        let half_tr = 0.5 * (cov.s_aa + cov.s_bb);
        let half_diff = 0.5 * (cov.s_aa - cov.s_bb);
        let disc = (half_diff * half_diff + cov.s_ab * cov.s_ab).sqrt();
        let e1 = (half_tr + disc).max(0.0);
        let e2 = (half_tr - disc).max(0.0);
        // Eigenvector for e1; the degenerate case collapses to the axes.
        let (c, s) = if cov.s_ab.abs() > 0.0 {
            let theta = 0.5 * (2.0 * cov.s_ab).atan2(cov.s_aa - cov.s_bb);
            (theta.cos(), theta.sin())
        } else if cov.s_aa >= cov.s_bb {
            (1.0, 0.0)
        } else {
            (0.0, 1.0)
        };
        let w1 = e1.sqrt() * z1;
        let w2 = e2.sqrt() * z2;
        (c * w1 - s * w2, s * w1 + c * w2)
    }
}

/// Deterministic part of the position update: x0 + (1 − e^{−λt}) v0 / λ on
/// the lift (not wrapped).
pub fn free_flight(p0: &PhasePoint, t: f64, params: &ModelParams) -> f64 {
    let p = -(-params.lambda() * t).exp_m1();
    p0.x.value() + p / params.lambda() * p0.v
}

/// One exact transition draw over horizon t.
pub fn sample_transition<R: Rng + ?Sized>(
    p0: &PhasePoint,
    t: f64,
    params: &ModelParams,
    rng: &mut R,
) -> Result<PhasePoint> {
    let cov = covariance(t, params)?;
    let (a, b) = sample_joint_noise(&cov, rng);
    let torus = params.torus();
    Ok(PhasePoint {
        x: torus.wrap(free_flight(p0, t, params) + a),
        v: (-params.lambda() * t).exp() * p0.v + b,
    })
}

/// Drift-corrected position Y = X + V/λ, a Brownian motion of rate 1/λ² on
/// the torus.
pub fn drift_corrected(pt: &PhasePoint, params: &ModelParams) -> TorusCoord {
    params.torus().wrap(pt.x.value() + pt.v / params.lambda())
}
