//! Law of the meeting time of the reflection coupling.
//!
//! The separation M is a Brownian motion of variance rate 4/λ² on the
//! interval (0, 2πL), absorbed at both ends, so its survival function is the
//! classical Dirichlet heat-kernel series. For short horizons the sine
//! series converges slowly and the method-of-images form of the same
//! solution is used instead.

use statrs::function::erf::erf;

use crate::error::{Error, Result};
use crate::kernel::ModelParams;

/// Standard normal CDF.
fn phi(z: f64) -> f64 {
    0.5 * (1.0 + erf(z / std::f64::consts::SQRT_2))
}

/// P(T > t | M_0 = m0): survival probability of the separation started at
/// `m0 ∈ [0, 2πL]`, with absolute truncation error ≤ `tol`.
pub fn stopping_time_tail(t: f64, m0: f64, params: &ModelParams, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::parameter("tol", "tolerance must be positive", tol));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::parameter("t", "time must be nonnegative", t));
    }
    let period = params.torus().period();
    if !(0.0..=period).contains(&m0) {
        return Err(Error::parameter(
            "m0",
            "initial separation must lie in [0, 2*pi*L]",
            m0,
        ));
    }
    if m0 == 0.0 || m0 == period {
        return Ok(0.0);
    }
    if t == 0.0 {
        return Ok(1.0);
    }

    let lambda = params.lambda();
    let l = params.scale();
    let diffusive_scale = lambda * lambda * l * l;

    let value = if t < diffusive_scale / 50.0 {
        survival_by_images(t, m0, params)
    } else {
        survival_by_series(t, m0, params, tol)
    };
    Ok(value.clamp(0.0, 1.0))
}

/// Sine series (4/π) Σ_k (2k+1)⁻¹ e^{−(2k+1)²t/(2λ²L²)} sin((2k+1)m0/2L).
fn survival_by_series(t: f64, m0: f64, params: &ModelParams, tol: f64) -> f64 {
    let lambda = params.lambda();
    let l = params.scale();
    let decay = t / (2.0 * lambda * lambda * l * l);
    let four_over_pi = 4.0 / std::f64::consts::PI;
    let mut sum = 0.0;
    let mut k = 0u32;
    loop {
        let n = (2 * k + 1) as f64;
        let bound = four_over_pi / n * (-n * n * decay).exp();
        if bound < tol || k > 100_000 {
            break;
        }
        sum += four_over_pi / n * (-n * n * decay).exp() * (n * m0 / (2.0 * l)).sin();
        k += 1;
    }
    sum
}

/// Reflection-principle image expansion of the exit probability: the same
/// heat-equation solution, numerically stable for short horizons.
fn survival_by_images(t: f64, m0: f64, params: &ModelParams) -> f64 {
    let lambda = params.lambda();
    let period = params.torus().period();
    let sigma = 2.0 / lambda * t.sqrt();
    let n_images = (4.0 * sigma / period).ceil() as i64 + 2;
    let mut sum = 0.0;
    for n in -n_images..=n_images {
        let shift = 2.0 * period * n as f64;
        sum += phi((period - m0 + shift) / sigma) - phi((-m0 + shift) / sigma);
        sum -= phi((period + m0 + shift) / sigma) - phi((m0 + shift) / sigma);
    }
    sum
}

/// Closed-form upper bound C·|M0|_T·(1 + t^{−1/2})·e^{−t/(2λ²L²)} with
/// C = (2/πL)·max(1, √(πλ²L²/8)), which dominates the exact tail.
pub fn stopping_time_tail_bound(t: f64, m0: f64, params: &ModelParams) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::parameter(
            "t",
            "bound requires a positive time",
            t,
        ));
    }
    let torus = params.torus();
    let period = torus.period();
    if !(0.0..=period).contains(&m0) {
        return Err(Error::parameter(
            "m0",
            "initial separation must lie in [0, 2*pi*L]",
            m0,
        ));
    }
    let lambda = params.lambda();
    let l = params.scale();
    let m0_t = m0.min(period - m0);
    let c = 2.0 / (std::f64::consts::PI * l)
        * (std::f64::consts::PI * lambda * lambda * l * l / 8.0)
            .sqrt()
            .max(1.0);
    Ok(c * m0_t * (1.0 + 1.0 / t.sqrt()) * (-t / (2.0 * lambda * lambda * l * l)).exp())
}

/// Envelope |z0|²e^{−2λt} + C·m0·r(t) for the coupled second moment, where
/// the rate factor r follows the slower of the velocity contraction 2λ and
/// the separation exit rate 1/(2λ²L²), with a polynomial factor when the
/// two coincide (4L²λ³ = 1).
pub fn second_moment_bound(t: f64, z0: f64, m0: f64, c: f64, params: &ModelParams) -> f64 {
    debug_assert!(c > 0.0);
    let lambda = params.lambda();
    let l = params.scale();
    let vel_rate = 2.0 * lambda;
    let exit_rate = 1.0 / (2.0 * lambda * lambda * l * l);
    let balance = 4.0 * l * l * lambda.powi(3);
    let r = if (balance - 1.0).abs() <= 1e-12 {
        (1.0 + t) * (-vel_rate * t).exp()
    } else if vel_rate < exit_rate {
        (-vel_rate * t).exp()
    } else {
        (-exit_rate * t).exp()
    };
    z0 * z0 * (-2.0 * lambda * t).exp() + c * m0 * r
}
