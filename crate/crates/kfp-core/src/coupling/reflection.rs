//! Reflection/synchronisation coupling in drift-corrected coordinates.
//!
//! Both particles follow dY = (1/λ) dW, dV = −λV dt + dW. Until the
//! drift-corrected positions meet, particle 2 is driven by the negated
//! increments of particle 1's Brownian motion; afterwards by the same
//! increments. Every step uses the exact joint Gaussian one-step law of
//! (ΔW, ∫e^{−λ(h−s)}dW), so the only discretization left is the meeting
//! time, which is sharpened by a Brownian-bridge crossing test and a
//! conditional mid-step split.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::kernel::{drift_corrected, ModelParams};
use crate::torus::TorusCoord;

use super::CoupledPair;

/// State of one coupled trajectory at a step boundary.
#[derive(Debug, Clone, Copy)]
pub struct CouplingPathState {
    pub t: f64,
    /// Drift-corrected positions Y^i = X^i + V^i/λ.
    pub y1: TorusCoord,
    pub y2: TorusCoord,
    pub v1: f64,
    pub v2: f64,
    /// Once true, y1 == y2 and stays so: the coupling has synchronised.
    pub merged: bool,
    /// Realized meeting time, present iff merged.
    pub t_hit: Option<f64>,
}

impl CouplingPathState {
    /// Separation M = Y¹ − Y² on the lift, a value in [0, 2πL) that stays
    /// inside one period until the meeting time.
    pub fn separation(&self, params: &ModelParams) -> f64 {
        params.torus().separation(self.y1, self.y2)
    }

    /// Velocity difference Z = V¹ − V².
    pub fn velocity_gap(&self) -> f64 {
        self.v1 - self.v2
    }
}

/// Which end of the interval (0, period) a separation path left through.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy)]
pub struct Crossing {
    /// Fraction of the step elapsed at the crossing (linear interpolation
    /// for sign changes, midpoint for bridge-detected crossings).
    pub theta: f64,
    pub boundary: Boundary,
}

/// Probability that a Brownian bridge between two same-side endpoints
/// touches level zero within one step: exp(−2ab/(rate·h)).
pub fn bridge_crossing_prob(a: f64, b: f64, variance_rate: f64, h: f64) -> f64 {
    if a <= 0.0 || b <= 0.0 {
        return 1.0;
    }
    let exponent = -2.0 * a * b / (variance_rate * h);
    // Far from the boundary the probability underflows anyway.
    if exponent < -40.0 {
        0.0
    } else {
        exponent.exp()
    }
}

/// Exit detection for a one-step move of an interval-valued diffusion path
/// from `m_from` to `m_to` on (0, period). Sign changes are interpolated
/// linearly; same-side endpoints are tested with the Brownian-bridge
/// crossing probability to remove the systematic late-exit bias of naive
/// sign checks.
pub fn detect_interval_exit<R: Rng + ?Sized>(
    m_from: f64,
    m_to: f64,
    period: f64,
    variance_rate: f64,
    h: f64,
    rng: &mut R,
) -> Option<Crossing> {
    if m_from <= 0.0 {
        return Some(Crossing {
            theta: 0.0,
            boundary: Boundary::Lower,
        });
    }
    if m_from >= period {
        return Some(Crossing {
            theta: 0.0,
            boundary: Boundary::Upper,
        });
    }
    if m_to <= 0.0 {
        return Some(Crossing {
            theta: m_from / (m_from - m_to),
            boundary: Boundary::Lower,
        });
    }
    if m_to >= period {
        let theta = (period - m_from) / (m_to - m_from);
        return Some(Crossing {
            theta,
            boundary: Boundary::Upper,
        });
    }
    let p_lo = bridge_crossing_prob(m_from, m_to, variance_rate, h);
    let p_hi = bridge_crossing_prob(period - m_from, period - m_to, variance_rate, h);
    if p_lo + p_hi > 0.0 {
        let u: f64 = rng.random();
        if u < p_lo {
            return Some(Crossing {
                theta: 0.5,
                boundary: Boundary::Lower,
            });
        }
        if u < p_lo + p_hi {
            return Some(Crossing {
                theta: 0.5,
                boundary: Boundary::Upper,
            });
        }
    }
    None
}

/// Per-run constants of the exact one-step law for a fixed (λ, h).
///
/// The pair (ΔW, I) with I = ∫₀ʰ e^{−λ(h−s)} dW_s is jointly Gaussian with
/// Var ΔW = h, Cov = (1−e^{−λh})/λ, Var I = (1−e^{−2λh})/(2λ).
#[derive(Debug, Clone, Copy)]
pub struct StepCoeffs {
    h: f64,
    lambda: f64,
    exp_lh: f64,
    cov_wi: f64,
    var_i: f64,
    l11: f64,
    l21: f64,
    l22: f64,
    /// Variance rate 4/λ² of the separation M before merging.
    m_rate: f64,
}

impl StepCoeffs {
    pub fn new(params: &ModelParams, h: f64) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::parameter("h", "step size must be positive", h));
        }
        let lambda = params.lambda();
        let p = -(-lambda * h).exp_m1();
        let cov_wi = p / lambda;
        let var_i = p * (2.0 - p) / (2.0 * lambda);
        let l11 = h.sqrt();
        let l21 = cov_wi / l11;
        let l22 = (var_i - l21 * l21).max(0.0).sqrt();
        Ok(StepCoeffs {
            h,
            lambda,
            exp_lh: (-lambda * h).exp(),
            cov_wi,
            var_i,
            l11,
            l21,
            l22,
            m_rate: 4.0 / (lambda * lambda),
        })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let z1: f64 = StandardNormal.sample(rng);
        let z2: f64 = StandardNormal.sample(rng);
        (self.l11 * z1, self.l21 * z1 + self.l22 * z2)
    }

    /// Conditional draw of I_a = ∫₀ᵃ e^{−λ(a−s)} dW_s given the full-step
    /// values (ΔW, I), used to complete a step in synchronised mode after a
    /// mid-step merge without disturbing either marginal.
    fn conditional_partial_integral<R: Rng + ?Sized>(
        &self,
        a: f64,
        dw: f64,
        i_full: f64,
        rng: &mut R,
    ) -> f64 {
        let lambda = self.lambda;
        let p_a = -(-lambda * a).exp_m1();
        let var_ia = p_a * (2.0 - p_a) / (2.0 * lambda);
        let c_aw = p_a / lambda;
        let c_ai = (-(self.h - a) * lambda).exp() * var_ia;
        let det = self.h * self.var_i - self.cov_wi * self.cov_wi;
        if det <= 0.0 {
            // Degenerate full-step covariance; linear interpolation is the
            // best remaining estimate.
            return (a / self.h) * i_full;
        }
        let k1 = (self.var_i * c_aw - self.cov_wi * c_ai) / det;
        let k2 = (self.h * c_ai - self.cov_wi * c_aw) / det;
        let mean = k1 * dw + k2 * i_full;
        let var = (var_ia - (k1 * c_aw + k2 * c_ai)).max(0.0);
        let z: f64 = StandardNormal.sample(rng);
        mean + var.sqrt() * z
    }
}

/// Advance the coupled pair by one step of size `coeffs.h()`.
pub fn step_with<R: Rng + ?Sized>(
    state: &CouplingPathState,
    coeffs: &StepCoeffs,
    params: &ModelParams,
    rng: &mut R,
) -> CouplingPathState {
    let torus = params.torus();
    let h = coeffs.h;
    let (dw, i_full) = coeffs.draw(rng);
    let lambda = coeffs.lambda;

    if state.merged {
        let y = torus.wrap(state.y1.value() + dw / lambda);
        return CouplingPathState {
            t: state.t + h,
            y1: y,
            y2: y,
            v1: coeffs.exp_lh * state.v1 + i_full,
            v2: coeffs.exp_lh * state.v2 + i_full,
            merged: true,
            t_hit: state.t_hit,
        };
    }

    let m_from = state.separation(params);
    let m_to = m_from + 2.0 * dw / lambda;

    match detect_interval_exit(m_from, m_to, torus.period(), coeffs.m_rate, h, rng) {
        None => CouplingPathState {
            t: state.t + h,
            y1: torus.wrap(state.y1.value() + dw / lambda),
            y2: torus.wrap(state.y2.value() - dw / lambda),
            v1: coeffs.exp_lh * state.v1 + i_full,
            v2: coeffs.exp_lh * state.v2 - i_full,
            merged: false,
            t_hit: None,
        },
        Some(crossing) => {
            // Reflected until the interpolated meeting time a = θh, then
            // synchronised. Particle 1 keeps its full-step draw; particle 2
            // needs the conditional partial integral to flip its noise sign
            // only over the pre-merge fraction of the step.
            let a = crossing.theta.clamp(0.0, 1.0) * h;
            let i_a = coeffs.conditional_partial_integral(a, dw, i_full, rng);
            let tail_decay = (-(h - a) * lambda).exp();
            let y = torus.wrap(state.y1.value() + dw / lambda);
            CouplingPathState {
                t: state.t + h,
                y1: y,
                y2: y,
                v1: coeffs.exp_lh * state.v1 + i_full,
                v2: coeffs.exp_lh * state.v2 + i_full - 2.0 * tail_decay * i_a,
                merged: true,
                t_hit: Some(state.t + a),
            }
        }
    }
}

/// One step of the coupled evolution. Convenience form that rebuilds the
/// step coefficients; simulation loops should construct [`StepCoeffs`] once
/// and call [`step_with`].
pub fn reflection_coupling_step<R: Rng + ?Sized>(
    state: &CouplingPathState,
    h: f64,
    params: &ModelParams,
    rng: &mut R,
) -> Result<CouplingPathState> {
    let coeffs = StepCoeffs::new(params, h)?;
    Ok(step_with(state, &coeffs, params, rng))
}

/// Initial coupled state from a phase-space pair, relabeled so the initial
/// separation lies in [0, πL].
pub fn initial_state(pair0: &CoupledPair, params: &ModelParams) -> CouplingPathState {
    let torus = params.torus();
    let y1 = drift_corrected(&pair0.p1, params);
    let y2 = drift_corrected(&pair0.p2, params);
    let (y1, y2, v1, v2) = if torus.separation(y1, y2) <= torus.half_period() {
        (y1, y2, pair0.p1.v, pair0.p2.v)
    } else {
        (y2, y1, pair0.p2.v, pair0.p1.v)
    };
    let merged = torus.separation(y1, y2) == 0.0;
    CouplingPathState {
        t: 0.0,
        y1,
        y2: if merged { y1 } else { y2 },
        v1,
        v2,
        merged,
        t_hit: if merged { Some(0.0) } else { None },
    }
}

/// Full coupled trajectory at step resolution, including the initial state.
pub fn run_reflection_coupling<R: Rng + ?Sized>(
    pair0: &CoupledPair,
    t_end: f64,
    h: f64,
    params: &ModelParams,
    rng: &mut R,
) -> Result<Vec<CouplingPathState>> {
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(Error::parameter("t_end", "horizon must be positive", t_end));
    }
    let coeffs = StepCoeffs::new(params, h)?;
    let n_steps = (t_end / h).ceil() as usize;
    let mut states = Vec::with_capacity(n_steps + 1);
    let mut state = initial_state(pair0, params);
    states.push(state);
    for _ in 0..n_steps {
        state = step_with(&state, &coeffs, params, rng);
        states.push(state);
    }
    Ok(states)
}

/// Default step size 1e−3 · min(1, λ²L²), small against both decay scales.
pub fn default_step(params: &ModelParams) -> f64 {
    let scale = params.lambda() * params.lambda() * params.scale() * params.scale();
    1e-3 * scale.min(1.0)
}
