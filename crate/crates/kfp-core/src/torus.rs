//! Geometry of the flat torus T = R/(2πL Z) and wrapped Gaussian densities.
//!
//! Everything downstream standardizes on the canonical representative
//! `[0, 2πL)`. Signed differences are taken on the lift and re-wrapped, so
//! there is exactly one wrapping convention in the whole crate.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

/// A point of the torus in canonical coordinates, i.e. a value in `[0, 2πL)`.
///
/// Values can only be constructed through [`Torus::wrap`], which is what
/// keeps the canonical-representative invariant airtight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusCoord(f64);

impl TorusCoord {
    /// Canonical representative in `[0, 2πL)`.
    pub fn value(self) -> f64 {
        self.0
    }
}

/// The circle R/(2πL Z) of length 2πL, parameterized by its scale L.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Torus {
    l: f64,
}

impl Torus {
    pub fn new(l: f64) -> Result<Self> {
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::parameter("L", "torus scale must be positive", l));
        }
        Ok(Torus { l })
    }

    /// Scale parameter L.
    pub fn scale(&self) -> f64 {
        self.l
    }

    /// Circumference 2πL.
    pub fn period(&self) -> f64 {
        2.0 * PI * self.l
    }

    /// Half-circumference πL, the diameter of the torus metric.
    pub fn half_period(&self) -> f64 {
        PI * self.l
    }

    /// Density of the uniform measure, 1/(2πL).
    pub fn uniform_density(&self) -> f64 {
        1.0 / self.period()
    }

    /// Canonical representative of `x` in `[0, 2πL)`.
    pub fn wrap(&self, x: f64) -> TorusCoord {
        let p = self.period();
        let mut r = x.rem_euclid(p);
        // rem_euclid of a tiny negative value can round up to the period
        // itself; fold that back to zero.
        if r >= p {
            r = 0.0;
        }
        TorusCoord(r)
    }

    /// Geodesic distance min(|a−b|, 2πL−|a−b|), a value in `[0, πL]`.
    pub fn dist(&self, a: TorusCoord, b: TorusCoord) -> f64 {
        let d = (a.0 - b.0).abs();
        d.min(self.period() - d)
    }

    /// Representative of a−b in `[−πL, πL)`, computed on the lift.
    pub fn signed_delta(&self, a: TorusCoord, b: TorusCoord) -> f64 {
        self.wrap(a.0 - b.0 + self.half_period()).value() - self.half_period()
    }

    /// Separation a−b as a value in `[0, 2πL)`, the lift convention used by
    /// the reflection coupling while the difference stays inside one period.
    pub fn separation(&self, a: TorusCoord, b: TorusCoord) -> f64 {
        self.wrap(a.0 - b.0).value()
    }

    /// Smooth surrogate metric L² sin²((a−b)/2L).
    ///
    /// Periodic in the raw difference, so lift ambiguity is harmless. It is
    /// equivalent to the squared geodesic distance with constants 1/π² and
    /// 1/4 that do not depend on L.
    pub fn sin_metric_sq(&self, a: TorusCoord, b: TorusCoord) -> f64 {
        let s = ((a.0 - b.0) / (2.0 * self.l)).sin();
        self.l * self.l * s * s
    }

    /// Uniform draw from the torus.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> TorusCoord {
        self.wrap(rng.random_range(0.0..self.period()))
    }
}

/// Lower equivalence constant: sin_metric_sq / dist² ≥ 1/π².
pub const SIN_METRIC_LOWER: f64 = 1.0 / (PI * PI);
/// Upper equivalence constant: sin_metric_sq / dist² ≤ 1/4.
pub const SIN_METRIC_UPPER: f64 = 0.25;

/// Default absolute truncation tolerance for wrapped-density evaluation.
pub const DEFAULT_PDF_TOL: f64 = 1e-12;

/// A Gaussian on the line pushed onto the torus by summing over periods.
#[derive(Debug, Clone, Copy)]
pub struct WrappedGaussian {
    center: TorusCoord,
    sigma2: f64,
}

impl WrappedGaussian {
    pub fn new(center: TorusCoord, sigma2: f64) -> Result<Self> {
        if !(sigma2 > 0.0) || !sigma2.is_finite() {
            return Err(Error::parameter(
                "sigma2",
                "variance must be positive",
                sigma2,
            ));
        }
        Ok(WrappedGaussian { center, sigma2 })
    }

    pub fn center(&self) -> TorusCoord {
        self.center
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// Density at `x`, accurate to absolute truncation error ≤ `tol`.
    ///
    /// Narrow densities (σ² ≤ L²) are evaluated by the direct lattice sum,
    /// wide ones by the Fourier series; both converge superexponentially in
    /// their regime and the branches agree at the switch to within 2·tol.
    pub fn pdf(&self, x: TorusCoord, torus: &Torus, tol: f64) -> f64 {
        assert!(tol > 0.0, "tolerance must be positive");
        let l = torus.scale();
        if self.sigma2 <= l * l {
            self.pdf_lattice(x, torus)
        } else {
            self.pdf_fourier(x, torus, tol)
        }
    }

    /// Direct sum Σ_n h(x − c + 2πLn), truncated at |n| ≤ ceil(6σ/2πL) + 2.
    fn pdf_lattice(&self, x: TorusCoord, torus: &Torus) -> f64 {
        let p = torus.period();
        let sigma = self.sigma2.sqrt();
        let n_max = (6.0 * sigma / p).ceil() as i64 + 2;
        let d = torus.signed_delta(x, self.center);
        let norm = 1.0 / (2.0 * PI * self.sigma2).sqrt();
        let mut sum = 0.0;
        for n in -n_max..=n_max {
            let y = d + p * n as f64;
            sum += (-y * y / (2.0 * self.sigma2)).exp();
        }
        norm * sum
    }

    /// Fourier series (1/2πL)[1 + 2 Σ_{k≥1} e^{−k²σ²/2L²} cos(k(x−c)/L)].
    fn pdf_fourier(&self, x: TorusCoord, torus: &Torus, tol: f64) -> f64 {
        let l = torus.scale();
        let d = x.value() - self.center.value();
        let decay = self.sigma2 / (2.0 * l * l);
        let base = torus.uniform_density();
        let mut sum = 0.0;
        let mut k = 1u32;
        loop {
            let amp = (-decay * (k as f64) * (k as f64)).exp();
            // Terms shrink superexponentially; once the bound on the next
            // term is below half the tolerance the tail is below tol.
            if 2.0 * base * amp < 0.5 * tol || k > 10_000 {
                break;
            }
            sum += amp * ((k as f64) * d / l).cos();
            k += 1;
        }
        base * (1.0 + 2.0 * sum)
    }

    /// Draw from the wrapped density: sample the line Gaussian and wrap.
    pub fn sample<R: Rng + ?Sized>(&self, torus: &Torus, rng: &mut R) -> TorusCoord {
        let normal = Normal::new(self.center.value(), self.sigma2.sqrt()).unwrap();
        torus.wrap(normal.sample(rng))
    }
}

/// Guaranteed uniform component of a wrapped Gaussian of variance σ²:
/// β = 1 − 2e^{−σ²/2L²}/(1 − e^{−σ²/2L²}), clamped below at 0.
///
/// For small σ the formula is negative and the estimate is vacuous, not
/// invalid; callers treat β = 0 as "no uniform component available".
pub fn spreading_beta(sigma2: f64, l: f64) -> Result<f64> {
    if !(sigma2 > 0.0) || !sigma2.is_finite() {
        return Err(Error::parameter(
            "sigma2",
            "variance must be positive",
            sigma2,
        ));
    }
    if !(l > 0.0) || !l.is_finite() {
        return Err(Error::parameter("L", "torus scale must be positive", l));
    }
    let r = (-sigma2 / (2.0 * l * l)).exp();
    if r >= 1.0 {
        // Underflow guard: σ so small that e^{−σ²/2L²} rounds to 1.
        return Ok(0.0);
    }
    let one_minus_beta = 2.0 * r / (1.0 - r);
    Ok((1.0 - one_minus_beta).max(0.0))
}
