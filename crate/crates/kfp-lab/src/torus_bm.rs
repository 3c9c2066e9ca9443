//! Coupled Brownian motions on the torus, used by the square-root-scaling
//! and martingale experiments. Only the difference process matters for the
//! reflection coupling, so it is simulated directly; exits through either
//! end of (0, 2πL) are detected with the Brownian-bridge correction.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use kfp_core::coupling::{detect_interval_exit, Boundary};
use kfp_core::torus::Torus;

use crate::config::CouplingKind;

/// Difference path of two reflection-coupled Brownian motions, absorbed at
/// {0, 2πL}. `rate` is the variance rate of the difference (4/λ² for the
/// drift-corrected coordinates, 4 for standard-rate motions).
pub struct AbsorbingDifference {
    pub torus: Torus,
    pub rate: f64,
    pub h: f64,
    step_sd: f64,
    /// Lift value; frozen at 0 or 2πL after absorption.
    pub m: f64,
    pub absorbed: bool,
}

impl AbsorbingDifference {
    pub fn new(torus: Torus, rate: f64, h: f64, m0: f64) -> Self {
        let absorbed = m0 <= 0.0 || m0 >= torus.period();
        AbsorbingDifference {
            torus,
            rate,
            h,
            step_sd: (rate * h).sqrt(),
            m: m0.clamp(0.0, torus.period()),
            absorbed,
        }
    }

    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        if self.absorbed {
            return;
        }
        let xi: f64 = StandardNormal.sample(rng);
        let next = self.m + self.step_sd * xi;
        match detect_interval_exit(self.m, next, self.torus.period(), self.rate, self.h, rng) {
            Some(crossing) => {
                self.absorbed = true;
                self.m = match crossing.boundary {
                    Boundary::Lower => 0.0,
                    Boundary::Upper => self.torus.period(),
                };
            }
            None => self.m = next,
        }
    }

    /// Torus distance |M|_T, zero once absorbed.
    pub fn torus_distance(&self) -> f64 {
        self.m.min(self.torus.period() - self.m)
    }
}

/// Difference path of two coupled standard-rate torus Brownian motions with
/// the realized quadratic variation of the difference accumulated per step.
/// Reflection absorbs (then synchronises); the synchronous coupling keeps
/// the difference frozen; independent motions never merge.
pub struct CoupledBmDifference {
    pub torus: Torus,
    pub kind: CouplingKind,
    h: f64,
    step_sd: f64,
    rate: f64,
    /// Lift value of W¹ − W².
    pub d: f64,
    /// Realized quadratic variation Σ(ΔD)².
    pub qv: f64,
    pub absorbed: bool,
}

impl CoupledBmDifference {
    pub fn new(torus: Torus, kind: CouplingKind, h: f64, d0: f64) -> Self {
        let rate = match kind {
            CouplingKind::Reflection => 4.0,
            CouplingKind::Synchronous => 0.0,
            CouplingKind::Independent => 2.0,
        };
        let absorbed =
            kind == CouplingKind::Reflection && (d0 <= 0.0 || d0 >= torus.period());
        CoupledBmDifference {
            torus,
            kind,
            h,
            step_sd: (rate * h).sqrt(),
            rate,
            d: d0,
            qv: 0.0,
            absorbed,
        }
    }

    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        match self.kind {
            CouplingKind::Synchronous => {}
            CouplingKind::Independent => {
                let xi: f64 = StandardNormal.sample(rng);
                let delta = self.step_sd * xi;
                self.d += delta;
                self.qv += delta * delta;
            }
            CouplingKind::Reflection => {
                if self.absorbed {
                    return;
                }
                let xi: f64 = StandardNormal.sample(rng);
                let delta = self.step_sd * xi;
                let next = self.d + delta;
                match detect_interval_exit(
                    self.d,
                    next,
                    self.torus.period(),
                    self.rate,
                    self.h,
                    rng,
                ) {
                    Some(crossing) => {
                        let target = match crossing.boundary {
                            Boundary::Lower => 0.0,
                            Boundary::Upper => self.torus.period(),
                        };
                        let realized = target - self.d;
                        self.qv += realized * realized;
                        self.d = target;
                        self.absorbed = true;
                    }
                    None => {
                        self.d = next;
                        self.qv += delta * delta;
                    }
                }
            }
        }
    }

    /// Torus distance |W¹ − W²|_T.
    pub fn torus_distance(&self) -> f64 {
        let w = self.d.rem_euclid(self.torus.period());
        w.min(self.torus.period() - w)
    }

    /// Martingale statistic L sin(D/2L) e^{QV/8L²}.
    pub fn h_statistic(&self) -> f64 {
        let l = self.torus.scale();
        l * (self.d / (2.0 * l)).sin() * (self.qv / (8.0 * l * l)).exp()
    }
}
