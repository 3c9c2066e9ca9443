//! Exact W2 between equally weighted sample clouds on T×R with the cylinder
//! ground metric. Entropic approximations are deliberately avoided: decay
//! fits downstream need unbiased distances.

mod assignment;

pub use assignment::solve as solve_assignment;

use crate::error::{Error, Result};
use crate::kernel::PhasePoint;
use crate::torus::Torus;

use super::coupling::CoupledPair;

/// Squared cylinder distance |Δx|²_T + (Δv)².
pub fn ground_cost(p: &PhasePoint, q: &PhasePoint, torus: &Torus) -> f64 {
    let dx = torus.dist(p.x, q.x);
    let dv = p.v - q.v;
    dx * dx + dv * dv
}

/// Equally weighted sample cloud.
#[derive(Debug, Clone)]
pub struct EmpiricalMeasure {
    points: Vec<PhasePoint>,
}

impl EmpiricalMeasure {
    pub fn new(points: Vec<PhasePoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyInput("empirical measure needs at least one point"));
        }
        Ok(EmpiricalMeasure { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[PhasePoint] {
        &self.points
    }

    /// Marginal clouds of a list of coupled samples.
    pub fn from_pairs(pairs: &[CoupledPair]) -> Result<(Self, Self)> {
        let mu = EmpiricalMeasure::new(pairs.iter().map(|p| p.p1).collect())?;
        let nu = EmpiricalMeasure::new(pairs.iter().map(|p| p.p2).collect())?;
        Ok((mu, nu))
    }
}

/// Options for the exact solve.
#[derive(Debug, Clone, Copy)]
pub struct W2Options {
    /// Hard cap on the instance size (the solver is O(n³)).
    pub max_points: usize,
    /// Recompute costs on the fly instead of materializing the n×n matrix;
    /// slower but O(n) memory for very large clouds.
    pub streaming_costs: bool,
}

impl Default for W2Options {
    fn default() -> Self {
        W2Options {
            max_points: 4096,
            streaming_costs: false,
        }
    }
}

/// Exact W2 distance between two equal-size clouds: the square root of the
/// optimal mean assignment cost. Deterministic for identical inputs.
pub fn w2(mu: &EmpiricalMeasure, nu: &EmpiricalMeasure, torus: &Torus) -> Result<f64> {
    w2_with(mu, nu, torus, &W2Options::default())
}

pub fn w2_with(
    mu: &EmpiricalMeasure,
    nu: &EmpiricalMeasure,
    torus: &Torus,
    opts: &W2Options,
) -> Result<f64> {
    let n = mu.len();
    if n != nu.len() {
        return Err(Error::SizeMismatch {
            left: n,
            right: nu.len(),
        });
    }
    if n > opts.max_points {
        return Err(Error::SizeCap {
            n,
            cap: opts.max_points,
        });
    }
    let total = if opts.streaming_costs {
        let a = mu.points();
        let b = nu.points();
        solve_assignment(n, |i, j| ground_cost(&a[i], &b[j], torus)).1
    } else {
        let mut matrix = vec![0.0f64; n * n];
        for (i, p) in mu.points().iter().enumerate() {
            let row = &mut matrix[i * n..(i + 1) * n];
            for (j, q) in nu.points().iter().enumerate() {
                row[j] = ground_cost(p, q, torus);
            }
        }
        solve_assignment(n, |i, j| matrix[i * n + j]).1
    };
    Ok((total / n as f64).max(0.0).sqrt())
}

/// Monte Carlo upper bound on W2 from a particular coupling: the root mean
/// ground cost over the paired samples. Needs no assignment solve and
/// always dominates the exact distance between the same marginal clouds.
pub fn w2_upper_from_coupling(pairs: &[CoupledPair], torus: &Torus) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput("coupling upper bound needs at least one pair"));
    }
    let mean: f64 = pairs
        .iter()
        .map(|p| ground_cost(&p.p1, &p.p2, torus))
        .sum::<f64>()
        / pairs.len() as f64;
    Ok(mean.sqrt())
}
