//! Statistical machinery shared by the verification harness: KS tests,
//! an energy-distance two-sample test, chi-square goodness of fit, and a
//! streaming moment accumulator.

use rand::seq::SliceRandom;
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Mean / variance / standard-error accumulator (Welford).
#[derive(Debug, Clone, Copy, Default)]
pub struct MeanVar {
    n: u64,
    mean: f64,
    m2: f64,
}

impl MeanVar {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn from_slice(xs: &[f64]) -> Self {
        let mut acc = MeanVar::default();
        for &x in xs {
            acc.push(x);
        }
        acc
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn var(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    /// Standard error of the mean.
    pub fn se(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            (self.var() / self.n as f64).sqrt()
        }
    }
}

/// Critical value x of the Kolmogorov distribution: P(sup|B| > x) = alpha,
/// solved from the series 2 Σ (−1)^{k−1} e^{−2k²x²}.
pub fn kolmogorov_critical(alpha: f64) -> f64 {
    assert!(alpha > 0.0 && alpha < 1.0);
    let tail = |x: f64| -> f64 {
        let mut s = 0.0;
        for k in 1..=100 {
            let term = (-2.0 * (k as f64) * (k as f64) * x * x).exp();
            s += if k % 2 == 1 { term } else { -term };
        }
        2.0 * s
    };
    let (mut lo, mut hi) = (0.2, 4.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if tail(mid) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// One-sample KS test of `sample` against the CDF closure. Returns the
/// statistic and whether the null is retained at the given level.
pub fn ks_one_sample<F: Fn(f64) -> f64>(sample: &[f64], cdf: F, level: f64) -> (f64, bool) {
    assert!(!sample.is_empty());
    let mut xs = sample.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - f).abs());
    }
    // Stephens' small-sample correction of the asymptotic critical value.
    let crit = kolmogorov_critical(level) / (n.sqrt() + 0.12 + 0.11 / n.sqrt());
    (d, d <= crit)
}

/// Two-sample KS test; retains the null when D ≤ c(α)·√((n+m)/nm).
pub fn ks_two_sample(a: &[f64], b: &[f64], level: f64) -> (f64, bool) {
    assert!(!a.is_empty() && !b.is_empty());
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(|u, v| u.partial_cmp(v).unwrap());
    ys.sort_by(|u, v| u.partial_cmp(v).unwrap());
    let (n, m) = (xs.len(), ys.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let x = xs[i];
        let y = ys[j];
        if x <= y {
            i += 1;
        }
        if y <= x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let crit =
        kolmogorov_critical(level) * ((n + m) as f64 / (n as f64 * m as f64)).sqrt();
    (d, d <= crit)
}

/// Result of the energy-distance two-sample test.
#[derive(Debug, Clone, Copy)]
pub struct EnergyTest {
    /// Scaled statistic nm/(n+m) · E.
    pub statistic: f64,
    /// Permutation-null threshold at the requested level.
    pub threshold: f64,
    pub retained: bool,
}

fn energy_statistic<T, D: Fn(&T, &T) -> f64>(xs: &[T], ys: &[T], dist: &D) -> f64 {
    let n = xs.len();
    let m = ys.len();
    let mut dxy = 0.0;
    for x in xs {
        for y in ys {
            dxy += dist(x, y);
        }
    }
    let mut dxx = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            dxx += dist(&xs[i], &xs[j]);
        }
    }
    let mut dyy = 0.0;
    for i in 0..m {
        for j in (i + 1)..m {
            dyy += dist(&ys[i], &ys[j]);
        }
    }
    2.0 * dxy / (n as f64 * m as f64)
        - 2.0 * dxx / (n as f64 * n as f64)
        - 2.0 * dyy / (m as f64 * m as f64)
}

/// Energy-distance two-sample test with a permutation null.
///
/// The statistic uses the full samples. The permutation null is estimated on
/// random subsamples of size `null_subsample` per group under the standard
/// nm/(n+m) scaling, which has the same limiting null law; this keeps the
/// O(B·n²) permutation cost bounded for large n.
pub fn energy_two_sample<T: Clone, D, R>(
    xs: &[T],
    ys: &[T],
    dist: D,
    level: f64,
    n_perm: usize,
    null_subsample: usize,
    rng: &mut R,
) -> EnergyTest
where
    D: Fn(&T, &T) -> f64,
    R: Rng + ?Sized,
{
    let n = xs.len();
    let m = ys.len();
    assert!(n > 1 && m > 1);
    let scale = (n * m) as f64 / (n + m) as f64;
    let statistic = scale * energy_statistic(xs, ys, &dist);

    let s = null_subsample.min(n).min(m);
    let sub_scale = (s * s) as f64 / (2 * s) as f64;
    let mut pooled: Vec<T> = xs.iter().chain(ys.iter()).cloned().collect();
    let mut null: Vec<f64> = Vec::with_capacity(n_perm);
    for _ in 0..n_perm {
        pooled.shuffle(rng);
        let e = energy_statistic(&pooled[..s], &pooled[s..2 * s], &dist);
        null.push(sub_scale * e);
    }
    null.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // Order-statistic estimate of the (1−level) quantile.
    let k = (((n_perm + 1) as f64) * (1.0 - level)).ceil() as usize;
    let threshold = null[k.min(n_perm) - 1];
    EnergyTest {
        statistic,
        threshold,
        retained: statistic <= threshold,
    }
}

/// Chi-square goodness-of-fit of observed counts against expected counts.
/// Degrees of freedom are bins − 1.
pub fn chi_square_gof(observed: &[u64], expected: &[f64], level: f64) -> (f64, bool) {
    assert_eq!(observed.len(), expected.len());
    assert!(observed.len() > 1);
    let stat: f64 = observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| {
            let d = o as f64 - e;
            d * d / e
        })
        .sum();
    let dof = (observed.len() - 1) as f64;
    let crit = ChiSquared::new(dof).unwrap().inverse_cdf(1.0 - level);
    (stat, stat <= crit)
}
