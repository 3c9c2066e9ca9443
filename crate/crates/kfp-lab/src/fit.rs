//! Exponential-rate extraction from noisy decay series by weighted least
//! squares on the log scale.

use crate::error::{LabError, Result};

/// Result of a log-linear decay fit.
#[derive(Debug, Clone, Copy)]
pub struct DecayFit {
    /// Negated slope of log(value) against t.
    pub rate: f64,
    pub log_intercept: f64,
    /// Weighted coefficient of determination, clamped to [0, 1].
    pub r2: f64,
    /// Time window actually used (t_lo, t_hi).
    pub window: (f64, f64),
}

/// One observation: (t, value, standard error of the value).
pub type SeriesPoint = (f64, f64, f64);

/// Fit log(value) ~ a − rate·t on the largest suffix of points that carry
/// signal (value > 3·stderr and positive). Points are weighted by the
/// delta-method variance of log(value); exact points (stderr 0) get equal
/// weights. Needs at least four usable points.
pub fn fit_rate(series: &[SeriesPoint]) -> Result<DecayFit> {
    let valid = |&(_, v, se): &SeriesPoint| v > 0.0 && v > 3.0 * se;
    let last_valid = match series.iter().rposition(valid) {
        Some(i) => i,
        None => {
            return Err(LabError::Numerics(
                "rate fit: no points above the noise floor".into(),
            ))
        }
    };
    let mut start = last_valid;
    while start > 0 && valid(&series[start - 1]) {
        start -= 1;
    }
    let window = &series[start..=last_valid];
    if window.len() < 4 {
        return Err(LabError::Numerics(format!(
            "rate fit: only {} usable points (need 4)",
            window.len()
        )));
    }

    let weights: Vec<f64> = window
        .iter()
        .map(|&(_, v, se)| {
            let rel = (se / v).max(1e-9);
            1.0 / (rel * rel)
        })
        .collect();
    let wsum: f64 = weights.iter().sum();
    let xs: Vec<f64> = window.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = window.iter().map(|p| p.1.ln()).collect();
    let xbar = xs.iter().zip(&weights).map(|(x, w)| x * w).sum::<f64>() / wsum;
    let ybar = ys.iter().zip(&weights).map(|(y, w)| y * w).sum::<f64>() / wsum;
    let sxx: f64 = xs
        .iter()
        .zip(&weights)
        .map(|(x, w)| w * (x - xbar) * (x - xbar))
        .sum();
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .zip(&weights)
        .map(|((x, y), w)| w * (x - xbar) * (y - ybar))
        .sum();
    if sxx == 0.0 {
        return Err(LabError::Numerics("rate fit: degenerate time grid".into()));
    }
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .zip(&weights)
        .map(|((x, y), w)| {
            let r = y - (intercept + slope * x);
            w * r * r
        })
        .sum();
    let ss_tot: f64 = ys
        .iter()
        .zip(&weights)
        .map(|(y, w)| w * (y - ybar) * (y - ybar))
        .sum();
    let r2 = if ss_tot > 0.0 {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(DecayFit {
        rate: -slope,
        log_intercept: intercept,
        r2,
        window: (window[0].0, window[window.len() - 1].0),
    })
}

/// Standard error of the fitted rate for known per-point errors, from the
/// WLS covariance formula. Used by tests to build tolerance bands.
pub fn rate_se(series: &[SeriesPoint]) -> f64 {
    let pts: Vec<&SeriesPoint> = series
        .iter()
        .filter(|&&(_, v, se)| v > 0.0 && v > 3.0 * se)
        .collect();
    if pts.len() < 2 {
        return f64::INFINITY;
    }
    let weights: Vec<f64> = pts
        .iter()
        .map(|&&(_, v, se)| {
            let rel = (se / v).max(1e-9);
            1.0 / (rel * rel)
        })
        .collect();
    let wsum: f64 = weights.iter().sum();
    let xbar = pts
        .iter()
        .zip(&weights)
        .map(|(p, w)| p.0 * w)
        .sum::<f64>()
        / wsum;
    let sxx: f64 = pts
        .iter()
        .zip(&weights)
        .map(|(p, w)| w * (p.0 - xbar) * (p.0 - xbar))
        .sum();
    (1.0 / sxx).sqrt()
}
