//! Arrhenius regression of `log E[T]` on `2/sigma^2`.

use rand::Rng;
use serde::Serialize;

use crate::noise::{ReplicateKey, AUX_SIDE};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ols {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    /// Standard error of the slope; absent with fewer than three points.
    pub slope_se: Option<f64>,
}

/// Ordinary least squares `y = intercept + slope x`. Needs two distinct `x`.
pub fn ols(xs: &[f64], ys: &[f64]) -> Option<Ols> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if !(sxx > 0.0) {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - intercept - slope * x;
            r * r
        })
        .sum();
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    let slope_se = (n > 2).then(|| (sse / (nf - 2.0) / sxx).sqrt());
    Some(Ols {
        slope,
        intercept,
        r2,
        slope_se,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArrheniusFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub slope_se: Option<f64>,
    /// Percentile bootstrap interval (2.5%, 97.5%) for the slope.
    pub slope_ci: (f64, f64),
    pub n_points: usize,
    pub bootstrap_resamples: usize,
}

/// Type-7 sample quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = q * (n - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Fits `log(mean T)` on `2/sigma^2` over the given rows of uncensored times;
/// the slope interval resamples times within each row.
pub fn arrhenius_fit(
    sigmas: &[f64],
    times: &[Vec<f64>],
    resamples: usize,
    seed: u64,
) -> Option<ArrheniusFit> {
    let xs: Vec<f64> = sigmas.iter().map(|s| 2.0 / (s * s)).collect();
    let log_mean = |t: &[f64]| (t.iter().sum::<f64>() / t.len() as f64).ln();
    if times.iter().any(|t| t.is_empty()) {
        return None;
    }
    let ys: Vec<f64> = times.iter().map(|t| log_mean(t)).collect();
    if ys.iter().any(|y| !y.is_finite()) {
        return None;
    }
    let fit = ols(&xs, &ys)?;

    let mut rng = ReplicateKey::new(seed, u64::MAX, 0).rng(AUX_SIDE, 1);
    let mut slopes = Vec::with_capacity(resamples);
    let mut buf = Vec::new();
    for _ in 0..resamples {
        let yb: Vec<f64> = times
            .iter()
            .map(|t| {
                buf.clear();
                buf.extend((0..t.len()).map(|_| t[rng.random_range(0..t.len())]));
                log_mean(&buf)
            })
            .collect();
        if let Some(f) = ols(&xs, &yb) {
            if f.slope.is_finite() {
                slopes.push(f.slope);
            }
        }
    }
    slopes.sort_by(f64::total_cmp);
    let slope_ci = if slopes.is_empty() {
        (f64::NAN, f64::NAN)
    } else {
        (
            quantile_sorted(&slopes, 0.025),
            quantile_sorted(&slopes, 0.975),
        )
    };
    Some(ArrheniusFit {
        slope: fit.slope,
        intercept: fit.intercept,
        r2: fit.r2,
        slope_se: fit.slope_se,
        slope_ci,
        n_points: xs.len(),
        bootstrap_resamples: resamples,
    })
}
