//! The aggregate potential of an `N`-particle system,
//! `Upsilon_N(x) = sum_i V(x_i) + alpha/(4N) sum_{i,j} |x_i - x_j|^2`.

use crate::error::{Error, Result};
use crate::point::{self, Point};
use crate::potentials::{Potential, PotentialSpec};

fn mean(points: &[Point]) -> Point {
    let d = points[0].len();
    let mut m = vec![0.0; d];
    for x in points {
        for (mk, xk) in m.iter_mut().zip(x) {
            *mk += xk;
        }
    }
    let n = points.len() as f64;
    m.iter_mut().for_each(|c| *c /= n);
    m
}

fn check(points: &[Point], p: &PotentialSpec) -> Result<()> {
    if points.is_empty() {
        return Err(Error::config("particle configuration is empty"));
    }
    if points.iter().any(|x| x.len() != p.dimension) {
        return Err(Error::config(
            "particle dimension does not match the potential",
        ));
    }
    Ok(())
}

/// Mean form `sum_i V(x_i) + alpha/2 sum_i |x_i - xbar|^2`.
pub fn upsilon_n(points: &[Point], p: &PotentialSpec, alpha: f64) -> Result<f64> {
    check(points, p)?;
    let m = mean(points);
    let spread: f64 = points.iter().map(|x| point::dist(x, &m).powi(2)).sum();
    let confine: f64 = points.iter().map(|x| p.value(x)).sum();
    Ok(confine + 0.5 * alpha * spread)
}

/// Pairwise form, quadratic in `N`; used as an independent check.
pub fn upsilon_n_pairwise(points: &[Point], p: &PotentialSpec, alpha: f64) -> Result<f64> {
    check(points, p)?;
    let n = points.len() as f64;
    let mut pair = 0.0;
    for xi in points {
        for xj in points {
            pair += point::dist(xi, xj).powi(2);
        }
    }
    let confine: f64 = points.iter().map(|x| p.value(x)).sum();
    Ok(confine + alpha / (4.0 * n) * pair)
}

/// `d Upsilon_N / d x_i = grad V(x_i) + alpha (x_i - xbar)`
pub fn upsilon_grad(points: &[Point], p: &PotentialSpec, alpha: f64) -> Result<Vec<Point>> {
    check(points, p)?;
    let m = mean(points);
    Ok(points
        .iter()
        .map(|x| {
            let g = p.grad(x);
            g.iter()
                .zip(x.iter().zip(&m))
                .map(|(gk, (xk, mk))| gk + alpha * (xk - mk))
                .collect()
        })
        .collect())
}

/// Replicated wells `(l1, ..., l1)` and `(l2, ..., l2)`, checked to be
/// critical points of `Upsilon_N`.
pub fn upsilon_minimizers(
    p: &PotentialSpec,
    alpha: f64,
    wells: (&[f64], &[f64]),
    n: usize,
) -> Result<(Vec<Point>, Vec<Point>)> {
    if n == 0 {
        return Err(Error::config("particle count must be positive"));
    }
    let a = vec![wells.0.to_vec(); n];
    let b = vec![wells.1.to_vec(); n];
    for cfg in [&a, &b] {
        let worst = upsilon_grad(cfg, p, alpha)?
            .iter()
            .map(|g| point::norm(g))
            .fold(0.0, f64::max);
        if worst > 1e-10 {
            return Err(Error::numeric(format!(
                "replicated well is not a critical point of the aggregate potential (|grad| = {worst:.3e})"
            )));
        }
    }
    Ok((a, b))
}
