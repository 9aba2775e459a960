//! Finite-radius exit costs `hhat_eps`, `h_eps` and the threshold `eps_c`.

use serde::Serialize;

use super::cost::ConvexPair;
use super::sphere::{sphere_infimum, SphereMin};
use crate::error::{Error, Result};
use crate::noise::{ReplicateKey, AUX_SIDE};
use crate::point::{self, Point};
use crate::potentials::Potential;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimizerSet {
    pub epsilon: f64,
    pub points: Vec<Point>,
    pub value: f64,
}

fn check_eps(pair: &ConvexPair, eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < pair.eps0) {
        return Err(Error::config(format!(
            "collision radius {eps} must lie in (0, eps0) with eps0 = {}",
            pair.eps0
        )));
    }
    Ok(())
}

fn terms(pair: &ConvexPair, l: &[f64], eps: f64) -> Result<(SphereMin, SphereMin)> {
    Ok((
        sphere_infimum(&pair.psi1, &pair.well1, l, eps)?,
        sphere_infimum(&pair.psi2, &pair.well2, l, eps)?,
    ))
}

/// `h_eps(l)`: both sphere terms, wherever `l` sits.
pub fn eval_h_eps(pair: &ConvexPair, l: &[f64], eps: f64) -> Result<f64> {
    check_eps(pair, eps)?;
    let (a, b) = terms(pair, l, eps)?;
    Ok(a.value + b.value)
}

/// `hhat_eps(l)`: drops the term of a well lying strictly inside `B(l; eps)`.
pub fn eval_h_eps_hat(pair: &ConvexPair, l: &[f64], eps: f64) -> Result<f64> {
    check_eps(pair, eps)?;
    if point::dist(l, &pair.well1) < eps {
        return Ok(sphere_infimum(&pair.psi2, &pair.well2, l, eps)?.value);
    }
    if point::dist(l, &pair.well2) < eps {
        return Ok(sphere_infimum(&pair.psi1, &pair.well1, l, eps)?.value);
    }
    eval_h_eps(pair, l, eps)
}

/// Value and envelope gradient `grad Psi1(x*) + grad Psi2(y*)` of `h_eps`.
fn h_eps_with_grad(pair: &ConvexPair, l: &[f64], eps: f64) -> Result<(f64, Point)> {
    let (a, b) = terms(pair, l, eps)?;
    let g = point::add(&pair.psi1.grad(&a.argmin), &pair.psi2.grad(&b.argmin));
    Ok((a.value + b.value, g))
}

fn local_descent(pair: &ConvexPair, start: Point, eps: f64) -> Result<(f64, Point)> {
    let mut x = start;
    let (mut fx, mut g) = h_eps_with_grad(pair, &x, eps)?;
    let mut t = 0.5;
    for _ in 0..5_000 {
        let gn2 = point::dot(&g, &g);
        if gn2.sqrt() <= 1e-11 {
            break;
        }
        let mut accepted = false;
        while t > 1e-14 {
            let y = point::axpy(&x, -t, &g);
            let (fy, gy) = h_eps_with_grad(pair, &y, eps)?;
            if fy <= fx - 1e-4 * t * gn2 {
                x = y;
                fx = fy;
                g = gy;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
        t = (t * 2.0).min(1e3);
    }
    Ok((fx, x))
}

const CLUSTER_TOL: f64 = 1e-5;
const VALUE_TOL: f64 = 1e-8;

/// Multistart local descent on `h_eps`: `multistart` points evenly spaced on
/// the segment between the wells plus as many seeded perturbations of them.
pub fn minimize_h_eps(
    pair: &ConvexPair,
    eps: f64,
    multistart: usize,
    seed: u64,
) -> Result<MinimizerSet> {
    check_eps(pair, eps)?;
    let m = multistart.max(1);
    let span = point::dist(&pair.well1, &pair.well2).max(1e-3);
    let mut rng = ReplicateKey::new(seed, 0, 0).gaussian(AUX_SIDE, 0);
    let mut starts = Vec::with_capacity(2 * m);
    for i in 0..m {
        let s = (i as f64 + 0.5) / m as f64;
        starts.push(point::axpy(
            &pair.well1,
            s,
            &point::sub(&pair.well2, &pair.well1),
        ));
    }
    for i in 0..m {
        let jitter: Point = (0..pair.dim()).map(|_| 0.1 * span * rng.sample()).collect();
        starts.push(point::add(&starts[i], &jitter));
    }

    let mut found: Vec<(f64, Point)> = Vec::new();
    for s in starts {
        found.push(local_descent(pair, s, eps)?);
    }
    let best = found.iter().map(|f| f.0).fold(f64::INFINITY, f64::min);
    if !best.is_finite() {
        return Err(Error::numeric(
            "h_eps minimization produced no finite value",
        ));
    }
    found.retain(|f| f.0 <= best + VALUE_TOL);
    found.sort_by(|a, b| a.0.total_cmp(&b.0).then(point::lex_cmp(&a.1, &b.1)));
    let mut points: Vec<Point> = Vec::new();
    for (_, x) in found {
        if !points.iter().any(|q| point::dist(q, &x) <= CLUSTER_TOL) {
            points.push(x);
        }
    }
    points.sort_by(|a, b| point::lex_cmp(a, b));
    Ok(MinimizerSet {
        epsilon: eps,
        points,
        value: best,
    })
}

/// `m_{1,eps} = inf_{l in B(well1; eps)} inf_{y in dB(l; eps)} Psi2(y) - Psi2(well2)`.
///
/// The spheres of radius `eps` centred in `B(well1; eps)` sweep out
/// `B(well1; 2 eps)`, and a convex function with its minimum outside a ball
/// attains the ball infimum on the boundary.
pub fn m_eps(pair: &ConvexPair, which: usize, eps: f64) -> Result<f64> {
    let (center, psi, well) = match which {
        1 => (&pair.well1, &pair.psi2, &pair.well2),
        2 => (&pair.well2, &pair.psi1, &pair.well1),
        _ => return Err(Error::config("m_eps index must be 1 or 2")),
    };
    if point::dist(center, well) <= 2.0 * eps {
        return Ok(0.0);
    }
    Ok(sphere_infimum(psi as &dyn Potential, well, center, 2.0 * eps)?.value)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsCertificate {
    pub epsilon: f64,
    pub inf_h_eps: f64,
    pub m1: f64,
    pub m2: f64,
    pub certified: bool,
}

/// Per-radius certificate rows for [`estimate_eps_c`].
pub fn eps_c_table(pair: &ConvexPair, grid: &[f64]) -> Result<Vec<EpsCertificate>> {
    if grid.is_empty() {
        return Err(Error::config("eps_c grid is empty"));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::config("eps_c grid must be strictly ascending"));
    }
    grid.iter()
        .map(|&eps| {
            let inf_h = minimize_h_eps(pair, eps, 8, 0)?.value;
            let m1 = m_eps(pair, 1, eps)?;
            let m2 = m_eps(pair, 2, eps)?;
            Ok(EpsCertificate {
                epsilon: eps,
                inf_h_eps: inf_h,
                m1,
                m2,
                certified: m1 > inf_h && m2 > inf_h,
            })
        })
        .collect()
}

/// Largest radius of the certified prefix of `grid` (a lower bound for
/// `eps_c`); `0.0` when even the smallest radius is not certified.
pub fn estimate_eps_c(pair: &ConvexPair, grid: &[f64]) -> Result<f64> {
    let table = eps_c_table(pair, grid)?;
    Ok(table
        .iter()
        .take_while(|r| r.certified)
        .last()
        .map_or(0.0, |r| r.epsilon))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::EffectivePotential;
    use approx::assert_abs_diff_eq;

    fn quad_pair() -> ConvexPair {
        ConvexPair::new(
            EffectivePotential::quadratic(1.0, vec![-1.0]).unwrap(),
            EffectivePotential::quadratic(1.0, vec![1.0]).unwrap(),
            &[-1.5],
            &[1.5],
        )
        .unwrap()
    }

    #[test]
    fn quadratic_pair_h_eps_at_origin() {
        let pair = quad_pair();
        assert_abs_diff_eq!(
            eval_h_eps(&pair, &[0.0], 0.1).unwrap(),
            0.81,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            eval_h_eps_hat(&pair, &[0.0], 0.1).unwrap(),
            0.81,
            epsilon = 1e-14
        );
    }

    #[test]
    fn hat_drops_the_covered_well() {
        let pair = quad_pair();
        let l = [-1.0];
        let hat = eval_h_eps_hat(&pair, &l, 0.3).unwrap();
        let only2 = sphere_infimum(&pair.psi2, &pair.well2, &l, 0.3)
            .unwrap()
            .value;
        assert_eq!(hat, only2);
        assert!(eval_h_eps(&pair, &l, 0.3).unwrap() > hat);
    }

    #[test]
    fn radius_outside_range_rejected() {
        let pair = quad_pair();
        assert!(matches!(
            eval_h_eps(&pair, &[0.0], 0.0),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            eval_h_eps(&pair, &[0.0], pair.eps0),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn quadratic_minimizer_matches_closed_form() {
        // for l between the wells h_eps(l) = g1/2 (l - eps - c1)^2 + g2/2 (l + eps - c2)^2
        let pair = ConvexPair::new(
            EffectivePotential::quadratic(2.0, vec![0.0]).unwrap(),
            EffectivePotential::quadratic(1.0, vec![3.0]).unwrap(),
            &[-0.5],
            &[3.5],
        )
        .unwrap();
        let eps = 0.2;
        let set = minimize_h_eps(&pair, eps, 6, 1).unwrap();
        let (g1, g2, c1, c2) = (2.0, 1.0, 0.0, 3.0);
        let l = (g1 * (c1 + eps) + g2 * (c2 - eps)) / (g1 + g2);
        assert_eq!(set.points.len(), 1);
        assert_abs_diff_eq!(set.points[0][0], l, epsilon = 1e-7);
        let v = g1 / 2.0 * (l - eps - c1).powi(2) + g2 / 2.0 * (l + eps - c2).powi(2);
        assert_abs_diff_eq!(set.value, v, epsilon = 1e-12);
    }

    #[test]
    fn eps_c_grid_validation() {
        let pair = quad_pair();
        assert!(matches!(estimate_eps_c(&pair, &[]), Err(Error::Config(_))));
        assert!(matches!(
            estimate_eps_c(&pair, &[0.2, 0.1]),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            estimate_eps_c(&pair, &[0.1, 5.0]),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn eps_c_stays_below_eps0() {
        let pair = quad_pair();
        let grid: Vec<f64> = (1..10).map(|i| i as f64 * pair.eps0 / 10.0).collect();
        let e = estimate_eps_c(&pair, &grid).unwrap();
        assert!(e > 0.0 && e < pair.eps0);
    }
}
