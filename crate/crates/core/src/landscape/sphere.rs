//! Infimum of a convex potential over a sphere `dB(center; eps)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::point::{self, Point};
use crate::potentials::Potential;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphereMin {
    /// `inf Psi - Psi(well)` over the sphere.
    pub value: f64,
    pub argmin: Point,
}

const STARTS: usize = 16;
const MAX_ITER: usize = 5_000;

/// `inf_{x in dB(center; eps)} Psi(x) - Psi(well)`.
pub fn sphere_infimum(
    psi: &dyn Potential,
    well: &[f64],
    center: &[f64],
    eps: f64,
) -> Result<SphereMin> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::config(format!(
            "sphere radius must be positive, got {eps}"
        )));
    }
    let d = psi.dim();
    if well.len() != d || center.len() != d {
        return Err(Error::config(
            "sphere center or well dimension does not match the potential",
        ));
    }
    let base = psi.value(well);
    if d == 1 {
        let lo = [center[0] - eps];
        let hi = [center[0] + eps];
        let (vl, vh) = (psi.value(&lo), psi.value(&hi));
        let (v, x) = if vl <= vh { (vl, lo) } else { (vh, hi) };
        return Ok(SphereMin {
            value: v - base,
            argmin: x.to_vec(),
        });
    }

    let mut best: Option<(f64, Point)> = None;
    for u0 in start_directions(well, center) {
        let (v, x) = descend_on_sphere(psi, center, eps, u0);
        let better = match &best {
            None => true,
            Some((bv, bx)) => v < *bv || (v == *bv && point::lex_cmp(&x, bx).is_lt()),
        };
        if better {
            best = Some((v, x));
        }
    }
    let (v, x) = best.expect("at least one start");
    if !v.is_finite() {
        return Err(Error::numeric("non-finite potential value on the sphere"));
    }
    Ok(SphereMin {
        value: v - base,
        argmin: x,
    })
}

/// Deterministic unit directions: toward the well first, then coordinate
/// axes, then a Fibonacci-type spread.
fn start_directions(well: &[f64], center: &[f64]) -> Vec<Point> {
    let d = well.len();
    let mut dirs = Vec::with_capacity(STARTS);
    let to_well = point::sub(well, center);
    let n = point::norm(&to_well);
    if n > 0.0 {
        dirs.push(point::scale(&to_well, 1.0 / n));
    }
    for k in 0..d {
        for s in [1.0, -1.0] {
            if dirs.len() < STARTS {
                let mut e = vec![0.0; d];
                e[k] = s;
                dirs.push(e);
            }
        }
    }
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    let mut i = 0usize;
    while dirs.len() < STARTS {
        i += 1;
        let mut v: Point = (0..d)
            .map(|k| {
                let frac = ((i as f64) * golden * (k as f64 + 1.0) + 0.5 * k as f64).fract();
                (2.0 * std::f64::consts::PI * frac).cos() + 0.1 * (k as f64 + 1.0) / (i as f64)
            })
            .collect();
        let n = point::norm(&v);
        if n > 1e-9 {
            v.iter_mut().for_each(|c| *c /= n);
            dirs.push(v);
        }
    }
    dirs
}

/// Riemannian gradient descent with backtracking; returns `(Psi(x*), x*)`.
fn descend_on_sphere(psi: &dyn Potential, center: &[f64], eps: f64, mut u: Point) -> (f64, Point) {
    let d = u.len();
    let at = |u: &[f64]| -> Point { (0..d).map(|k| center[k] + eps * u[k]).collect() };
    let mut x = at(&u);
    let mut fx = psi.value(&x);
    let mut t = 1.0;
    for _ in 0..MAX_ITER {
        let g = psi.grad(&x);
        // tangential gradient with respect to u
        let gu: Point = g.iter().map(|c| c * eps).collect();
        let radial = point::dot(&gu, &u);
        let tan: Point = gu.iter().zip(&u).map(|(a, b)| a - radial * b).collect();
        let tn2 = point::dot(&tan, &tan);
        if tn2.sqrt() <= 1e-13 * (1.0 + fx.abs()) {
            break;
        }
        let mut accepted = false;
        while t > 1e-16 {
            let mut v: Point = u.iter().zip(&tan).map(|(a, b)| a - t * b).collect();
            let n = point::norm(&v);
            v.iter_mut().for_each(|c| *c /= n);
            let y = at(&v);
            let fy = psi.value(&y);
            if fy <= fx - 1e-4 * t * tn2 {
                u = v;
                x = y;
                fx = fy;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
        t = (t * 2.0).min(1e6);
    }
    (fx, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::EffectivePotential;
    use approx::assert_abs_diff_eq;

    #[test]
    fn one_dimensional_endpoints() {
        let psi = EffectivePotential::quadratic(1.0, vec![1.0]).unwrap();
        let m = sphere_infimum(&psi, &[1.0], &[0.0], 0.1).unwrap();
        assert_abs_diff_eq!(m.value, 0.405, epsilon = 1e-14);
        assert_eq!(m.argmin, vec![0.1]);
    }

    #[test]
    fn well_on_the_sphere() {
        let psi = EffectivePotential::quadratic(1.0, vec![0.0]).unwrap();
        let m = sphere_infimum(&psi, &[0.0], &[0.5], 0.5).unwrap();
        assert_abs_diff_eq!(m.value, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn two_dimensional_radial() {
        let psi = EffectivePotential::quadratic(1.0, vec![1.0, 0.0]).unwrap();
        let m = sphere_infimum(&psi, &[1.0, 0.0], &[0.0, 0.0], 0.25).unwrap();
        assert_abs_diff_eq!(m.value, 0.28125, epsilon = 1e-12);
        assert_abs_diff_eq!(m.argmin[0], 0.25, epsilon = 1e-6);
    }

    #[test]
    fn well_at_center_uses_axis_starts() {
        let psi = EffectivePotential::quadratic(2.0, vec![0.0, 0.0]).unwrap();
        let m = sphere_infimum(&psi, &[0.0, 0.0], &[0.0, 0.0], 0.5).unwrap();
        assert_abs_diff_eq!(m.value, 0.25, epsilon = 1e-14);
    }

    #[test]
    fn nonpositive_radius_rejected() {
        let psi = EffectivePotential::quadratic(1.0, vec![0.0]).unwrap();
        assert!(matches!(
            sphere_infimum(&psi, &[0.0], &[0.0], 0.0),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            sphere_infimum(&psi, &[0.0], &[0.0], -1.0),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn start_directions_are_unit_and_distinct() {
        for d in [2, 3] {
            let dirs = start_directions(&vec![1.0; d], &vec![0.0; d]);
            assert_eq!(dirs.len(), STARTS);
            for v in &dirs {
                assert_abs_diff_eq!(point::norm(v), 1.0, epsilon = 1e-12);
            }
        }
    }
}
