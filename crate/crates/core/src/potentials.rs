//! Confining potentials `V`, the quadratic interaction `F(x) = alpha/2 |x|^2`
//! and the effective potentials `Psi(x) = V(x) + alpha/2 |x - anchor|^2`.
//!
//! Every implemented kind is coordinate-separable, so gradients and Hessians
//! are exact and the Hessian is diagonal.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Assumption, Error, Result};
use crate::point::{self, Point};

/// Anything with an exact value, gradient and Hessian on `R^d`.
pub trait Potential: Sync + Send {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn grad_into(&self, x: &[f64], out: &mut [f64]);
    fn hess(&self, x: &[f64]) -> DMatrix<f64>;

    fn grad(&self, x: &[f64]) -> Point {
        let mut g = vec![0.0; self.dim()];
        self.grad_into(x, &mut g);
        g
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialKind {
    /// `gamma/2 |x - center|^2`
    Quadratic { gamma: f64, center: Point },
    /// `beta (x^4/4 - x^2/2)` in coordinate 1, `beta/2 x_k^2` in the others.
    SymmetricDoubleWell { beta: f64 },
    /// `x^4/4 + x^3/3 - x^2/2`, one-dimensional.
    AsymmetricDoubleWell,
    /// Sum over coordinates of 1-D polynomials; `coefficients[k][j]` multiplies `x_k^j`.
    Polynomial { coefficients: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PotentialSpec {
    #[serde(flatten)]
    pub kind: PotentialKind,
    pub dimension: usize,
}

impl PotentialSpec {
    pub fn new(kind: PotentialKind, dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::config("dimension must be positive"));
        }
        match &kind {
            PotentialKind::Quadratic { gamma, center } => {
                if !(gamma.is_finite() && *gamma >= 0.0) {
                    return Err(Error::config(format!(
                        "quadratic gamma must be >= 0, got {gamma}"
                    )));
                }
                if center.len() != dimension {
                    return Err(Error::config(format!(
                        "quadratic center has {} coordinates, dimension is {dimension}",
                        center.len()
                    )));
                }
            }
            PotentialKind::SymmetricDoubleWell { beta } => {
                if !(beta.is_finite() && *beta > 0.0) {
                    return Err(Error::config(format!(
                        "double-well beta must be > 0, got {beta}"
                    )));
                }
            }
            PotentialKind::AsymmetricDoubleWell => {
                if dimension != 1 {
                    return Err(Error::config("asymmetric double well is one-dimensional"));
                }
            }
            PotentialKind::Polynomial { coefficients } => {
                if coefficients.len() != dimension {
                    return Err(Error::config(format!(
                        "polynomial has {} coordinate rows, dimension is {dimension}",
                        coefficients.len()
                    )));
                }
                for (k, row) in coefficients.iter().enumerate() {
                    if row.iter().any(|c| !c.is_finite()) {
                        return Err(Error::config(format!(
                            "polynomial row {k} has non-finite coefficients"
                        )));
                    }
                    let degree = row.iter().rposition(|c| *c != 0.0);
                    match degree {
                        Some(n) if n >= 2 && n % 2 == 0 && row[n] > 0.0 => {}
                        _ => {
                            return Err(Error::assumption(
                                Assumption::Growth,
                                format!("polynomial row {k} needs even degree >= 2 with positive leading coefficient"),
                            ))
                        }
                    }
                }
            }
        }
        Ok(PotentialSpec { kind, dimension })
    }

    pub fn quadratic(gamma: f64, center: Point) -> Result<Self> {
        let d = center.len();
        Self::new(PotentialKind::Quadratic { gamma, center }, d)
    }

    pub fn symmetric_double_well(beta: f64, dimension: usize) -> Result<Self> {
        Self::new(PotentialKind::SymmetricDoubleWell { beta }, dimension)
    }

    pub fn asymmetric_double_well() -> Self {
        PotentialSpec {
            kind: PotentialKind::AsymmetricDoubleWell,
            dimension: 1,
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dimension {
            return Err(Error::config(format!(
                "point has {} coordinates, potential dimension is {}",
                x.len(),
                self.dimension
            )));
        }
        if !point::is_finite(x) {
            return Err(Error::config("point has non-finite coordinates"));
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.value(x))
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Point> {
        self.check_dim(x)?;
        Ok(self.grad(x))
    }

    pub fn hessian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.check_dim(x)?;
        Ok(self.hess(x))
    }

    /// Value, first and second derivative of the separable term in coordinate `k`.
    #[inline]
    fn coord(&self, k: usize, x: f64) -> (f64, f64, f64) {
        match &self.kind {
            PotentialKind::Quadratic { gamma, center } => {
                let u = x - center[k];
                (0.5 * gamma * u * u, gamma * u, *gamma)
            }
            PotentialKind::SymmetricDoubleWell { beta } => {
                if k == 0 {
                    let x2 = x * x;
                    (
                        beta * (0.25 * x2 * x2 - 0.5 * x2),
                        beta * (x2 * x - x),
                        beta * (3.0 * x2 - 1.0),
                    )
                } else {
                    (0.5 * beta * x * x, beta * x, *beta)
                }
            }
            PotentialKind::AsymmetricDoubleWell => {
                let x2 = x * x;
                (
                    0.25 * x2 * x2 + x2 * x / 3.0 - 0.5 * x2,
                    x2 * x + x2 - x,
                    3.0 * x2 + 2.0 * x - 1.0,
                )
            }
            PotentialKind::Polynomial { coefficients } => horner3(&coefficients[k], x),
        }
    }

    /// Derivative of the separable term in coordinate `k`; the simulation hot path.
    #[inline]
    pub fn dcoord(&self, k: usize, x: f64) -> f64 {
        match &self.kind {
            PotentialKind::Quadratic { gamma, center } => gamma * (x - center[k]),
            PotentialKind::SymmetricDoubleWell { beta } => {
                if k == 0 {
                    beta * (x * x * x - x)
                } else {
                    beta * x
                }
            }
            PotentialKind::AsymmetricDoubleWell => x * x * x + x * x - x,
            PotentialKind::Polynomial { .. } => self.coord(k, x).1,
        }
    }

    /// True for the kinds that are expected to have exactly two wells.
    pub fn is_double_well(&self) -> bool {
        matches!(
            self.kind,
            PotentialKind::SymmetricDoubleWell { .. } | PotentialKind::AsymmetricDoubleWell
        )
    }
}

fn horner3(c: &[f64], x: f64) -> (f64, f64, f64) {
    let mut v = 0.0;
    let mut d1 = 0.0;
    let mut d2 = 0.0;
    for &a in c.iter().rev() {
        d2 = d2 * x + 2.0 * d1;
        d1 = d1 * x + v;
        v = v * x + a;
    }
    (v, d1, d2)
}

impl Potential for PotentialSpec {
    fn dim(&self) -> usize {
        self.dimension
    }

    fn value(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dimension);
        x.iter()
            .enumerate()
            .map(|(k, &xk)| self.coord(k, xk).0)
            .sum()
    }

    fn grad_into(&self, x: &[f64], out: &mut [f64]) {
        for (k, (o, &xk)) in out.iter_mut().zip(x).enumerate() {
            *o = self.dcoord(k, xk);
        }
    }

    fn hess(&self, x: &[f64]) -> DMatrix<f64> {
        let d = self.dimension;
        DMatrix::from_fn(
            d,
            d,
            |i, j| if i == j { self.coord(i, x[i]).2 } else { 0.0 },
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InteractionSpec {
    pub alpha: f64,
}

impl InteractionSpec {
    /// `F(x) = alpha/2 |x|^2`
    pub fn value(&self, x: &[f64]) -> f64 {
        0.5 * self.alpha * point::dot(x, x)
    }

    /// Checks synchronization against the curvature bound `theta`.
    pub fn check_synchronization(&self, theta: f64) -> Result<()> {
        if self.alpha > -theta {
            Ok(())
        } else {
            Err(Error::assumption(
                Assumption::Synchronization,
                format!("alpha = {} but -theta = {}", self.alpha, -theta),
            ))
        }
    }
}

/// `Psi(x) = V(x) + alpha/2 |x - anchor|^2`
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffectivePotential {
    pub base: PotentialSpec,
    pub alpha: f64,
    pub anchor: Point,
}

impl EffectivePotential {
    pub fn new(base: PotentialSpec, alpha: f64, anchor: Point) -> Result<Self> {
        if anchor.len() != base.dimension {
            return Err(Error::config(format!(
                "anchor has {} coordinates, potential dimension is {}",
                anchor.len(),
                base.dimension
            )));
        }
        Ok(EffectivePotential {
            base,
            alpha,
            anchor,
        })
    }

    /// The pure quadratic `gamma/2 |x - center|^2`.
    pub fn quadratic(gamma: f64, center: Point) -> Result<Self> {
        let anchor = center.clone();
        Self::new(PotentialSpec::quadratic(gamma, center)?, 0.0, anchor)
    }

    #[inline]
    pub fn dcoord(&self, k: usize, x: f64) -> f64 {
        self.base.dcoord(k, x) + self.alpha * (x - self.anchor[k])
    }
}

impl Potential for EffectivePotential {
    fn dim(&self) -> usize {
        self.base.dimension
    }

    fn value(&self, x: &[f64]) -> f64 {
        let spread: f64 = x
            .iter()
            .zip(&self.anchor)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        self.base.value(x) + 0.5 * self.alpha * spread
    }

    fn grad_into(&self, x: &[f64], out: &mut [f64]) {
        for (k, (o, &xk)) in out.iter_mut().zip(x).enumerate() {
            *o = self.dcoord(k, xk);
        }
    }

    fn hess(&self, x: &[f64]) -> DMatrix<f64> {
        let mut h = self.base.hess(x);
        for i in 0..self.base.dimension {
            h[(i, i)] += self.alpha;
        }
        h
    }
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(h: &DMatrix<f64>) -> f64 {
    if h.nrows() == 1 {
        return h[(0, 0)];
    }
    SymmetricEigen::new(h.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Axis-aligned search box.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchBox {
    pub lower: Point,
    pub upper: Point,
}

impl SearchBox {
    pub fn cube(dimension: usize, half_width: f64) -> Self {
        SearchBox {
            lower: vec![-half_width; dimension],
            upper: vec![half_width; dimension],
        }
    }

    fn widened(&self, factor: f64) -> Self {
        let (lower, upper) = self
            .lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| {
                let c = 0.5 * (l + u);
                let h = 0.5 * (u - l) * factor;
                (c - h, c + h)
            })
            .unzip();
        SearchBox { lower, upper }
    }
}

const MAX_GRID_POINTS: usize = 2_000_000;
const MAX_WIDENINGS: usize = 12;

/// Upper estimate of `theta = inf_x min-eigenvalue(hess V(x))`.
///
/// Scans a regular grid (`resolution` points per axis), widens the box while
/// the smallest value sits on its boundary, then refines from the grid
/// minimizer by a compass search. The result is an upper bound on the true
/// infimum, tight up to the refinement tolerance.
pub fn estimate_theta(p: &dyn Potential, search_box: &SearchBox, resolution: usize) -> Result<f64> {
    let d = p.dim();
    if search_box.lower.len() != d || search_box.upper.len() != d {
        return Err(Error::config(
            "search box dimension does not match the potential",
        ));
    }
    if search_box
        .lower
        .iter()
        .zip(&search_box.upper)
        .any(|(l, u)| !(l < u))
    {
        return Err(Error::config(
            "search box must have lower < upper in every coordinate",
        ));
    }
    let mut per_axis = resolution.max(3);
    while per_axis.saturating_pow(d as u32) > MAX_GRID_POINTS && per_axis > 3 {
        per_axis -= 1;
    }
    let min_eig = |x: &[f64]| -> Result<f64> {
        let h = p.hess(x);
        if h.iter().any(|v| !v.is_finite()) {
            return Err(Error::numeric(format!("non-finite Hessian at {x:?}")));
        }
        Ok(min_eigenvalue(&h))
    };

    let mut bx = search_box.clone();
    for _ in 0..=MAX_WIDENINGS {
        let mut interior = (f64::INFINITY, Vec::new());
        let mut boundary = f64::INFINITY;
        let total = per_axis.pow(d as u32);
        let mut idx = vec![0usize; d];
        let mut x = vec![0.0; d];
        for _ in 0..total {
            let mut on_edge = false;
            for k in 0..d {
                let t = idx[k] as f64 / (per_axis - 1) as f64;
                x[k] = bx.lower[k] + t * (bx.upper[k] - bx.lower[k]);
                on_edge |= idx[k] == 0 || idx[k] == per_axis - 1;
            }
            let v = min_eig(&x)?;
            if on_edge {
                boundary = boundary.min(v);
            } else if v < interior.0 {
                interior = (v, x.clone());
            }
            for k in 0..d {
                idx[k] += 1;
                if idx[k] < per_axis {
                    break;
                }
                idx[k] = 0;
            }
        }
        let tie = (boundary - interior.0).abs() <= 1e-12 * (1.0 + interior.0.abs());
        if boundary > interior.0 || tie {
            let spacing = bx
                .lower
                .iter()
                .zip(&bx.upper)
                .map(|(l, u)| (u - l) / (per_axis - 1) as f64)
                .fold(f64::INFINITY, f64::min);
            let refined = compass_minimize(&|z: &[f64]| min_eig(z), interior.1, spacing, 1e-12)?;
            return Ok(refined.min(interior.0));
        }
        bx = bx.widened(2.0);
    }
    Err(Error::numeric(
        "curvature minimum keeps sitting on the search-box boundary; potential may not be convex at infinity",
    ))
}

/// Derivative-free compass search; returns the smallest value found.
fn compass_minimize(
    f: &dyn Fn(&[f64]) -> Result<f64>,
    start: Point,
    initial_step: f64,
    min_step: f64,
) -> Result<f64> {
    let d = start.len();
    let mut x = start;
    let mut fx = f(&x)?;
    let mut step = initial_step;
    while step > min_step {
        let mut improved = false;
        for k in 0..d {
            for s in [step, -step] {
                let mut y = x.clone();
                y[k] += s;
                let fy = f(&y)?;
                if fy < fx {
                    x = y;
                    fx = fy;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok(fx)
}

const WELL_GRAD_TOL: f64 = 1e-10;
const WELL_DEDUP_TOL: f64 = 1e-6;
/// Per-iteration displacement cap, so descent cannot hop over a barrier.
const MAX_DESCENT_MOVE: f64 = 0.05;

/// Descends from one seed to a strict local minimum, if it reaches one.
pub fn descend_to_minimum(p: &dyn Potential, seed: &[f64]) -> Result<Option<Point>> {
    let mut x = seed.to_vec();
    let mut g = p.grad(&x);
    let mut fx = p.value(&x);
    let mut t: f64 = 1.0;
    for _ in 0..200_000 {
        let gn2 = point::dot(&g, &g);
        if !gn2.is_finite() || !fx.is_finite() {
            return Err(Error::numeric(format!("descent from {seed:?} diverged")));
        }
        if gn2.sqrt() <= 1e-7 {
            break;
        }
        let mut accepted = false;
        while t > 1e-14 {
            let h = t.min(MAX_DESCENT_MOVE / gn2.sqrt());
            let y = point::axpy(&x, -h, &g);
            let fy = p.value(&y);
            if fy <= fx - 1e-4 * h * gn2 {
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
        g = p.grad(&x);
        t = (t * 2.0).min(1e3);
    }
    if point::norm(&p.grad(&x)) > 1e-6 {
        return Ok(None);
    }
    // Newton polish down to the gradient tolerance; only valid at a strict minimum.
    for _ in 0..100 {
        g = p.grad(&x);
        if point::norm(&g) <= WELL_GRAD_TOL {
            break;
        }
        let h = p.hess(&x);
        if min_eigenvalue(&h) <= 0.0 {
            return Ok(None);
        }
        let step = h
            .cholesky()
            .map(|c| c.solve(&nalgebra::DVector::from_column_slice(&g)))
            .ok_or_else(|| Error::numeric("Hessian factorization failed"))?;
        for (xi, si) in x.iter_mut().zip(step.iter()) {
            *xi -= si;
        }
    }
    if point::norm(&p.grad(&x)) > WELL_GRAD_TOL || min_eigenvalue(&p.hess(&x)) <= 0.0 {
        return Ok(None);
    }
    Ok(Some(x))
}

/// Locates the two wells from seeds in distinct basins, ordered ascending in
/// coordinate 1.
pub fn find_wells(p: &dyn Potential, seeds: &[Point]) -> Result<(Point, Point)> {
    if seeds.len() < 2 {
        return Err(Error::config("find_wells needs at least two seeds"));
    }
    let mut minima: Vec<Point> = Vec::new();
    for seed in seeds {
        if seed.len() != p.dim() {
            return Err(Error::config("seed dimension does not match the potential"));
        }
        if let Some(m) = descend_to_minimum(p, seed)? {
            if !minima.iter().any(|q| point::dist(q, &m) <= WELL_DEDUP_TOL) {
                minima.push(m);
            }
        }
    }
    if minima.len() != 2 {
        return Err(Error::assumption(
            Assumption::TwoWells,
            format!(
                "found {} distinct strict local minima from {} seeds",
                minima.len(),
                seeds.len()
            ),
        ));
    }
    minima.sort_by(|a, b| point::lex_cmp(a, b));
    let second = minima.pop().unwrap();
    let first = minima.pop().unwrap();
    Ok((first, second))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn symmetric_well_at_one() {
        let p = PotentialSpec::symmetric_double_well(1.0, 1).unwrap();
        assert_abs_diff_eq!(p.eval(&[1.0]).unwrap(), -0.25);
        assert_abs_diff_eq!(p.gradient(&[1.0]).unwrap()[0], 0.0);
        assert_abs_diff_eq!(p.hessian(&[1.0]).unwrap()[(0, 0)], 2.0);
    }

    #[test]
    fn quadratic_minimum() {
        let p = PotentialSpec::quadratic(2.0, vec![0.0]).unwrap();
        assert_eq!(p.eval(&[0.0]).unwrap(), 0.0);
        assert_eq!(p.gradient(&[0.0]).unwrap(), vec![0.0]);
    }

    #[test]
    fn asymmetric_at_origin() {
        let p = PotentialSpec::asymmetric_double_well();
        assert_eq!(p.eval(&[0.0]).unwrap(), 0.0);
        assert_eq!(p.gradient(&[0.0]).unwrap()[0], 0.0);
        assert_eq!(p.hessian(&[0.0]).unwrap()[(0, 0)], -1.0);
    }

    #[test]
    fn dimension_mismatch_is_config_error() {
        let p = PotentialSpec::symmetric_double_well(1.0, 2).unwrap();
        assert!(matches!(p.eval(&[1.0]), Err(Error::Config(_))));
        assert!(matches!(
            p.gradient(&[1.0, 2.0, 3.0]),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn polynomial_matches_symmetric_well() {
        let poly = PotentialSpec::new(
            PotentialKind::Polynomial {
                coefficients: vec![vec![0.0, 0.0, -0.5, 0.0, 0.25]],
            },
            1,
        )
        .unwrap();
        let sym = PotentialSpec::symmetric_double_well(1.0, 1).unwrap();
        for x in [-1.7, -0.3, 0.0, 0.9, 2.2] {
            assert_abs_diff_eq!(poly.value(&[x]), sym.value(&[x]), epsilon = 1e-14);
            assert_abs_diff_eq!(poly.grad(&[x])[0], sym.grad(&[x])[0], epsilon = 1e-14);
            assert_abs_diff_eq!(
                poly.hess(&[x])[(0, 0)],
                sym.hess(&[x])[(0, 0)],
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn polynomial_without_growth_rejected() {
        let odd = PotentialKind::Polynomial {
            coefficients: vec![vec![0.0, 1.0, 0.0, 1.0]],
        };
        assert!(matches!(
            PotentialSpec::new(odd, 1),
            Err(Error::Assumption {
                assumption: Assumption::Growth,
                ..
            })
        ));
    }

    #[test]
    fn theta_examples() {
        let p = PotentialSpec::symmetric_double_well(1.0, 1).unwrap();
        let t = estimate_theta(&p, &SearchBox::cube(1, 3.0), 61).unwrap();
        assert_abs_diff_eq!(t, -1.0, epsilon = 1e-12);

        let p = PotentialSpec::quadratic(1.5, vec![0.0]).unwrap();
        assert_eq!(
            estimate_theta(&p, &SearchBox::cube(1, 3.0), 61).unwrap(),
            1.5
        );

        let p = PotentialSpec::symmetric_double_well(0.2, 1).unwrap();
        let t = estimate_theta(&p, &SearchBox::cube(1, 3.0), 61).unwrap();
        assert_abs_diff_eq!(t, -0.2, epsilon = 1e-12);
    }

    #[test]
    fn theta_widens_a_box_that_misses_the_minimum() {
        // curvature of the double well is smallest at 0, far outside [2, 3]
        let p = PotentialSpec::symmetric_double_well(1.0, 1).unwrap();
        let bx = SearchBox {
            lower: vec![2.0],
            upper: vec![3.0],
        };
        let t = estimate_theta(&p, &bx, 41).unwrap();
        assert_abs_diff_eq!(t, -1.0, epsilon = 1e-10);
    }

    #[test]
    fn theta_in_two_dimensions() {
        let p = PotentialSpec::symmetric_double_well(0.5, 2).unwrap();
        let t = estimate_theta(&p, &SearchBox::cube(2, 2.0), 41).unwrap();
        assert_abs_diff_eq!(t, -0.5, epsilon = 1e-10);
    }

    #[test]
    fn wells_of_symmetric_double_well() {
        let p = PotentialSpec::symmetric_double_well(1.0, 1).unwrap();
        let (a, b) = find_wells(&p, &[vec![-2.0], vec![2.0]]).unwrap();
        assert_abs_diff_eq!(a[0], -1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(b[0], 1.0, epsilon = 1e-10);
    }

    #[test]
    fn wells_of_asymmetric_double_well() {
        let p = PotentialSpec::asymmetric_double_well();
        let (a, b) = find_wells(&p, &[vec![-2.0], vec![1.0]]).unwrap();
        let s5 = 5f64.sqrt();
        assert_abs_diff_eq!(a[0], -0.5 - s5 / 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(b[0], -0.5 + s5 / 2.0, epsilon = 1e-10);
    }

    #[test]
    fn quadratic_has_a_single_well() {
        let p = PotentialSpec::quadratic(1.0, vec![0.3]).unwrap();
        let err = find_wells(&p, &[vec![-2.0], vec![2.0]]).unwrap_err();
        assert!(matches!(
            err,
            Error::Assumption {
                assumption: Assumption::TwoWells,
                ..
            }
        ));
        assert!(err.to_string().contains("A(ii)"));
    }

    #[test]
    fn seed_on_the_hilltop_is_ignored() {
        let p = PotentialSpec::symmetric_double_well(1.0, 1).unwrap();
        let (a, b) = find_wells(&p, &[vec![0.0], vec![-0.5], vec![3.0]]).unwrap();
        assert_abs_diff_eq!(a[0], -1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(b[0], 1.0, epsilon = 1e-10);
    }

    #[test]
    fn wells_in_two_dimensions() {
        let p = PotentialSpec::symmetric_double_well(1.0, 2).unwrap();
        let (a, b) = find_wells(&p, &[vec![0.5, 1.0], vec![-1.5, -0.3]]).unwrap();
        assert_abs_diff_eq!(a[0], -1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(a[1], 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(b[0], 1.0, epsilon = 1e-10);
    }

    #[test]
    fn synchronization_boundary_is_rejected() {
        let i = InteractionSpec { alpha: 1.0 };
        assert!(i.check_synchronization(-1.0).is_err());
        assert!(i.check_synchronization(-0.999).is_ok());
    }
}
