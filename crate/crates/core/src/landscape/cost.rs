//! Collision costs of a convex pair `(Psi1, Psi2)` and their minimizers.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::point::{self, Point};
use crate::potentials::{descend_to_minimum, EffectivePotential, Potential};

/// Two uniformly convex potentials with minima `well1`, `well2`.
#[derive(Debug, Clone, Serialize)]
pub struct ConvexPair {
    pub psi1: EffectivePotential,
    pub psi2: EffectivePotential,
    pub well1: Point,
    pub well2: Point,
    /// Upper limit for admissible collision radii.
    pub eps0: f64,
}

impl ConvexPair {
    /// Locates both minima by descent from `x1`, `x2` and takes `eps0` from the
    /// descending flows started there.
    pub fn new(
        psi1: EffectivePotential,
        psi2: EffectivePotential,
        x1: &[f64],
        x2: &[f64],
    ) -> Result<Self> {
        if psi1.dim() != psi2.dim() || x1.len() != psi1.dim() || x2.len() != psi1.dim() {
            return Err(Error::config("convex pair dimensions do not agree"));
        }
        let well1 = descend_to_minimum(&psi1, x1)?
            .ok_or_else(|| Error::numeric("no strict minimum of Psi1 reached"))?;
        let well2 = descend_to_minimum(&psi2, x2)?
            .ok_or_else(|| Error::numeric("no strict minimum of Psi2 reached"))?;
        let eps0 =
            super::compute_eps0(&psi1, &psi2, x1, x2, super::FLOW_HORIZON, super::FLOW_STEP)?;
        Ok(ConvexPair {
            psi1,
            psi2,
            well1,
            well2,
            eps0,
        })
    }

    pub fn dim(&self) -> usize {
        self.psi1.dim()
    }

    /// `h0(l) = Psi1(l) - Psi1(well1) + Psi2(l) - Psi2(well2)`
    pub fn h0(&self, l: &[f64]) -> f64 {
        self.psi1.value(l) - self.psi1.value(&self.well1) + self.psi2.value(l)
            - self.psi2.value(&self.well2)
    }

    pub fn grad_h0(&self, l: &[f64]) -> Point {
        point::add(&self.psi1.grad(l), &self.psi2.grad(l))
    }

    /// The unique zero of `grad Psi1 + grad Psi2`.
    pub fn solve_z0(&self) -> Result<Point> {
        let start = point::midpoint(&self.well1, &self.well2);
        newton_solve(
            |x| self.grad_h0(x),
            |x| self.psi1.hess(x) + self.psi2.hess(x),
            start,
        )
    }

    /// `(z0, h0(z0))`
    pub fn prediction(&self) -> Result<(Point, f64)> {
        let z0 = self.solve_z0()?;
        let h = self.h0(&z0);
        Ok((z0, h))
    }
}

const NEWTON_TOL: f64 = 1e-12;
const NEWTON_MAX_ITER: usize = 200;

/// Newton's method for `g(x) = 0` with a halving line search on `|g|`.
pub fn newton_solve(
    g: impl Fn(&[f64]) -> Point,
    jac: impl Fn(&[f64]) -> DMatrix<f64>,
    start: Point,
) -> Result<Point> {
    let mut x = start;
    let mut gx = g(&x);
    let mut res = point::norm(&gx);
    for _ in 0..NEWTON_MAX_ITER {
        if !res.is_finite() {
            return Err(Error::numeric(
                "Newton iteration produced a non-finite residual",
            ));
        }
        if res <= NEWTON_TOL {
            return Ok(x);
        }
        let j = jac(&x);
        let dir = j
            .lu()
            .solve(&DVector::from_column_slice(&gx))
            .ok_or_else(|| Error::numeric("singular Jacobian in Newton iteration"))?;
        let mut t = 1.0;
        let mut moved = false;
        for _ in 0..60 {
            let y: Point = x.iter().zip(dir.iter()).map(|(a, b)| a - t * b).collect();
            let gy = g(&y);
            let ry = point::norm(&gy);
            if ry < res {
                x = y;
                gx = gy;
                res = ry;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if !moved {
            break;
        }
    }
    if res <= NEWTON_TOL {
        return Ok(x);
    }
    Err(Error::numeric(format!(
        "Newton iteration did not converge in {NEWTON_MAX_ITER} iterations (residual {res:.3e})"
    )))
}
