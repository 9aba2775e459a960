//! Deterministic gradient flows `x' = -grad U(x)` and `x' = +grad U(x)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::point::{self, Point};
use crate::potentials::Potential;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Descending,
    Ascending,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowStatus {
    /// Reached the time horizon.
    Horizon,
    /// Stopped at a critical point (gradient norm at most 1e-12).
    Stationary,
    /// Left the ball of radius [`DIVERGENCE_BOUND`].
    Diverged,
}

pub const DIVERGENCE_BOUND: f64 = 1e6;
const STATIONARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct FlowPath {
    pub times: Vec<f64>,
    pub states: Vec<Point>,
    pub status: FlowStatus,
}

impl FlowPath {
    pub fn last(&self) -> &Point {
        self.states.last().expect("flow path is never empty")
    }

    /// State at time `t`, holding the final state after an early exit.
    pub fn state_at_index(&self, i: usize) -> &Point {
        &self.states[i.min(self.states.len() - 1)]
    }
}

/// Classical RK4 on `x' = -grad U` (descending) or `x' = grad U` (ascending).
pub fn integrate_flow(
    p: &dyn Potential,
    x0: &[f64],
    direction: Direction,
    horizon: f64,
    step: f64,
) -> Result<FlowPath> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::config(format!(
            "flow step must be positive, got {step}"
        )));
    }
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(Error::config(format!(
            "flow horizon must be non-negative, got {horizon}"
        )));
    }
    if x0.len() != p.dim() {
        return Err(Error::config(
            "flow start point dimension does not match the potential",
        ));
    }
    let sign = match direction {
        Direction::Descending => -1.0,
        Direction::Ascending => 1.0,
    };
    let d = x0.len();
    let n_steps = (horizon / step - 1e-9).ceil().max(0.0) as usize;
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut states = Vec::with_capacity(n_steps + 1);
    let mut x = x0.to_vec();
    times.push(0.0);
    states.push(x.clone());

    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; d], vec![0.0; d], vec![0.0; d], vec![0.0; d]);
    let mut tmp = vec![0.0; d];
    let mut status = FlowStatus::Horizon;
    for i in 0..n_steps {
        let t = i as f64 * step;
        let h = step.min(horizon - t);
        p.grad_into(&x, &mut k1);
        if point::norm(&k1) <= STATIONARY_TOL {
            status = FlowStatus::Stationary;
            break;
        }
        if direction == Direction::Ascending && point::norm(&x) > DIVERGENCE_BOUND {
            status = FlowStatus::Diverged;
            break;
        }
        for j in 0..d {
            tmp[j] = x[j] + 0.5 * h * sign * k1[j];
        }
        p.grad_into(&tmp, &mut k2);
        for j in 0..d {
            tmp[j] = x[j] + 0.5 * h * sign * k2[j];
        }
        p.grad_into(&tmp, &mut k3);
        for j in 0..d {
            tmp[j] = x[j] + h * sign * k3[j];
        }
        p.grad_into(&tmp, &mut k4);
        for j in 0..d {
            tmp[j] = x[j] + sign * h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        if !point::is_finite(&tmp) {
            return Err(Error::numeric(format!(
                "flow state became non-finite after t={t}"
            )));
        }
        std::mem::swap(&mut x, &mut tmp);
        times.push(t + h);
        states.push(x.clone());
    }
    if status == FlowStatus::Horizon
        && direction == Direction::Ascending
        && point::norm(&x) > DIVERGENCE_BOUND
    {
        status = FlowStatus::Diverged;
    }
    Ok(FlowPath {
        times,
        states,
        status,
    })
}

/// Half the smallest distance between the descending flows from `x1` (under
/// `p1`) and `x2` (under `p2`), with the limit distance of the flow endpoints
/// included in the infimum.
pub fn compute_eps0(
    p1: &dyn Potential,
    p2: &dyn Potential,
    x1: &[f64],
    x2: &[f64],
    horizon: f64,
    step: f64,
) -> Result<f64> {
    let f1 = integrate_flow(p1, x1, Direction::Descending, horizon, step)?;
    let f2 = integrate_flow(p2, x2, Direction::Descending, horizon, step)?;
    for (p, f, name) in [(p1, &f1, "x1"), (p2, &f2, "x2")] {
        let g = p.grad(f.last());
        if point::norm(&g) > 1e-6 {
            return Err(Error::numeric(format!(
                "descending flow from {name} has not settled by t={horizon} (|grad| = {:.3e})",
                point::norm(&g)
            )));
        }
    }
    let n = f1.states.len().max(f2.states.len());
    let mut inf = point::dist(f1.last(), f2.last());
    for i in 0..n {
        inf = inf.min(point::dist(f1.state_at_index(i), f2.state_at_index(i)));
    }
    if inf <= 0.0 {
        return Err(Error::assumption(
            crate::error::Assumption::DistinctBasins,
            "descending flows from x1 and x2 meet, so no collision-free radius exists",
        ));
    }
    Ok(0.5 * inf)
}

/// Index of the well reached by the descending flow from `x`, if any.
pub fn basin_of(
    p: &dyn Potential,
    x: &[f64],
    wells: &[&[f64]],
    horizon: f64,
    step: f64,
) -> Result<Option<usize>> {
    let f = integrate_flow(p, x, Direction::Descending, horizon, step)?;
    let end = f.last();
    Ok(wells
        .iter()
        .enumerate()
        .map(|(i, w)| (i, point::dist(end, w)))
        .filter(|(_, d)| *d <= 1e-3)
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i))
}
