//! Analytic predictions: wells, curvature bound, flows, `eps0`, the collision
//! point `lambda0` and the collision cost `Hbar0`.

pub mod cost;
pub mod epsilon;
pub mod flow;
pub mod particles;
pub mod sphere;

use serde::Serialize;

pub use cost::{newton_solve, ConvexPair};
pub use epsilon::{
    eps_c_table, estimate_eps_c, eval_h_eps, eval_h_eps_hat, m_eps, minimize_h_eps, EpsCertificate,
    MinimizerSet,
};
pub use flow::{basin_of, compute_eps0, integrate_flow, Direction, FlowPath, FlowStatus};
pub use particles::{upsilon_grad, upsilon_minimizers, upsilon_n, upsilon_n_pairwise};
pub use sphere::{sphere_infimum, SphereMin};

use crate::error::{Assumption, Error, Result};
use crate::point::{self, Point};
use crate::potentials::{
    estimate_theta, find_wells, EffectivePotential, InteractionSpec, Potential, PotentialSpec,
    SearchBox,
};

/// Horizon and RK4 step used for `eps0` and basin membership.
pub const FLOW_HORIZON: f64 = 400.0;
pub const FLOW_STEP: f64 = 1e-3;
pub const BASIN_STEP: f64 = 1e-2;

#[derive(Debug, Clone, Serialize)]
pub struct Landscape {
    pub potential: PotentialSpec,
    pub interaction: InteractionSpec,
    pub wells: (Point, Point),
    pub theta: f64,
    pub x_init: (Point, Point),
    pub eps0: f64,
    pub lambda0: Point,
    #[serde(rename = "Hbar0")]
    pub hbar0: f64,
}

/// Seeds for well search: the two initial points plus a coarse grid over a
/// box around them.
fn well_seeds(x1: &[f64], x2: &[f64]) -> Vec<Point> {
    let d = x1.len();
    let per_axis: usize = if d == 1 {
        41
    } else if d == 2 {
        15
    } else {
        5
    };
    let lo: Point = (0..d).map(|k| x1[k].min(x2[k]) - 2.0).collect();
    let hi: Point = (0..d).map(|k| x1[k].max(x2[k]) + 2.0).collect();
    let mut seeds = vec![x1.to_vec(), x2.to_vec()];
    let mut idx = vec![0usize; d];
    for _ in 0..per_axis.pow(d as u32) {
        seeds.push(
            (0..d)
                .map(|k| lo[k] + (hi[k] - lo[k]) * idx[k] as f64 / (per_axis - 1) as f64)
                .collect(),
        );
        for k in 0..d {
            idx[k] += 1;
            if idx[k] < per_axis {
                break;
            }
            idx[k] = 0;
        }
    }
    seeds
}

impl Landscape {
    /// Derives every prediction and checks growth, two wells, synchronization
    /// and basin membership of the initial points.
    pub fn new(
        potential: PotentialSpec,
        interaction: InteractionSpec,
        x_init: (Point, Point),
    ) -> Result<Self> {
        let d = potential.dimension;
        let (x1, x2) = &x_init;
        if x1.len() != d || x2.len() != d {
            return Err(Error::config(
                "initial points must match the potential dimension",
            ));
        }
        if !(point::is_finite(x1) && point::is_finite(x2)) || !interaction.alpha.is_finite() {
            return Err(Error::config("initial points and alpha must be finite"));
        }
        let lo: Point = (0..d).map(|k| x1[k].min(x2[k]) - 2.0).collect();
        let hi: Point = (0..d).map(|k| x1[k].max(x2[k]) + 2.0).collect();
        let resolution = if d == 1 { 401 } else { 41 };
        let theta = estimate_theta(
            &potential,
            &SearchBox {
                lower: lo,
                upper: hi,
            },
            resolution,
        )?;
        interaction.check_synchronization(theta)?;

        let wells = find_wells(&potential, &well_seeds(x1, x2))?;
        let w: [&[f64]; 2] = [&wells.0, &wells.1];
        for (i, x) in [x1, x2].into_iter().enumerate() {
            let basin = basin_of(&potential, x, &w, FLOW_HORIZON, BASIN_STEP)?;
            if basin != Some(i) {
                return Err(Error::assumption(
                    Assumption::DistinctBasins,
                    format!(
                        "x{} = {:?} flows to {} instead of well {:?}",
                        i + 1,
                        x,
                        match basin {
                            Some(j) => format!("well {:?}", w[j]),
                            None => "no well".to_string(),
                        },
                        w[i]
                    ),
                ));
            }
        }
        let eps0 = compute_eps0(&potential, &potential, x1, x2, FLOW_HORIZON, FLOW_STEP)?;
        let mut out = Landscape {
            potential,
            interaction,
            wells,
            theta,
            x_init,
            eps0,
            lambda0: Vec::new(),
            hbar0: f64::NAN,
        };
        out.lambda0 = out.solve_lambda0()?;
        out.hbar0 = out.eval_h0(&out.lambda0);
        Ok(out)
    }

    pub fn alpha(&self) -> f64 {
        self.interaction.alpha
    }

    /// `H0(l) = 2V(l) - V(l1) - V(l2) + F(l - l1) + F(l - l2)`
    pub fn eval_h0(&self, l: &[f64]) -> f64 {
        let v = &self.potential;
        let (l1, l2) = (&self.wells.0, &self.wells.1);
        let f = |a: &[f64], b: &[f64]| self.interaction.value(&point::sub(a, b));
        2.0 * v.value(l) - v.value(l1) - v.value(l2) + f(l, l1) + f(l, l2)
    }

    /// `grad H0(l) = 2 grad V(l) + alpha (l - l1) + alpha (l - l2)`
    pub fn grad_h0(&self, l: &[f64]) -> Point {
        let a = self.alpha();
        let g = self.potential.grad(l);
        (0..l.len())
            .map(|k| 2.0 * g[k] + a * (l[k] - self.wells.0[k]) + a * (l[k] - self.wells.1[k]))
            .collect()
    }

    /// Root of `grad V(l) + alpha l - alpha (l1 + l2)/2`.
    pub fn solve_lambda0(&self) -> Result<Point> {
        let a = self.alpha();
        let target = point::scale(&point::add(&self.wells.0, &self.wells.1), 0.5 * a);
        let v = &self.potential;
        let root = newton_solve(
            |x| {
                let g = v.grad(x);
                (0..x.len()).map(|k| g[k] + a * x[k] - target[k]).collect()
            },
            |x| {
                let mut h = v.hess(x);
                for i in 0..x.len() {
                    h[(i, i)] += a;
                }
                h
            },
            point::midpoint(&self.wells.0, &self.wells.1),
        )?;
        let residual = point::norm(&self.grad_h0(&root));
        if residual > 1e-10 {
            return Err(Error::numeric(format!(
                "grad H0 at the computed root is {residual:.3e}"
            )));
        }
        Ok(root)
    }

    pub fn psi1(&self) -> EffectivePotential {
        EffectivePotential {
            base: self.potential.clone(),
            alpha: self.alpha(),
            anchor: self.wells.0.clone(),
        }
    }

    pub fn psi2(&self) -> EffectivePotential {
        EffectivePotential {
            base: self.potential.clone(),
            alpha: self.alpha(),
            anchor: self.wells.1.clone(),
        }
    }

    /// `(Psi1, Psi2)` with `Psi_i = V + alpha/2 |. - l_i|^2`, whose `h0` is `H0`.
    pub fn pair(&self) -> ConvexPair {
        ConvexPair {
            psi1: self.psi1(),
            psi2: self.psi2(),
            well1: self.wells.0.clone(),
            well2: self.wells.1.clone(),
            eps0: self.eps0,
        }
    }

    pub fn check_radius(&self, eps: f64) -> Result<()> {
        if eps > 0.0 && eps < self.eps0 {
            Ok(())
        } else {
            Err(Error::assumption(
                Assumption::CollisionRadius,
                format!("eps = {eps}, eps0 = {}", self.eps0),
            ))
        }
    }
}
