//! Stopping rules on the tagged particles `X = x[0..d]`, `Y = y[0..d]`.

use serde::Serialize;

use crate::dynamics::PathState;
use crate::error::{Error, Result};
use crate::point::{self, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    X,
    Y,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StoppingKind {
    /// `|X - Y| <= 2 eps`
    EpsCollision {
        eps: f64,
    },
    /// Sign change of `X - Y` in one dimension, interpolated inside the step.
    ExactCollision1D,
    /// Both (or either) tagged particles within `eps` of `center`.
    BallEntry {
        center: Point,
        eps: f64,
        both_sides: bool,
    },
    /// `X >= z1` and `Y <= z2`, one dimension.
    BoxExit {
        z1: f64,
        z2: f64,
    },
    /// One tagged particle at distance at least `radius` from `center`.
    BallExit {
        center: Point,
        radius: f64,
        side: Side,
    },
    TimeCap {
        t: f64,
    },
}

impl StoppingKind {
    pub fn name(&self) -> &'static str {
        match self {
            StoppingKind::EpsCollision { .. } => "eps_collision",
            StoppingKind::ExactCollision1D => "exact_collision_1d",
            StoppingKind::BallEntry { .. } => "ball_entry",
            StoppingKind::BoxExit { .. } => "box_exit",
            StoppingKind::BallExit { .. } => "ball_exit",
            StoppingKind::TimeCap { .. } => "time_cap",
        }
    }
}

/// First-of composition; ties go to the lowest index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StoppingRule {
    pub kinds: Vec<StoppingKind>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trigger {
    pub index: usize,
    pub time: f64,
    pub x_loc: Point,
    pub y_loc: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollisionRecord {
    pub replicate: u64,
    pub rule: String,
    pub time: f64,
    pub x_loc: Option<Point>,
    pub y_loc: Option<Point>,
    pub midpoint: Option<Point>,
    pub censored: bool,
}

impl CollisionRecord {
    pub fn triggered(replicate: u64, rule: &StoppingRule, t: Trigger) -> Self {
        let mid = point::midpoint(&t.x_loc, &t.y_loc);
        CollisionRecord {
            replicate,
            rule: rule.kinds[t.index].name().to_string(),
            time: t.time,
            x_loc: Some(t.x_loc),
            y_loc: Some(t.y_loc),
            midpoint: Some(mid),
            censored: false,
        }
    }

    pub fn censored(replicate: u64, t_max: f64) -> Self {
        CollisionRecord {
            replicate,
            rule: "censored".to_string(),
            time: t_max,
            x_loc: None,
            y_loc: None,
            midpoint: None,
            censored: true,
        }
    }
}

impl StoppingRule {
    pub fn single(kind: StoppingKind) -> Self {
        StoppingRule { kinds: vec![kind] }
    }

    /// Structural checks against the dimension and the initial points;
    /// `eps0`, when known, bounds collision radii.
    pub fn validate(&self, d: usize, x_init: (&[f64], &[f64]), eps0: Option<f64>) -> Result<()> {
        if self.kinds.is_empty() {
            return Err(Error::config("stopping rule list is empty"));
        }
        for k in &self.kinds {
            match k {
                StoppingKind::EpsCollision { eps } => {
                    if !(*eps > 0.0) {
                        return Err(Error::config(format!(
                            "collision radius must be positive, got {eps}"
                        )));
                    }
                    if let Some(e0) = eps0 {
                        if *eps >= e0 {
                            return Err(Error::assumption(
                                crate::error::Assumption::CollisionRadius,
                                format!("eps = {eps}, eps0 = {e0}"),
                            ));
                        }
                    }
                }
                StoppingKind::ExactCollision1D => {
                    if d != 1 {
                        return Err(Error::config(
                            "exact collisions are only defined in one dimension; use an eps-collision rule",
                        ));
                    }
                    if !(x_init.0[0] < x_init.1[0]) {
                        return Err(Error::config("exact collision rule needs x1 < x2"));
                    }
                }
                StoppingKind::BallEntry { center, eps, .. } => {
                    if center.len() != d || !(*eps > 0.0) {
                        return Err(Error::config(
                            "ball entry needs a center of the right dimension and eps > 0",
                        ));
                    }
                }
                StoppingKind::BoxExit { .. } => {
                    if d != 1 {
                        return Err(Error::config("box exit rule is one-dimensional"));
                    }
                }
                StoppingKind::BallExit { center, radius, .. } => {
                    if center.len() != d || !(*radius > 0.0) {
                        return Err(Error::config(
                            "ball exit needs a center of the right dimension and radius > 0",
                        ));
                    }
                }
                StoppingKind::TimeCap { t } => {
                    if !(*t >= 0.0) {
                        return Err(Error::config("time cap must be non-negative"));
                    }
                }
            }
        }
        Ok(())
    }
}

fn fire(index: usize, next: &PathState, d: usize) -> Option<Trigger> {
    Some(Trigger {
        index,
        time: next.time,
        x_loc: next.x[..d].to_vec(),
        y_loc: next.y[..d].to_vec(),
    })
}

fn check_one(
    index: usize,
    kind: &StoppingKind,
    prev: &PathState,
    next: &PathState,
) -> Option<Trigger> {
    let d = next.d;
    let (x, y) = (&next.x[..d], &next.y[..d]);
    match kind {
        StoppingKind::EpsCollision { eps } => {
            if point::dist(x, y) <= 2.0 * eps {
                return fire(index, next, d);
            }
        }
        StoppingKind::ExactCollision1D => {
            let d1 = x[0] - y[0];
            if d1 >= 0.0 {
                let d0 = prev.x[0] - prev.y[0];
                let frac = if d0 < 0.0 { d0 / (d0 - d1) } else { 0.0 };
                let lerp = |a: f64, b: f64| a + frac * (b - a);
                return Some(Trigger {
                    index,
                    time: lerp(prev.time, next.time),
                    x_loc: vec![lerp(prev.x[0], x[0])],
                    y_loc: vec![lerp(prev.y[0], y[0])],
                });
            }
        }
        StoppingKind::BallEntry {
            center,
            eps,
            both_sides,
        } => {
            let ix = point::dist(x, center) <= *eps;
            let iy = point::dist(y, center) <= *eps;
            if (*both_sides && ix && iy) || (!*both_sides && (ix || iy)) {
                return fire(index, next, d);
            }
        }
        StoppingKind::BoxExit { z1, z2 } => {
            if x[0] >= *z1 && y[0] <= *z2 {
                return fire(index, next, d);
            }
        }
        StoppingKind::BallExit {
            center,
            radius,
            side,
        } => {
            let p = match side {
                Side::X => x,
                Side::Y => y,
            };
            if point::dist(p, center) >= *radius {
                return fire(index, next, d);
            }
        }
        StoppingKind::TimeCap { t } => {
            if next.time >= *t - 1e-12 * t.abs().max(1.0) {
                return fire(index, next, d);
            }
        }
    }
    None
}

/// Evaluates the rules on one step `prev -> next`; the lowest triggered index wins.
pub fn check(rule: &StoppingRule, prev: &PathState, next: &PathState) -> Option<Trigger> {
    rule.kinds
        .iter()
        .enumerate()
        .find_map(|(i, k)| check_one(i, k, prev, next))
}
