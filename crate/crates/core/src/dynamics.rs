//! Euler–Maruyama simulation of the paired systems.
//!
//! Every particle follows
//! `x <- x - grad V(x) dt - alpha (x - m) dt + sigma sqrt(dt) xi`
//! where `m` is a fixed anchor or the empirical mean of its side at the start
//! of the step. Particle 0 of each side is the tagged particle.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::noise::{Gaussian, ReplicateKey};
use crate::point::{self, Point};
use crate::potentials::{EffectivePotential, PotentialSpec};
use crate::stopping::{check, CollisionRecord, StoppingRule};

/// Largest number of steps a single run may take.
pub const STEP_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimConfig {
    pub dt: f64,
    pub t_max: f64,
    pub sigma: f64,
    pub seed: u64,
    pub dimension: usize,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::config(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.t_max >= self.dt && self.t_max.is_finite()) {
            return Err(Error::config(format!(
                "t_max must be at least dt, got {}",
                self.t_max
            )));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::config(format!(
                "sigma must be non-negative, got {}",
                self.sigma
            )));
        }
        if self.dimension == 0 {
            return Err(Error::config("dimension must be positive"));
        }
        if self.n_steps() > STEP_BUDGET {
            return Err(Error::config(format!(
                "t_max/dt = {} steps exceeds the budget of {STEP_BUDGET}",
                self.n_steps()
            )));
        }
        Ok(())
    }

    pub fn n_steps(&self) -> u64 {
        steps_for(self.t_max, self.dt)
    }

    pub fn key(&self, sigma_index: u64, replicate: u64) -> ReplicateKey {
        ReplicateKey::new(self.seed, sigma_index, replicate)
    }
}

fn steps_for(t: f64, dt: f64) -> u64 {
    (t / dt - 1e-9).ceil().max(0.0) as u64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SystemVariant {
    /// Independent diffusions in `Psi1` and `Psi2`.
    LinearPair {
        psi1: EffectivePotential,
        psi2: EffectivePotential,
    },
    /// Drift `-grad V(x) - alpha (x - l_i)`.
    LinearizedPair {
        potential: PotentialSpec,
        alpha: f64,
        anchors: (Point, Point),
    },
    /// Tagged particle driven by the empirical mean of an independent cohort
    /// of `n_cohort` interacting particles.
    CohortPair {
        potential: PotentialSpec,
        alpha: f64,
        n_cohort: usize,
    },
    /// `n` interacting particles per side, particle 0 tagged.
    ParticlePair {
        potential: PotentialSpec,
        alpha: f64,
        n: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemSpec {
    pub variant: SystemVariant,
    pub x_init: (Point, Point),
}

#[derive(Debug, Clone, Copy)]
enum MeanSource<'a> {
    Fixed(&'a [f64]),
    /// Mean over particles `from..n` of the same side.
    Empirical {
        from: usize,
    },
}

#[derive(Debug, Clone, Copy)]
struct SideDrift<'a> {
    base: &'a PotentialSpec,
    alpha: f64,
    mean: MeanSource<'a>,
}

impl SystemSpec {
    pub fn dim(&self) -> usize {
        self.x_init.0.len()
    }

    pub fn particles_per_side(&self) -> usize {
        match &self.variant {
            SystemVariant::LinearPair { .. } | SystemVariant::LinearizedPair { .. } => 1,
            SystemVariant::CohortPair { n_cohort, .. } => n_cohort + 1,
            SystemVariant::ParticlePair { n, .. } => *n,
        }
    }

    /// Confining potential and interaction strength, for the interacting variants.
    pub fn potential_alpha(&self) -> Option<(&PotentialSpec, f64)> {
        match &self.variant {
            SystemVariant::LinearPair { .. } => None,
            SystemVariant::LinearizedPair {
                potential, alpha, ..
            }
            | SystemVariant::CohortPair {
                potential, alpha, ..
            }
            | SystemVariant::ParticlePair {
                potential, alpha, ..
            } => Some((potential, *alpha)),
        }
    }

    /// Structural checks; `theta`, when given, is used for synchronization.
    pub fn validate(&self, theta: Option<f64>) -> Result<()> {
        let d = self.dim();
        if d == 0 || self.x_init.1.len() != d {
            return Err(Error::config(
                "initial points must have the same positive dimension",
            ));
        }
        if !(point::is_finite(&self.x_init.0) && point::is_finite(&self.x_init.1)) {
            return Err(Error::config("initial points must be finite"));
        }
        match &self.variant {
            SystemVariant::LinearPair { psi1, psi2 } => {
                if psi1.base.dimension != d || psi2.base.dimension != d {
                    return Err(Error::config(
                        "potential dimension does not match the initial points",
                    ));
                }
            }
            SystemVariant::LinearizedPair {
                potential, anchors, ..
            } => {
                if potential.dimension != d || anchors.0.len() != d || anchors.1.len() != d {
                    return Err(Error::config(
                        "potential or anchor dimension does not match the initial points",
                    ));
                }
            }
            SystemVariant::CohortPair {
                potential,
                n_cohort: n,
                ..
            }
            | SystemVariant::ParticlePair { potential, n, .. } => {
                if potential.dimension != d {
                    return Err(Error::config(
                        "potential dimension does not match the initial points",
                    ));
                }
                if *n < 2 {
                    return Err(Error::config(format!(
                        "particle count must be at least 2, got {n}"
                    )));
                }
            }
        }
        if let (Some((_, alpha)), Some(theta)) = (self.potential_alpha(), theta) {
            crate::potentials::InteractionSpec { alpha }.check_synchronization(theta)?;
        }
        Ok(())
    }

    fn drift(&self, side: usize) -> SideDrift<'_> {
        match &self.variant {
            SystemVariant::LinearPair { psi1, psi2 } => {
                let psi = if side == 0 { psi1 } else { psi2 };
                SideDrift {
                    base: &psi.base,
                    alpha: psi.alpha,
                    mean: MeanSource::Fixed(&psi.anchor),
                }
            }
            SystemVariant::LinearizedPair {
                potential,
                alpha,
                anchors,
            } => SideDrift {
                base: potential,
                alpha: *alpha,
                mean: MeanSource::Fixed(if side == 0 { &anchors.0 } else { &anchors.1 }),
            },
            SystemVariant::CohortPair {
                potential, alpha, ..
            } => SideDrift {
                base: potential,
                alpha: *alpha,
                mean: MeanSource::Empirical { from: 1 },
            },
            SystemVariant::ParticlePair {
                potential, alpha, ..
            } => SideDrift {
                base: potential,
                alpha: *alpha,
                mean: MeanSource::Empirical { from: 0 },
            },
        }
    }
}

/// Positions of both sides, particle-major (`x[p * d + k]`).
#[derive(Debug, Clone, PartialEq)]
pub struct PathState {
    pub time: f64,
    pub step: u64,
    pub n: usize,
    pub d: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl PathState {
    /// All particles of side X at `x1`, all of side Y at `x2`.
    pub fn initial(spec: &SystemSpec) -> Self {
        let n = spec.particles_per_side();
        let d = spec.dim();
        PathState {
            time: 0.0,
            step: 0,
            n,
            d,
            x: spec.x_init.0.repeat(n),
            y: spec.x_init.1.repeat(n),
        }
    }

    pub fn side(&self, side: usize) -> &[f64] {
        if side == 0 {
            &self.x
        } else {
            &self.y
        }
    }

    pub fn particle(&self, side: usize, p: usize) -> &[f64] {
        &self.side(side)[p * self.d..(p + 1) * self.d]
    }

    pub fn tagged(&self) -> (&[f64], &[f64]) {
        (&self.x[..self.d], &self.y[..self.d])
    }

    /// Empirical mean of particles `from..n` on one side.
    pub fn side_mean(&self, side: usize, from: usize) -> Point {
        let mut m = vec![0.0; self.d];
        mean_into(self.side(side), self.d, from, self.n, &mut m);
        m
    }
}

fn mean_into(pos: &[f64], d: usize, from: usize, n: usize, out: &mut [f64]) {
    out.iter_mut().for_each(|c| *c = 0.0);
    for p in from..n {
        for k in 0..d {
            out[k] += pos[p * d + k];
        }
    }
    let c = (n - from) as f64;
    out.iter_mut().for_each(|v| *v /= c);
}

/// One Gaussian stream per particle and side.
#[derive(Debug, Clone)]
pub struct Noise {
    streams: [Vec<Gaussian>; 2],
}

impl Noise {
    pub fn new(key: ReplicateKey, n: usize) -> Self {
        let make = |side: u32| (0..n as u32).map(|p| key.gaussian(side, p)).collect();
        Noise {
            streams: [make(0), make(1)],
        }
    }

    /// Rebuilds from an explicit list of per-particle streams.
    pub fn from_streams(x: Vec<Gaussian>, y: Vec<Gaussian>) -> Self {
        Noise { streams: [x, y] }
    }
}

/// Stepping kernel for one replicate.
#[derive(Debug)]
pub struct Engine<'a> {
    spec: &'a SystemSpec,
    drifts: [SideDrift<'a>; 2],
    dt: f64,
    noise_scale: f64,
    noise: Noise,
    mean: Point,
    /// Increments used by the tagged particles in the last step: `[X..., Y...]`.
    pub tag_noise: Vec<f64>,
}

impl<'a> Engine<'a> {
    pub fn new(spec: &'a SystemSpec, cfg: &SimConfig, noise: Noise) -> Self {
        let d = spec.dim();
        Engine {
            spec,
            drifts: [spec.drift(0), spec.drift(1)],
            dt: cfg.dt,
            noise_scale: cfg.sigma * cfg.dt.sqrt(),
            noise,
            mean: vec![0.0; d],
            tag_noise: vec![0.0; 2 * d],
        }
    }

    pub fn spec(&self) -> &SystemSpec {
        self.spec
    }

    /// Writes the state one step after `cur` into `next`.
    pub fn advance(&mut self, cur: &PathState, next: &mut PathState) -> Result<()> {
        let (n, d) = (cur.n, cur.d);
        let step = cur.step + 1;
        let time = step as f64 * self.dt;
        for side in 0..2 {
            let drift = self.drifts[side];
            let src = cur.side(side);
            match drift.mean {
                MeanSource::Fixed(m) => self.mean.copy_from_slice(m),
                MeanSource::Empirical { from } => mean_into(src, d, from, n, &mut self.mean),
            }
            let dst = if side == 0 { &mut next.x } else { &mut next.y };
            let streams = &mut self.noise.streams[side];
            for p in 0..n {
                let g = &mut streams[p];
                for k in 0..d {
                    let i = p * d + k;
                    let v = src[i];
                    let f = -drift.base.dcoord(k, v) - drift.alpha * (v - self.mean[k]);
                    let xi = g.sample();
                    let w = v + f * self.dt + self.noise_scale * xi;
                    if !w.is_finite() {
                        return Err(Error::BlowUp {
                            time,
                            side,
                            particle: p,
                        });
                    }
                    dst[i] = w;
                    if p == 0 {
                        self.tag_noise[side * d + k] = xi;
                    }
                }
            }
        }
        next.step = step;
        next.time = time;
        next.n = n;
        next.d = d;
        Ok(())
    }
}

/// One explicit step from `state`.
pub fn step(
    state: &PathState,
    spec: &SystemSpec,
    cfg: &SimConfig,
    noise: Noise,
) -> Result<PathState> {
    let mut engine = Engine::new(spec, cfg, noise);
    let mut next = state.clone();
    engine.advance(state, &mut next)?;
    Ok(next)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub side: usize,
    pub particle: usize,
    pub coords: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathSummary {
    pub steps: u64,
    pub final_time: f64,
    pub final_x: Point,
    pub final_y: Point,
    /// Time averages of the tagged positions over the run.
    pub mean_x: Point,
    pub mean_y: Point,
    /// Largest single-step displacement of either tagged particle.
    pub max_step_displacement: f64,
    pub trajectory: Vec<TrajectoryRow>,
}

fn record_rows(rows: &mut Vec<TrajectoryRow>, s: &PathState) {
    for side in 0..2 {
        for p in 0..s.n {
            rows.push(TrajectoryRow {
                t: s.time,
                side,
                particle: p,
                coords: s.particle(side, p).to_vec(),
            });
        }
    }
}

/// Simulates until the first trigger of `rule` or until `cfg.t_max`.
///
/// With `thin > 0` every `thin`-th state (and the initial one) is kept in the
/// summary.
pub fn run_until(
    spec: &SystemSpec,
    cfg: &SimConfig,
    rule: &StoppingRule,
    key: ReplicateKey,
    thin: u64,
) -> Result<(CollisionRecord, PathSummary)> {
    cfg.validate()?;
    spec.validate(None)?;
    if cfg.dimension != spec.dim() {
        return Err(Error::config(
            "simulation dimension does not match the system",
        ));
    }
    rule.validate(spec.dim(), (&spec.x_init.0, &spec.x_init.1), None)?;
    let d = spec.dim();
    let mut cur = PathState::initial(spec);
    let mut next = cur.clone();
    let mut engine = Engine::new(spec, cfg, Noise::new(key, cur.n));
    let mut trajectory = Vec::new();
    if thin > 0 {
        record_rows(&mut trajectory, &cur);
    }
    let mut sum_x = cur.x[..d].to_vec();
    let mut sum_y = cur.y[..d].to_vec();
    let mut max_disp: f64 = 0.0;

    let summarize = |s: &PathState,
                     sum_x: &[f64],
                     sum_y: &[f64],
                     max_disp: f64,
                     trajectory: Vec<TrajectoryRow>| {
        let c = (s.step + 1) as f64;
        PathSummary {
            steps: s.step,
            final_time: s.time,
            final_x: s.x[..d].to_vec(),
            final_y: s.y[..d].to_vec(),
            mean_x: sum_x.iter().map(|v| v / c).collect(),
            mean_y: sum_y.iter().map(|v| v / c).collect(),
            max_step_displacement: max_disp,
            trajectory,
        }
    };

    if let Some(t) = check(rule, &cur, &cur) {
        let rec = CollisionRecord::triggered(key.replicate, rule, t);
        return Ok((rec, summarize(&cur, &sum_x, &sum_y, 0.0, trajectory)));
    }
    let n_steps = cfg.n_steps();
    for _ in 0..n_steps {
        engine.advance(&cur, &mut next)?;
        let (nx, ny) = next.tagged();
        let (cx, cy) = cur.tagged();
        max_disp = max_disp.max(point::dist(nx, cx)).max(point::dist(ny, cy));
        for k in 0..d {
            sum_x[k] += nx[k];
            sum_y[k] += ny[k];
        }
        if thin > 0 && next.step.is_multiple_of(thin) {
            record_rows(&mut trajectory, &next);
        }
        if let Some(t) = check(rule, &cur, &next) {
            let rec = CollisionRecord::triggered(key.replicate, rule, t);
            return Ok((rec, summarize(&next, &sum_x, &sum_y, max_disp, trajectory)));
        }
        std::mem::swap(&mut cur, &mut next);
    }
    let rec = CollisionRecord::censored(key.replicate, cfg.t_max);
    Ok((rec, summarize(&cur, &sum_x, &sum_y, max_disp, trajectory)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingSample {
    pub t_start: f64,
    pub sup_x: f64,
    pub sup_y: f64,
}

/// Runs the interacting pair to `horizon` and, from each `T` in `t_starts`,
/// a linearized copy started at the tagged positions and driven by the tagged
/// particles' own increments. Reports `sup_{[T, horizon]} |X_t - x_t|` and the
/// same for `Y`. All copies share one interacting path.
pub fn couple_linearized(
    spec: &SystemSpec,
    cfg: &SimConfig,
    anchors: (&[f64], &[f64]),
    t_starts: &[f64],
    horizon: f64,
    key: ReplicateKey,
) -> Result<Vec<CouplingSample>> {
    cfg.validate()?;
    spec.validate(None)?;
    let (potential, alpha) = match &spec.variant {
        SystemVariant::CohortPair {
            potential, alpha, ..
        }
        | SystemVariant::ParticlePair {
            potential, alpha, ..
        } => (potential, *alpha),
        _ => return Err(Error::config("coupling needs a cohort or particle system")),
    };
    let d = spec.dim();
    if anchors.0.len() != d || anchors.1.len() != d {
        return Err(Error::config("anchor dimension does not match the system"));
    }
    if !(horizon <= cfg.t_max + 1e-12) {
        return Err(Error::config("coupling horizon must not exceed t_max"));
    }
    if t_starts.is_empty() || t_starts.iter().any(|t| !(*t >= 0.0 && *t < horizon)) {
        return Err(Error::config("every T_start must lie in [0, horizon)"));
    }
    let start_steps: Vec<u64> = t_starts
        .iter()
        .map(|t| (t / cfg.dt).round() as u64)
        .collect();
    let n_steps = steps_for(horizon, cfg.dt);
    let mut copies: Vec<Option<(Point, Point)>> = vec![None; t_starts.len()];
    let mut sups = vec![(0.0f64, 0.0f64); t_starts.len()];

    let mut cur = PathState::initial(spec);
    let mut next = cur.clone();
    let mut engine = Engine::new(spec, cfg, Noise::new(key, cur.n));
    let (dt, s) = (cfg.dt, cfg.sigma * cfg.dt.sqrt());
    let activate = |copies: &mut Vec<Option<(Point, Point)>>, state: &PathState| {
        for (c, &st) in copies.iter_mut().zip(&start_steps) {
            if c.is_none() && st == state.step {
                let (x, y) = state.tagged();
                *c = Some((x.to_vec(), y.to_vec()));
            }
        }
    };
    activate(&mut copies, &cur);
    for _ in 0..n_steps {
        engine.advance(&cur, &mut next)?;
        for (c, sup) in copies.iter_mut().zip(sups.iter_mut()) {
            if let Some((cx, cy)) = c {
                for (side, lin, anchor) in [(0, &mut *cx, anchors.0), (1, &mut *cy, anchors.1)] {
                    for k in 0..d {
                        let v = lin[k];
                        let f = -potential.dcoord(k, v) - alpha * (v - anchor[k]);
                        lin[k] = v + f * dt + s * engine.tag_noise[side * d + k];
                    }
                    if !point::is_finite(lin) {
                        return Err(Error::BlowUp {
                            time: next.time,
                            side,
                            particle: 0,
                        });
                    }
                }
                let (tx, ty) = next.tagged();
                sup.0 = sup.0.max(point::dist(tx, cx));
                sup.1 = sup.1.max(point::dist(ty, cy));
            }
        }
        activate(&mut copies, &next);
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(t_starts
        .iter()
        .zip(sups)
        .map(|(&t_start, (sup_x, sup_y))| CouplingSample {
            t_start,
            sup_x,
            sup_y,
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanTrack {
    pub times: Vec<f64>,
    pub dev_x: Vec<f64>,
    pub dev_y: Vec<f64>,
    /// Exact running maximum of `max(|Xbar - l1|, |Ybar - l2|)` over every
    /// step with `t >= burn_in`.
    pub max_deviation: f64,
}

/// Distances of the side means from `anchors`, sampled every `every` steps up
/// to `horizon`. The mean runs over the interacting particles of each side
/// (the whole side for particle systems, the cohort for cohort systems).
pub fn empirical_mean_track(
    spec: &SystemSpec,
    cfg: &SimConfig,
    anchors: (&[f64], &[f64]),
    horizon: f64,
    every: u64,
    burn_in: f64,
    key: ReplicateKey,
) -> Result<MeanTrack> {
    cfg.validate()?;
    spec.validate(None)?;
    let from = match &spec.variant {
        SystemVariant::CohortPair { .. } => 1,
        _ => 0,
    };
    let d = spec.dim();
    if anchors.0.len() != d || anchors.1.len() != d {
        return Err(Error::config("anchor dimension does not match the system"));
    }
    let every = every.max(1);
    let mut cur = PathState::initial(spec);
    let mut next = cur.clone();
    let mut engine = Engine::new(spec, cfg, Noise::new(key, cur.n));
    let mut mx = vec![0.0; d];
    let mut my = vec![0.0; d];
    let mut track = MeanTrack {
        times: Vec::new(),
        dev_x: Vec::new(),
        dev_y: Vec::new(),
        max_deviation: 0.0,
    };
    let mut observe = |s: &PathState, track: &mut MeanTrack| {
        mean_into(&s.x, d, from, s.n, &mut mx);
        mean_into(&s.y, d, from, s.n, &mut my);
        let (ex, ey) = (point::dist(&mx, anchors.0), point::dist(&my, anchors.1));
        if s.time >= burn_in {
            track.max_deviation = track.max_deviation.max(ex).max(ey);
        }
        if s.step.is_multiple_of(every) {
            track.times.push(s.time);
            track.dev_x.push(ex);
            track.dev_y.push(ey);
        }
    };
    observe(&cur, &mut track);
    for _ in 0..steps_for(horizon, cfg.dt) {
        engine.advance(&cur, &mut next)?;
        observe(&next, &mut track);
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(track)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stopping::StoppingKind;

    fn quad_pair(c: f64, x: f64) -> SystemSpec {
        SystemSpec {
            variant: SystemVariant::LinearPair {
                psi1: EffectivePotential::quadratic(1.0, vec![-c]).unwrap(),
                psi2: EffectivePotential::quadratic(1.0, vec![c]).unwrap(),
            },
            x_init: (vec![-x], vec![x]),
        }
    }

    fn cfg(dt: f64, t_max: f64, sigma: f64) -> SimConfig {
        SimConfig {
            dt,
            t_max,
            sigma,
            seed: 42,
            dimension: 1,
        }
    }

    #[test]
    fn one_deterministic_step() {
        let spec = SystemSpec {
            variant: SystemVariant::LinearPair {
                psi1: EffectivePotential::quadratic(1.0, vec![0.0]).unwrap(),
                psi2: EffectivePotential::quadratic(1.0, vec![0.0]).unwrap(),
            },
            x_init: (vec![1.0], vec![1.0]),
        };
        let c = cfg(0.1, 1.0, 0.0);
        let s0 = PathState::initial(&spec);
        let s1 = step(&s0, &spec, &c, Noise::new(c.key(0, 0), 1)).unwrap();
        assert!((s1.x[0] - 0.9).abs() < 1e-15);
        assert!((s1.time - 0.1).abs() < 1e-15);
    }

    #[test]
    fn particles_at_a_well_stay_put() {
        let spec = SystemSpec {
            variant: SystemVariant::ParticlePair {
                potential: PotentialSpec::symmetric_double_well(1.0, 1).unwrap(),
                alpha: 0.5,
                n: 4,
            },
            x_init: (vec![-1.0], vec![1.0]),
        };
        let rule = StoppingRule::single(StoppingKind::TimeCap { t: 10.0 });
        let (rec, summary) = run_until(
            &spec,
            &cfg(1e-2, 20.0, 0.0),
            &rule,
            ReplicateKey::new(1, 0, 0),
            0,
        )
        .unwrap();
        assert_eq!(summary.final_x, vec![-1.0]);
        assert_eq!(summary.final_y, vec![1.0]);
        assert!((rec.time - 10.0).abs() < 1e-9);
    }

    #[test]
    fn time_cap_and_censoring() {
        let spec = quad_pair(0.5, 1.0);
        let rule = StoppingRule::single(StoppingKind::TimeCap { t: 1.0 });
        let (rec, _) = run_until(
            &spec,
            &cfg(1e-3, 5.0, 0.3),
            &rule,
            ReplicateKey::new(1, 0, 0),
            0,
        )
        .unwrap();
        assert!(!rec.censored && (rec.time - 1.0).abs() <= 1e-3);

        let rule = StoppingRule::single(StoppingKind::EpsCollision { eps: 1e-6 });
        let (rec, _) = run_until(
            &spec,
            &cfg(1e-2, 1.0, 0.0),
            &rule,
            ReplicateKey::new(1, 0, 0),
            0,
        )
        .unwrap();
        assert!(rec.censored);
        assert_eq!(rec.time, 1.0);
    }

    #[test]
    fn immediate_trigger_at_time_zero() {
        let spec = quad_pair(0.5, 0.05);
        let rule = StoppingRule::single(StoppingKind::EpsCollision { eps: 0.1 });
        let (rec, s) = run_until(
            &spec,
            &cfg(1e-3, 5.0, 0.3),
            &rule,
            ReplicateKey::new(1, 0, 0),
            0,
        )
        .unwrap();
        assert_eq!(rec.time, 0.0);
        assert_eq!(s.steps, 0);
    }

    #[test]
    fn blow_up_is_reported() {
        let spec = SystemSpec {
            variant: SystemVariant::ParticlePair {
                potential: PotentialSpec::symmetric_double_well(1.0, 1).unwrap(),
                alpha: 0.5,
                n: 3,
            },
            x_init: (vec![-50.0], vec![50.0]),
        };
        let rule = StoppingRule::single(StoppingKind::TimeCap { t: 10.0 });
        let err = run_until(
            &spec,
            &cfg(0.5, 10.0, 0.1),
            &rule,
            ReplicateKey::new(1, 0, 0),
            0,
        )
        .unwrap_err();
        assert!(matches!(err, Error::BlowUp { .. }));
    }

    #[test]
    fn thinned_trajectory_rows() {
        let spec = quad_pair(0.5, 1.0);
        let rule = StoppingRule::single(StoppingKind::TimeCap { t: 0.1 });
        let (_, s) = run_until(
            &spec,
            &cfg(1e-2, 1.0, 0.3),
            &rule,
            ReplicateKey::new(1, 0, 0),
            5,
        )
        .unwrap();
        // steps 0, 5, 10 on both sides
        assert_eq!(s.trajectory.len(), 6);
        assert_eq!(s.trajectory[0].coords, vec![-1.0]);
    }

    #[test]
    fn deterministic_coupling_of_settled_cohort() {
        let spec = SystemSpec {
            variant: SystemVariant::CohortPair {
                potential: PotentialSpec::symmetric_double_well(0.2, 1).unwrap(),
                alpha: 0.3,
                n_cohort: 4,
            },
            x_init: (vec![-1.0], vec![1.0]),
        };
        let out = couple_linearized(
            &spec,
            &cfg(1e-2, 20.0, 0.0),
            (&[-1.0], &[1.0]),
            &[1.0, 5.0],
            20.0,
            ReplicateKey::new(3, 0, 0),
        )
        .unwrap();
        for s in out {
            assert_eq!((s.sup_x, s.sup_y), (0.0, 0.0));
        }
    }

    #[test]
    fn single_particle_mean_is_the_particle() {
        let spec = SystemSpec {
            variant: SystemVariant::LinearizedPair {
                potential: PotentialSpec::symmetric_double_well(1.0, 1).unwrap(),
                alpha: 1.5,
                anchors: (vec![-1.0], vec![1.0]),
            },
            x_init: (vec![-1.3], vec![1.2]),
        };
        let tr = empirical_mean_track(
            &spec,
            &cfg(1e-2, 1.0, 0.0),
            (&[-1.0], &[1.0]),
            1.0,
            1,
            0.0,
            ReplicateKey::new(0, 0, 0),
        )
        .unwrap();
        assert!((tr.dev_x[0] - 0.3).abs() < 1e-12);
        assert!((tr.dev_y[0] - 0.2).abs() < 1e-12);
        assert!((tr.max_deviation - 0.3).abs() < 1e-12);
    }
}
