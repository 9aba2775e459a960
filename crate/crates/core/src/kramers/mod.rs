//! Monte Carlo sweeps over noise levels, Arrhenius fits and comparison with
//! the analytic predictions.

pub mod coupling;
pub mod location;
pub mod regression;

use rayon::prelude::*;
use serde::Serialize;

pub use coupling::{
    confinement_experiment, coupling_experiment, ConfinementConfig, ConfinementReport,
    CouplingConfig, CouplingReport, CouplingRow,
};
pub use location::{location_report, median, window_fraction, LocationSummary};
pub use regression::{arrhenius_fit, ols, ArrheniusFit, Ols};

use crate::dynamics::{
    run_until, SimConfig, SystemSpec, SystemVariant, TrajectoryRow, STEP_BUDGET,
};
use crate::error::{Assumption, Error, Result};
use crate::landscape::{eps_c_table, sphere_infimum, ConvexPair, Landscape};
use crate::noise::ReplicateKey;
use crate::point::Point;
use crate::potentials::{descend_to_minimum, EffectivePotential, InteractionSpec};
use crate::stopping::{CollisionRecord, Side, StoppingKind, StoppingRule};

/// Analytic cost and location the Monte Carlo output is compared with.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    #[serde(rename = "Hbar0")]
    pub hbar0: f64,
    pub lambda0: Point,
    pub eps0: f64,
}

impl Prediction {
    /// `(Hbar0, lambda0)` of the system's convex pair. For interacting systems
    /// this builds the full landscape, validating every standing assumption.
    pub fn for_system(system: &SystemSpec) -> Result<(Prediction, ConvexPair)> {
        let (x1, x2) = (&system.x_init.0, &system.x_init.1);
        let pair = match &system.variant {
            SystemVariant::LinearPair { psi1, psi2 } => {
                ConvexPair::new(psi1.clone(), psi2.clone(), x1, x2)?
            }
            SystemVariant::LinearizedPair {
                potential,
                alpha,
                anchors,
            } => {
                let psi = |a: &Point| EffectivePotential::new(potential.clone(), *alpha, a.clone());
                ConvexPair::new(psi(&anchors.0)?, psi(&anchors.1)?, x1, x2)?
            }
            SystemVariant::CohortPair {
                potential, alpha, ..
            }
            | SystemVariant::ParticlePair {
                potential, alpha, ..
            } => {
                let l = Landscape::new(
                    potential.clone(),
                    InteractionSpec { alpha: *alpha },
                    (x1.clone(), x2.clone()),
                )?;
                return Ok((
                    Prediction {
                        hbar0: l.hbar0,
                        lambda0: l.lambda0.clone(),
                        eps0: l.eps0,
                    },
                    l.pair(),
                ));
            }
        };
        let (z0, h) = pair.prediction()?;
        Ok((
            Prediction {
                hbar0: h,
                lambda0: z0,
                eps0: pair.eps0,
            },
            pair,
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub system: SystemSpec,
    /// Strictly descending, all positive.
    pub sigma_grid: Vec<f64>,
    /// Collision radius; `0` selects the exact one-dimensional rule.
    pub epsilon: f64,
    pub replicates: usize,
    pub delta_window: f64,
    pub base_seed: u64,
    pub dt: f64,
    /// Fixed time cap; `None` uses `10 exp(2(Hbar0 + 0.3)/sigma^2)` within the step budget.
    pub t_max: Option<f64>,
    pub bootstrap: usize,
}

/// Execution knobs that do not change results.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub threads: usize,
    /// Keep every `thin`-th state of each replicate (0 = off).
    pub thin: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            threads: 1,
            thin: 0,
        }
    }
}

pub const MIN_REPLICATES: usize = 20;
pub const DEFAULT_BOOTSTRAP: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub sigma: f64,
    pub t_max: f64,
    pub n_uncensored: usize,
    pub n_censored: usize,
    pub mean_time: Option<f64>,
    pub mean_log_time: Option<f64>,
    pub location_median: Option<Point>,
    pub location_mad: Option<f64>,
    pub median_dist_lambda0: Option<f64>,
    /// Share with `max(|x - lambda0|, |y - lambda0|) <= delta_window`.
    pub within_delta: Option<f64>,
    pub window_fraction: Option<f64>,
    /// Fewer than half the replicates finished; left out of the fit.
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub arrhenius: Option<ArrheniusFit>,
    pub prediction: Prediction,
    pub delta_window: f64,
    pub rule: StoppingRule,
    /// Median midpoint distance to `lambda0` does not grow as sigma decreases.
    pub location_trend_nonincreasing: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub result: SweepResult,
    /// Records per sigma, ordered by replicate.
    pub records: Vec<Vec<CollisionRecord>>,
    /// `(sigma index, replicate, rows)` when thinning is on.
    pub trajectories: Vec<(usize, u64, Vec<TrajectoryRow>)>,
}

pub fn default_t_max(hbar0: f64, sigma: f64, dt: f64) -> f64 {
    let t = 10.0 * (2.0 * (hbar0 + 0.3) / (sigma * sigma)).exp();
    let cap = STEP_BUDGET as f64 * dt;
    if t.is_finite() {
        t.min(cap).max(dt)
    } else {
        cap
    }
}

pub(crate) fn thread_pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::config(format!("cannot build thread pool: {e}")))
}

/// Runs `f` over all jobs on `threads` workers, keeping job order and
/// reporting the first error in that order.
pub(crate) fn ordered_map<J: Sync, T: Send>(
    threads: usize,
    jobs: &[J],
    f: impl Fn(&J) -> Result<T> + Sync + Send,
) -> Result<Vec<T>> {
    let pool = thread_pool(threads)?;
    let out: Vec<Result<T>> = pool.install(|| jobs.par_iter().map(&f).collect());
    out.into_iter().collect()
}

fn check_grid(sigma_grid: &[f64], replicates: usize) -> Result<()> {
    if sigma_grid.is_empty() {
        return Err(Error::config("sigma grid is empty"));
    }
    if sigma_grid.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
        return Err(Error::config("every sigma must be positive"));
    }
    if sigma_grid.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(Error::config("sigma grid must be strictly descending"));
    }
    if replicates < MIN_REPLICATES {
        return Err(Error::config(format!(
            "at least {MIN_REPLICATES} replicates are needed, got {replicates}"
        )));
    }
    Ok(())
}

struct Plan<'a> {
    system: &'a SystemSpec,
    rule: StoppingRule,
    prediction: Prediction,
    sigma_grid: &'a [f64],
    replicates: usize,
    dt: f64,
    t_max: Option<f64>,
    delta: f64,
    base_seed: u64,
    bootstrap: usize,
}

fn execute(plan: Plan<'_>, opts: RunOptions) -> Result<SweepOutput> {
    let d = plan.system.dim();
    let t_caps: Vec<f64> = plan
        .sigma_grid
        .iter()
        .map(|&s| {
            plan.t_max
                .unwrap_or_else(|| default_t_max(plan.prediction.hbar0, s, plan.dt))
        })
        .collect();
    let jobs: Vec<(usize, u64)> = (0..plan.sigma_grid.len())
        .flat_map(|i| (0..plan.replicates as u64).map(move |r| (i, r)))
        .collect();
    let runs = ordered_map(opts.threads, &jobs, |&(i, r)| {
        let cfg = SimConfig {
            dt: plan.dt,
            t_max: t_caps[i],
            sigma: plan.sigma_grid[i],
            seed: plan.base_seed,
            dimension: d,
        };
        run_until(
            plan.system,
            &cfg,
            &plan.rule,
            ReplicateKey::new(plan.base_seed, i as u64, r),
            opts.thin,
        )
    })?;

    let mut records: Vec<Vec<CollisionRecord>> =
        vec![Vec::with_capacity(plan.replicates); plan.sigma_grid.len()];
    let mut trajectories = Vec::new();
    for (&(i, r), (rec, summary)) in jobs.iter().zip(runs) {
        records[i].push(rec);
        if opts.thin > 0 {
            trajectories.push((i, r, summary.trajectory));
        }
    }

    let lambda0 = &plan.prediction.lambda0;
    let mut rows = Vec::with_capacity(plan.sigma_grid.len());
    let mut fit_sigmas = Vec::new();
    let mut fit_times = Vec::new();
    for (i, &sigma) in plan.sigma_grid.iter().enumerate() {
        let recs = &records[i];
        let times: Vec<f64> = recs
            .iter()
            .filter(|r| !r.censored)
            .map(|r| r.time)
            .collect();
        let n_unc = times.len();
        let loc = location_report(recs, lambda0, &[plan.delta]);
        let flagged = 2 * n_unc < plan.replicates;
        let mean_time = (n_unc > 0).then(|| times.iter().sum::<f64>() / n_unc as f64);
        let mean_log_time = (n_unc > 0)
            .then(|| times.iter().map(|t| t.max(plan.dt).ln()).sum::<f64>() / n_unc as f64);
        if !flagged && mean_time.is_some_and(|m| m > 0.0) {
            fit_sigmas.push(sigma);
            fit_times.push(times.clone());
        }
        rows.push(SweepRow {
            sigma,
            t_max: t_caps[i],
            n_uncensored: n_unc,
            n_censored: recs.len() - n_unc,
            mean_time,
            mean_log_time,
            location_median: loc.as_ref().map(|l| l.median_midpoint.clone()),
            location_mad: loc.as_ref().map(|l| l.mad_distance),
            median_dist_lambda0: loc.as_ref().map(|l| l.median_distance),
            within_delta: loc.as_ref().map(|l| l.within[0].1),
            window_fraction: window_fraction(&times, plan.prediction.hbar0, sigma, plan.delta),
            flagged,
        });
    }
    if rows.iter().all(|r| r.n_uncensored == 0) {
        return Err(Error::AllCensored(
            "no replicate finished before t_max; use larger sigma or a longer t_max".into(),
        ));
    }
    let arrhenius = arrhenius_fit(&fit_sigmas, &fit_times, plan.bootstrap, plan.base_seed);
    let dists: Vec<f64> = rows.iter().filter_map(|r| r.median_dist_lambda0).collect();
    let location_trend_nonincreasing = dists.windows(2).all(|w| w[1] <= w[0]);
    Ok(SweepOutput {
        result: SweepResult {
            rows,
            arrhenius,
            prediction: plan.prediction,
            delta_window: plan.delta,
            rule: plan.rule,
            location_trend_nonincreasing,
        },
        records,
        trajectories,
    })
}

/// Collision sweep: exact one-dimensional rule when `epsilon = 0`, otherwise
/// the `2 epsilon` proximity rule with `epsilon` certified below `eps_c`.
pub fn run_sweep(cfg: &SweepConfig, opts: RunOptions) -> Result<SweepOutput> {
    check_grid(&cfg.sigma_grid, cfg.replicates)?;
    cfg.system.validate(None)?;
    let (prediction, pair) = Prediction::for_system(&cfg.system)?;
    let kind = if cfg.epsilon == 0.0 {
        StoppingKind::ExactCollision1D
    } else {
        if !(cfg.epsilon > 0.0 && cfg.epsilon < prediction.eps0) {
            return Err(Error::assumption(
                Assumption::CollisionRadius,
                format!("eps = {}, eps0 = {}", cfg.epsilon, prediction.eps0),
            ));
        }
        let cert = &eps_c_table(&pair, &[cfg.epsilon])?[0];
        if !cert.certified {
            return Err(Error::assumption(
                Assumption::CollisionRadius,
                format!(
                    "eps = {} is not certified below eps_c (m1 = {:.4}, m2 = {:.4}, inf h_eps = {:.4})",
                    cfg.epsilon, cert.m1, cert.m2, cert.inf_h_eps
                ),
            ));
        }
        StoppingKind::EpsCollision { eps: cfg.epsilon }
    };
    let rule = StoppingRule::single(kind);
    rule.validate(
        cfg.system.dim(),
        (&cfg.system.x_init.0, &cfg.system.x_init.1),
        Some(prediction.eps0),
    )?;
    execute(
        Plan {
            system: &cfg.system,
            rule,
            prediction,
            sigma_grid: &cfg.sigma_grid,
            replicates: cfg.replicates,
            dt: cfg.dt,
            t_max: cfg.t_max,
            delta: cfg.delta_window,
            base_seed: cfg.base_seed,
            bootstrap: cfg.bootstrap,
        },
        opts,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExitCheckConfig {
    pub psi: EffectivePotential,
    pub radius: f64,
    pub sigma_grid: Vec<f64>,
    pub replicates: usize,
    pub dt: f64,
    pub t_max: Option<f64>,
    pub base_seed: u64,
    pub delta_window: f64,
    pub bootstrap: usize,
}

/// Exit of a single diffusion in `psi` from the ball of `radius` around its
/// minimum; predicted cost is the sphere infimum of `psi`.
pub fn single_exit_check(cfg: &ExitCheckConfig, opts: RunOptions) -> Result<SweepOutput> {
    check_grid(&cfg.sigma_grid, cfg.replicates)?;
    if !(cfg.radius > 0.0) {
        return Err(Error::config("exit radius must be positive"));
    }
    let well = descend_to_minimum(&cfg.psi, &cfg.psi.anchor)?
        .ok_or_else(|| Error::numeric("no strict minimum of the exit potential"))?;
    let exit = sphere_infimum(&cfg.psi, &well, &well, cfg.radius)?;
    let system = SystemSpec {
        variant: SystemVariant::LinearPair {
            psi1: cfg.psi.clone(),
            psi2: cfg.psi.clone(),
        },
        x_init: (well.clone(), well.clone()),
    };
    let rule = StoppingRule::single(StoppingKind::BallExit {
        center: well,
        radius: cfg.radius,
        side: Side::X,
    });
    execute(
        Plan {
            system: &system,
            rule,
            prediction: Prediction {
                hbar0: exit.value,
                lambda0: exit.argmin,
                eps0: f64::INFINITY,
            },
            sigma_grid: &cfg.sigma_grid,
            replicates: cfg.replicates,
            dt: cfg.dt,
            t_max: cfg.t_max,
            delta: cfg.delta_window,
            base_seed: cfg.base_seed,
            bootstrap: cfg.bootstrap,
        },
        opts,
    )
}
