//! Coupling of the interacting tagged particle with its linearized copy, and
//! confinement of the empirical means near the wells.

use serde::Serialize;

use super::ordered_map;
use crate::dynamics::{
    couple_linearized, empirical_mean_track, SimConfig, SystemSpec, SystemVariant,
};
use crate::error::{Error, Result};
use crate::landscape::Landscape;
use crate::noise::ReplicateKey;
use crate::potentials::InteractionSpec;

fn landscape_of(system: &SystemSpec) -> Result<Landscape> {
    match &system.variant {
        SystemVariant::CohortPair {
            potential, alpha, ..
        }
        | SystemVariant::ParticlePair {
            potential, alpha, ..
        } => Landscape::new(
            potential.clone(),
            InteractionSpec { alpha: *alpha },
            system.x_init.clone(),
        ),
        _ => Err(Error::config(
            "this experiment needs a cohort or particle system",
        )),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingConfig {
    pub system: SystemSpec,
    pub sigma: f64,
    pub dt: f64,
    pub xi: f64,
    pub t_starts: Vec<f64>,
    pub horizon: f64,
    pub seeds: usize,
    pub base_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingRow {
    pub t_start: f64,
    /// Share of seeds with `max(sup_x, sup_y) > xi`.
    pub exceedance: f64,
    pub mean_sup: f64,
    pub max_sup: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingReport {
    pub xi: f64,
    pub sigma: f64,
    pub rows: Vec<CouplingRow>,
    /// Exceedance does not grow along increasing `T_start`.
    pub nonincreasing: bool,
}

/// Exceedance frequencies of the linearized coupling for each `T_start`.
/// Seed `i` uses replicate key `(base_seed, 0, i)`.
pub fn coupling_experiment(cfg: &CouplingConfig, threads: usize) -> Result<CouplingReport> {
    if cfg.seeds == 0 {
        return Err(Error::config("coupling needs at least one seed"));
    }
    if !(cfg.xi > 0.0) {
        return Err(Error::config("coupling threshold xi must be positive"));
    }
    if cfg.t_starts.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::config("T_start grid must be strictly increasing"));
    }
    let land = landscape_of(&cfg.system)?;
    let sim = SimConfig {
        dt: cfg.dt,
        t_max: cfg.horizon,
        sigma: cfg.sigma,
        seed: cfg.base_seed,
        dimension: cfg.system.dim(),
    };
    let seeds: Vec<u64> = (0..cfg.seeds as u64).collect();
    let anchors = (land.wells.0.as_slice(), land.wells.1.as_slice());
    let samples = ordered_map(threads, &seeds, |&s| {
        couple_linearized(
            &cfg.system,
            &sim,
            anchors,
            &cfg.t_starts,
            cfg.horizon,
            ReplicateKey::new(cfg.base_seed, 0, s),
        )
    })?;
    let rows: Vec<CouplingRow> = cfg
        .t_starts
        .iter()
        .enumerate()
        .map(|(j, &t_start)| {
            let sups: Vec<f64> = samples.iter().map(|s| s[j].sup_x.max(s[j].sup_y)).collect();
            let over = sups.iter().filter(|v| **v > cfg.xi).count();
            CouplingRow {
                t_start,
                exceedance: over as f64 / sups.len() as f64,
                mean_sup: sups.iter().sum::<f64>() / sups.len() as f64,
                max_sup: sups.iter().copied().fold(0.0, f64::max),
            }
        })
        .collect();
    let nonincreasing = rows.windows(2).all(|w| w[1].exceedance <= w[0].exceedance);
    Ok(CouplingReport {
        xi: cfg.xi,
        sigma: cfg.sigma,
        rows,
        nonincreasing,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfinementConfig {
    pub system: SystemSpec,
    pub sigma: f64,
    pub dt: f64,
    pub horizon: f64,
    /// Deviations before this time are ignored (transient from `x_init`).
    pub burn_in: f64,
    pub kappa: f64,
    pub seeds: usize,
    pub base_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfinementReport {
    pub kappa: f64,
    /// Share of seeds whose maximal mean deviation stays within `kappa`.
    pub fraction_within: f64,
    pub max_deviations: Vec<f64>,
}

/// Maximal distance of the side means from the wells over `[burn_in, horizon]`.
pub fn confinement_experiment(
    cfg: &ConfinementConfig,
    threads: usize,
) -> Result<ConfinementReport> {
    if cfg.seeds == 0 {
        return Err(Error::config("confinement needs at least one seed"));
    }
    let land = landscape_of(&cfg.system)?;
    let sim = SimConfig {
        dt: cfg.dt,
        t_max: cfg.horizon,
        sigma: cfg.sigma,
        seed: cfg.base_seed,
        dimension: cfg.system.dim(),
    };
    let seeds: Vec<u64> = (0..cfg.seeds as u64).collect();
    let anchors = (land.wells.0.as_slice(), land.wells.1.as_slice());
    let every = u64::MAX;
    let max_deviations = ordered_map(threads, &seeds, |&s| {
        empirical_mean_track(
            &cfg.system,
            &sim,
            anchors,
            cfg.horizon,
            every,
            cfg.burn_in,
            ReplicateKey::new(cfg.base_seed, 0, s),
        )
        .map(|t| t.max_deviation)
    })?;
    let within = max_deviations.iter().filter(|m| **m <= cfg.kappa).count();
    Ok(ConfinementReport {
        kappa: cfg.kappa,
        fraction_within: within as f64 / max_deviations.len() as f64,
        max_deviations,
    })
}
