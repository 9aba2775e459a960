//! Subcommand bodies.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use collide::kramers::{
    confinement_experiment, coupling_experiment, run_sweep, single_exit_check, ConfinementReport,
    CouplingReport, RunOptions, SweepOutput, SweepResult,
};
use collide::landscape::{eps_c_table, minimize_h_eps};
use collide::{Error, Point};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Config, Model};
use crate::manifest::{now, RunManifest};
use crate::output::{self, MANIFEST, RECORDS, REPORT, SWEEP, TRAJECTORIES};
use crate::schema;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Landscape,
    Sweep,
    Couple,
    ExitCheck,
    Validate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Landscape => "landscape",
            Command::Sweep => "sweep",
            Command::Couple => "couple",
            Command::ExitCheck => "exit-check",
            Command::Validate => "validate",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Invocation {
    pub command: Command,
    pub config: PathBuf,
    pub seed: Option<u64>,
    pub threads: usize,
    pub out_dir: PathBuf,
    pub thin: u64,
    pub dry_run: bool,
}

pub fn load(path: &Path) -> Result<Config, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::config(format!("cannot read config {}: {e}", path.display())))?;
    Ok(Config::parse(&text)?)
}

#[derive(Serialize)]
struct SweepReport<'a> {
    report: &'static str,
    base_seed: u64,
    result: &'a SweepResult,
}

#[derive(Serialize)]
struct HEpsRow {
    epsilon: f64,
    inf_h_eps: f64,
    minimizers: Vec<Point>,
    m1: f64,
    m2: f64,
    certified: bool,
}

#[derive(Serialize)]
struct LandscapeReport {
    report: &'static str,
    wells: (Point, Point),
    theta: Option<f64>,
    eps0: f64,
    lambda0: Point,
    #[serde(rename = "Hbar0")]
    hbar0: f64,
    /// Largest certified radius of the grid; `null` without a grid.
    eps_c: Option<f64>,
    h_eps: Vec<HEpsRow>,
}

#[derive(Serialize)]
struct CoupleReport {
    report: &'static str,
    base_seed: u64,
    coupling: Option<CouplingReport>,
    confinement: Option<ConfinementReport>,
}

fn landscape_report(cfg: &Config) -> Result<LandscapeReport, CliError> {
    let (Some(model), Some(pred), Some(pair)) = (&cfg.model, &cfg.prediction, cfg.pair()) else {
        return Err(Error::config("the landscape subcommand needs a [system] table").into());
    };
    let grid = cfg
        .raw
        .landscape
        .as_ref()
        .map(|l| l.eps_grid.clone())
        .unwrap_or_default();
    let mut rows = Vec::new();
    if !grid.is_empty() {
        for cert in eps_c_table(&pair, &grid)? {
            let set = minimize_h_eps(&pair, cert.epsilon, 8, 0)?;
            rows.push(HEpsRow {
                epsilon: cert.epsilon,
                inf_h_eps: cert.inf_h_eps,
                minimizers: set.points,
                m1: cert.m1,
                m2: cert.m2,
                certified: cert.certified,
            });
        }
    }
    let eps_c = (!grid.is_empty()).then(|| {
        rows.iter()
            .take_while(|r| r.certified)
            .last()
            .map_or(0.0, |r| r.epsilon)
    });
    let (wells, theta) = match model {
        Model::Interacting(l) => (l.wells.clone(), Some(l.theta)),
        Model::Pair(p) => ((p.well1.clone(), p.well2.clone()), None),
    };
    Ok(LandscapeReport {
        report: "landscape",
        wells,
        theta,
        eps0: pred.eps0,
        lambda0: pred.lambda0.clone(),
        hbar0: pred.hbar0,
        eps_c,
        h_eps: rows,
    })
}

/// Summary printed by `validate`.
pub fn validation_summary(cfg: &Config) -> Value {
    let sections: Vec<&str> = [
        ("potential", cfg.raw.potential.is_some()),
        ("interaction", cfg.raw.interaction.is_some()),
        ("system", cfg.raw.system.is_some()),
        ("sweep", cfg.raw.sweep.is_some()),
        ("couple", cfg.raw.couple.is_some()),
        ("confine", cfg.raw.confine.is_some()),
        ("exit_check", cfg.raw.exit_check.is_some()),
        ("landscape", cfg.raw.landscape.is_some()),
    ]
    .into_iter()
    .filter_map(|(name, on)| on.then_some(name))
    .collect();
    let theta = match &cfg.model {
        Some(Model::Interacting(l)) => Some(l.theta),
        _ => None,
    };
    json!({
        "status": "ok",
        "sections": sections,
        "theta": theta,
        "prediction": cfg.prediction,
        "config": cfg.echo(),
    })
}

fn check_outputs(files: &[PathBuf]) -> Result<(), CliError> {
    for f in files {
        let text = fs::read_to_string(f).map_err(|source| CliError::Io {
            path: f.display().to_string(),
            source,
        })?;
        let name = f.file_name().and_then(|n| n.to_str()).unwrap_or_default();
        match name {
            REPORT => schema::check_report_json(&text)?,
            SWEEP => {
                schema::check_sweep_csv(&text)?;
            }
            RECORDS => {
                schema::check_records_csv(&text)?;
            }
            TRAJECTORIES => {
                schema::check_trajectories_csv(&text)?;
            }
            _ => {}
        }
    }
    Ok(())
}

fn sweep_files(
    dir: &Path,
    kind: &'static str,
    seed: u64,
    out: &SweepOutput,
    d: usize,
) -> Result<Vec<PathBuf>, CliError> {
    let report = SweepReport {
        report: kind,
        base_seed: seed,
        result: &out.result,
    };
    output::write_sweep(dir, &report, out, d)
}

/// Runs one subcommand; returns the JSON printed on stdout.
pub fn execute(inv: &Invocation) -> Result<Value, CliError> {
    let started = now();
    let mut cfg = load(&inv.config)?;
    if let Some(seed) = inv.seed {
        cfg = cfg.with_seed(seed);
    }
    if inv.command == Command::Validate {
        return Ok(validation_summary(&cfg));
    }
    let opts = RunOptions {
        threads: inv.threads.max(1),
        thin: inv.thin,
    };
    // Section checks happen before any output is touched.
    match inv.command {
        Command::Sweep => {
            cfg.sweep_config()?;
        }
        Command::ExitCheck => {
            cfg.exit_check_config()?;
        }
        Command::Couple => {
            if cfg.raw.couple.is_none() && cfg.raw.confine.is_none() {
                return Err(Error::config(
                    "the couple subcommand needs a [couple] or [confine] table",
                )
                .into());
            }
        }
        Command::Landscape | Command::Validate => {}
    }
    fs::create_dir_all(&inv.out_dir).map_err(|source| CliError::Io {
        path: inv.out_dir.display().to_string(),
        source,
    })?;
    let mut manifest = RunManifest {
        tool: "collide".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        subcommand: inv.command.name().into(),
        config_path: inv.config.display().to_string(),
        config: cfg.echo(),
        base_seed: cfg.seed(),
        threads: opts.threads,
        thin: opts.thin,
        dry_run: inv.dry_run,
        started,
        finished: String::new(),
        outputs: BTreeMap::new(),
    };
    let dir = inv.out_dir.as_path();
    let files = if inv.dry_run {
        Vec::new()
    } else {
        match inv.command {
            Command::Landscape => {
                let p = dir.join(REPORT);
                output::write_json(&p, &landscape_report(&cfg)?)?;
                vec![p]
            }
            Command::Sweep => {
                let sc = cfg.sweep_config()?;
                let out = run_sweep(&sc, opts)?;
                sweep_files(dir, "sweep", cfg.seed(), &out, sc.system.dim())?
            }
            Command::ExitCheck => {
                let ec = cfg.exit_check_config()?;
                let out = single_exit_check(&ec, opts)?;
                sweep_files(dir, "exit_check", cfg.seed(), &out, ec.psi.base.dimension)?
            }
            Command::Couple => {
                let coupling = cfg
                    .coupling_config()?
                    .map(|c| coupling_experiment(&c, opts.threads))
                    .transpose()?;
                let confinement = cfg
                    .confinement_config()?
                    .map(|c| confinement_experiment(&c, opts.threads))
                    .transpose()?;
                let p = dir.join(REPORT);
                output::write_json(
                    &p,
                    &CoupleReport {
                        report: "couple",
                        base_seed: cfg.seed(),
                        coupling,
                        confinement,
                    },
                )?;
                vec![p]
            }
            Command::Validate => unreachable!(),
        }
    };
    check_outputs(&files)?;
    for f in &files {
        manifest.record(f)?;
    }
    manifest.finished = now();
    let mpath = dir.join(MANIFEST);
    output::write_json(&mpath, &manifest)?;
    Ok(json!({
        "status": "ok",
        "subcommand": inv.command.name(),
        "out_dir": dir.display().to_string(),
        "outputs": manifest.outputs,
        "manifest": mpath.display().to_string(),
    }))
}
