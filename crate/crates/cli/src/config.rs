//! TOML experiment configuration.
//!
//! The raw tables mirror the file one to one and reject unknown keys;
//! [`Config::parse`] fills defaults and validates every standing assumption
//! before anything is simulated.

use collide::dynamics::{SystemSpec, SystemVariant};
use collide::kramers::{
    ConfinementConfig, CouplingConfig, ExitCheckConfig, Prediction, SweepConfig, DEFAULT_BOOTSTRAP,
    MIN_REPLICATES,
};
use collide::landscape::{eps_c_table, ConvexPair, Landscape};
use collide::potentials::{EffectivePotential, InteractionSpec, PotentialKind, PotentialSpec};
use collide::{Assumption, Error, Point};
use serde::{Deserialize, Serialize};

pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_DELTA: f64 = 0.15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPotential {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawInteraction {
    pub alpha: f64,
}

/// `Psi = V + alpha/2 |x - anchor|^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPsi {
    pub potential: RawPotential,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSystem {
    /// `linear`, `linearized`, `cohort` or `particle`.
    pub variant: String,
    pub x1: Point,
    pub x2: Point,
    /// Particles per side, or the cohort size.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchors: Option<(Point, Point)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi1: Option<RawPsi>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi2: Option<RawPsi>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSim {
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
}

impl Default for RawSim {
    fn default() -> Self {
        RawSim {
            dt: DEFAULT_DT,
            seed: 0,
            t_max: None,
        }
    }
}

fn default_dt() -> f64 {
    DEFAULT_DT
}

fn default_delta() -> f64 {
    DEFAULT_DELTA
}

fn default_bootstrap() -> usize {
    DEFAULT_BOOTSTRAP
}

fn default_replicates() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSweep {
    pub sigma_grid: Vec<f64>,
    /// `0` selects the exact one-dimensional collision.
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default = "default_delta")]
    pub delta_window: f64,
    #[serde(default = "default_bootstrap")]
    pub bootstrap: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCouple {
    pub sigma: f64,
    pub xi: f64,
    pub t_starts: Vec<f64>,
    pub horizon: f64,
    pub seeds: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfine {
    pub sigma: f64,
    pub horizon: f64,
    #[serde(default = "default_burn_in")]
    pub burn_in: f64,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    pub seeds: usize,
}

fn default_burn_in() -> f64 {
    10.0
}

fn default_kappa() -> f64 {
    0.2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawExitCheck {
    pub psi: RawPsi,
    pub radius: f64,
    pub sigma_grid: Vec<f64>,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default = "default_delta")]
    pub delta_window: f64,
    #[serde(default = "default_bootstrap")]
    pub bootstrap: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawLandscape {
    #[serde(default)]
    pub eps_grid: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<RawPotential>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interaction: Option<RawInteraction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<RawSystem>,
    #[serde(default)]
    pub sim: RawSim,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<RawSweep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub couple: Option<RawCouple>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confine: Option<RawConfine>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exit_check: Option<RawExitCheck>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub landscape: Option<RawLandscape>,
}

fn forbid<T>(field: &Option<T>, name: &str, kind: &str) -> Result<(), Error> {
    if field.is_some() {
        return Err(Error::config(format!(
            "`{name}` does not apply to potential kind `{kind}`"
        )));
    }
    Ok(())
}

fn need<T: Clone>(field: &Option<T>, name: &str, kind: &str) -> Result<T, Error> {
    field
        .clone()
        .ok_or_else(|| Error::config(format!("potential kind `{kind}` needs `{name}`")))
}

impl RawPotential {
    pub fn resolve(&self) -> Result<PotentialSpec, Error> {
        let k = self.kind.as_str();
        let (kind, dim) = match k {
            "quadratic" => {
                forbid(&self.beta, "beta", k)?;
                forbid(&self.coefficients, "coefficients", k)?;
                let center = need(&self.center, "center", k)?;
                let d = center.len();
                (
                    PotentialKind::Quadratic {
                        gamma: need(&self.gamma, "gamma", k)?,
                        center,
                    },
                    d,
                )
            }
            "symmetric_double_well" => {
                forbid(&self.gamma, "gamma", k)?;
                forbid(&self.center, "center", k)?;
                forbid(&self.coefficients, "coefficients", k)?;
                (
                    PotentialKind::SymmetricDoubleWell {
                        beta: self.beta.unwrap_or(1.0),
                    },
                    self.dimension.unwrap_or(1),
                )
            }
            "asymmetric_double_well" => {
                forbid(&self.gamma, "gamma", k)?;
                forbid(&self.center, "center", k)?;
                forbid(&self.beta, "beta", k)?;
                forbid(&self.coefficients, "coefficients", k)?;
                (
                    PotentialKind::AsymmetricDoubleWell,
                    self.dimension.unwrap_or(1),
                )
            }
            "polynomial" => {
                forbid(&self.gamma, "gamma", k)?;
                forbid(&self.center, "center", k)?;
                forbid(&self.beta, "beta", k)?;
                let coefficients = need(&self.coefficients, "coefficients", k)?;
                let d = coefficients.len();
                (PotentialKind::Polynomial { coefficients }, d)
            }
            other => {
                return Err(Error::config(format!(
                    "unknown potential kind `{other}` (expected quadratic, symmetric_double_well, \
                     asymmetric_double_well or polynomial)"
                )))
            }
        };
        if let Some(d) = self.dimension {
            if d != dim {
                return Err(Error::config(format!(
                    "`dimension = {d}` disagrees with the parameters ({dim})"
                )));
            }
        }
        PotentialSpec::new(kind, dim)
    }
}

impl RawPotential {
    /// Writes the defaulted parameters back so the echo is explicit.
    fn normalize(&mut self) -> Result<PotentialSpec, Error> {
        let spec = self.resolve()?;
        self.dimension = Some(spec.dimension);
        if let PotentialKind::SymmetricDoubleWell { beta } = spec.kind {
            self.beta = Some(beta);
        }
        Ok(spec)
    }
}

impl RawPsi {
    /// The anchor defaults to the origin.
    pub fn resolve(&self) -> Result<EffectivePotential, Error> {
        let base = self.potential.resolve()?;
        let anchor = self
            .anchor
            .clone()
            .unwrap_or_else(|| vec![0.0; base.dimension]);
        EffectivePotential::new(base, self.alpha, anchor)
    }
}

/// What a config describes once validated.
#[derive(Debug, Clone)]
pub enum Model {
    /// Double-well potential with interaction.
    Interacting(Box<Landscape>),
    /// Independent convex pair.
    Pair(Box<ConvexPair>),
}

#[derive(Debug, Clone)]
pub struct Config {
    /// Raw tables with every default filled in.
    pub raw: RawConfig,
    pub system: Option<SystemSpec>,
    pub model: Option<Model>,
    pub prediction: Option<Prediction>,
}

fn parse_err(e: toml::de::Error) -> Error {
    Error::config(format!("invalid config: {}", e.message()))
}

impl Config {
    pub fn parse(text: &str) -> Result<Config, Error> {
        let raw: RawConfig = toml::from_str(text).map_err(parse_err)?;
        Config::from_raw(raw)
    }

    /// Resolved configuration as TOML; parses back to the same config.
    pub fn echo(&self) -> String {
        toml::to_string(&self.raw).expect("resolved config serializes")
    }

    pub fn from_raw(mut raw: RawConfig) -> Result<Config, Error> {
        if let Some(p) = raw.potential.as_mut() {
            p.normalize()?;
        }
        if let Some(s) = raw.system.as_mut() {
            for psi in [s.psi1.as_mut(), s.psi2.as_mut()].into_iter().flatten() {
                psi.potential.normalize()?;
            }
        }
        if let Some(e) = raw.exit_check.as_mut() {
            e.psi.potential.normalize()?;
        }
        if !(raw.sim.dt > 0.0 && raw.sim.dt.is_finite()) {
            return Err(Error::config("sim.dt must be positive"));
        }
        if let Some(t) = raw.sim.t_max {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::config("sim.t_max must be positive"));
            }
        }
        let (system, model) = match &raw.system {
            Some(s) => {
                let (system, model) = build_system(&raw, s)?;
                (Some(system), Some(model))
            }
            None => (None, None),
        };
        if let Some(SystemVariant::LinearizedPair { anchors, .. }) =
            system.as_ref().map(|s| &s.variant)
        {
            raw.system.as_mut().unwrap().anchors = Some(anchors.clone());
        }
        let prediction = match &system {
            Some(s) => Some(Prediction::for_system(s)?.0),
            None => None,
        };
        let cfg = Config {
            raw,
            system,
            model,
            prediction,
        };
        cfg.check_sections()?;
        Ok(cfg)
    }

    fn need_system(&self, section: &str) -> Result<&SystemSpec, Error> {
        self.system
            .as_ref()
            .ok_or_else(|| Error::config(format!("[{section}] needs a [system] table")))
    }

    pub fn pair(&self) -> Option<ConvexPair> {
        match self.model.as_ref()? {
            Model::Interacting(l) => Some(l.pair()),
            Model::Pair(p) => Some((**p).clone()),
        }
    }

    fn check_sections(&self) -> Result<(), Error> {
        if let Some(sw) = &self.raw.sweep {
            self.need_system("sweep")?;
            check_sigmas(&sw.sigma_grid, sw.replicates)?;
            self.check_epsilon(sw.epsilon)?;
        }
        if let Some(c) = &self.raw.couple {
            self.need_interacting("couple")?;
            if !(c.sigma > 0.0 && c.xi > 0.0 && c.horizon > 0.0 && c.seeds > 0) {
                return Err(Error::config(
                    "[couple] needs positive sigma, xi, horizon and seeds",
                ));
            }
            if c.t_starts.is_empty() || c.t_starts.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(Error::config(
                    "couple.t_starts must be non-empty and strictly increasing",
                ));
            }
        }
        if let Some(c) = &self.raw.confine {
            self.need_interacting("confine")?;
            if !(c.sigma >= 0.0
                && c.horizon > 0.0
                && c.kappa > 0.0
                && c.seeds > 0
                && c.burn_in >= 0.0)
            {
                return Err(Error::config(
                    "[confine] needs sigma >= 0 and positive horizon, kappa and seeds",
                ));
            }
        }
        if let Some(e) = &self.raw.exit_check {
            e.psi.resolve()?;
            check_sigmas(&e.sigma_grid, e.replicates)?;
            if !(e.radius > 0.0) {
                return Err(Error::config("exit_check.radius must be positive"));
            }
        }
        if let Some(l) = &self.raw.landscape {
            if self.model.is_none() {
                return Err(Error::config("[landscape] needs a [system] table"));
            }
            if l.eps_grid.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(Error::config(
                    "landscape.eps_grid must be strictly ascending",
                ));
            }
            for &eps in &l.eps_grid {
                self.check_radius(eps)?;
            }
        }
        Ok(())
    }

    fn need_interacting(&self, section: &str) -> Result<(), Error> {
        match self.need_system(section)?.variant {
            SystemVariant::CohortPair { .. } | SystemVariant::ParticlePair { .. } => Ok(()),
            _ => Err(Error::config(format!(
                "[{section}] needs a cohort or particle system"
            ))),
        }
    }

    fn check_radius(&self, eps: f64) -> Result<(), Error> {
        let eps0 = self.prediction.as_ref().map_or(f64::INFINITY, |p| p.eps0);
        if !(eps > 0.0 && eps < eps0) {
            return Err(Error::assumption(
                Assumption::CollisionRadius,
                format!("eps = {eps} must lie in (0, eps0) with eps0 = {eps0}"),
            ));
        }
        Ok(())
    }

    /// A positive radius must stay below `eps0` and be certified below `eps_c`.
    pub fn check_epsilon(&self, eps: f64) -> Result<(), Error> {
        if eps == 0.0 {
            if self.system.as_ref().is_some_and(|s| s.dim() != 1) {
                return Err(Error::config(
                    "epsilon = 0 (exact collision) needs a one-dimensional system",
                ));
            }
            return Ok(());
        }
        self.check_radius(eps)?;
        let pair = self.pair().expect("system is present");
        let cert = &eps_c_table(&pair, &[eps])?[0];
        if !cert.certified {
            return Err(Error::assumption(
                Assumption::CollisionRadius,
                format!("eps = {eps} is not certified below eps_c"),
            ));
        }
        Ok(())
    }

    pub fn seed(&self) -> u64 {
        self.raw.sim.seed
    }

    pub fn with_seed(mut self, seed: u64) -> Config {
        self.raw.sim.seed = seed;
        self
    }

    pub fn sweep_config(&self) -> Result<SweepConfig, Error> {
        let sw = self
            .raw
            .sweep
            .as_ref()
            .ok_or_else(|| Error::config("the sweep subcommand needs a [sweep] table"))?;
        Ok(SweepConfig {
            system: self.need_system("sweep")?.clone(),
            sigma_grid: sw.sigma_grid.clone(),
            epsilon: sw.epsilon,
            replicates: sw.replicates,
            delta_window: sw.delta_window,
            base_seed: self.raw.sim.seed,
            dt: self.raw.sim.dt,
            t_max: self.raw.sim.t_max,
            bootstrap: sw.bootstrap,
        })
    }

    pub fn coupling_config(&self) -> Result<Option<CouplingConfig>, Error> {
        let Some(c) = &self.raw.couple else {
            return Ok(None);
        };
        Ok(Some(CouplingConfig {
            system: self.need_system("couple")?.clone(),
            sigma: c.sigma,
            dt: self.raw.sim.dt,
            xi: c.xi,
            t_starts: c.t_starts.clone(),
            horizon: c.horizon,
            seeds: c.seeds,
            base_seed: self.raw.sim.seed,
        }))
    }

    pub fn confinement_config(&self) -> Result<Option<ConfinementConfig>, Error> {
        let Some(c) = &self.raw.confine else {
            return Ok(None);
        };
        Ok(Some(ConfinementConfig {
            system: self.need_system("confine")?.clone(),
            sigma: c.sigma,
            dt: self.raw.sim.dt,
            horizon: c.horizon,
            burn_in: c.burn_in,
            kappa: c.kappa,
            seeds: c.seeds,
            base_seed: self.raw.sim.seed,
        }))
    }

    pub fn exit_check_config(&self) -> Result<ExitCheckConfig, Error> {
        let e = self.raw.exit_check.as_ref().ok_or_else(|| {
            Error::config("the exit-check subcommand needs an [exit_check] table")
        })?;
        Ok(ExitCheckConfig {
            psi: e.psi.resolve()?,
            radius: e.radius,
            sigma_grid: e.sigma_grid.clone(),
            replicates: e.replicates,
            dt: self.raw.sim.dt,
            t_max: self.raw.sim.t_max,
            base_seed: self.raw.sim.seed,
            delta_window: e.delta_window,
            bootstrap: e.bootstrap,
        })
    }
}

fn check_sigmas(grid: &[f64], replicates: usize) -> Result<(), Error> {
    if grid.is_empty() || grid.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
        return Err(Error::config(
            "sigma_grid must be a non-empty list of positive values",
        ));
    }
    if grid.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(Error::config("sigma_grid must be strictly descending"));
    }
    if replicates < MIN_REPLICATES {
        return Err(Error::config(format!(
            "replicates must be at least {MIN_REPLICATES}"
        )));
    }
    Ok(())
}

fn build_system(raw: &RawConfig, s: &RawSystem) -> Result<(SystemSpec, Model), Error> {
    let x_init = (s.x1.clone(), s.x2.clone());
    if s.x1.len() != s.x2.len() {
        return Err(Error::config("system.x1 and system.x2 differ in length"));
    }
    let landscape = || -> Result<Landscape, Error> {
        let potential = raw
            .potential
            .as_ref()
            .ok_or_else(|| {
                Error::config(format!(
                    "system variant `{}` needs a [potential] table",
                    s.variant
                ))
            })?
            .resolve()?;
        let alpha = raw
            .interaction
            .as_ref()
            .ok_or_else(|| {
                Error::config(format!(
                    "system variant `{}` needs an [interaction] table",
                    s.variant
                ))
            })?
            .alpha;
        Landscape::new(potential, InteractionSpec { alpha }, x_init.clone())
    };
    let no = |field: bool, name: &str| -> Result<(), Error> {
        if field {
            return Err(Error::config(format!(
                "system.{name} does not apply to variant `{}`",
                s.variant
            )));
        }
        Ok(())
    };
    let count = |default_ok: bool| -> Result<usize, Error> {
        match s.n {
            Some(n) if n >= 2 => Ok(n),
            Some(n) => Err(Error::config(format!(
                "system.n must be at least 2, got {n}"
            ))),
            None if default_ok => Ok(0),
            None => Err(Error::config(format!(
                "system variant `{}` needs `n`",
                s.variant
            ))),
        }
    };
    match s.variant.as_str() {
        "linear" => {
            no(s.n.is_some(), "n")?;
            no(s.anchors.is_some(), "anchors")?;
            let (Some(p1), Some(p2)) = (&s.psi1, &s.psi2) else {
                return Err(Error::config(
                    "system variant `linear` needs [system.psi1] and [system.psi2]",
                ));
            };
            let (psi1, psi2) = (p1.resolve()?, p2.resolve()?);
            let pair = ConvexPair::new(psi1.clone(), psi2.clone(), &s.x1, &s.x2)?;
            let spec = SystemSpec {
                variant: SystemVariant::LinearPair { psi1, psi2 },
                x_init,
            };
            spec.validate(None)?;
            Ok((spec, Model::Pair(Box::new(pair))))
        }
        "linearized" | "cohort" | "particle" => {
            no(s.psi1.is_some() || s.psi2.is_some(), "psi1/psi2")?;
            let l = landscape()?;
            let potential = l.potential.clone();
            let alpha = l.alpha();
            let variant = match s.variant.as_str() {
                "linearized" => {
                    no(s.n.is_some(), "n")?;
                    let anchors = s.anchors.clone().unwrap_or_else(|| l.wells.clone());
                    SystemVariant::LinearizedPair {
                        potential,
                        alpha,
                        anchors,
                    }
                }
                "cohort" => {
                    no(s.anchors.is_some(), "anchors")?;
                    SystemVariant::CohortPair {
                        potential,
                        alpha,
                        n_cohort: count(false)?,
                    }
                }
                _ => {
                    no(s.anchors.is_some(), "anchors")?;
                    SystemVariant::ParticlePair {
                        potential,
                        alpha,
                        n: count(false)?,
                    }
                }
            };
            let spec = SystemSpec { variant, x_init };
            spec.validate(Some(l.theta))?;
            Ok((spec, Model::Interacting(Box::new(l))))
        }
        other => Err(Error::config(format!(
            "unknown system variant `{other}` (expected linear, linearized, cohort or particle)"
        ))),
    }
}
