use std::fmt;

/// Standing assumptions on the potential, the interaction and the initial data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Assumption {
    /// Smooth, polynomially growing potential, uniformly convex at infinity.
    Growth,
    /// Exactly two strict local minima.
    TwoWells,
    /// Synchronization: `alpha > -theta`.
    Synchronization,
    /// Initial points lie in the basins of distinct wells.
    DistinctBasins,
    /// Collision radius strictly inside `(0, eps0)`.
    CollisionRadius,
}

impl Assumption {
    pub fn code(self) -> &'static str {
        match self {
            Assumption::Growth => "A(i)",
            Assumption::TwoWells => "A(ii)",
            Assumption::Synchronization => "A(iii)",
            Assumption::DistinctBasins => "A(iv)",
            Assumption::CollisionRadius => "eps<eps0",
        }
    }
}

impl fmt::Display for Assumption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self {
            Assumption::Growth => "potential must grow polynomially and be convex at infinity",
            Assumption::TwoWells => "potential must have exactly two strict local minima",
            Assumption::Synchronization => "interaction strength must satisfy alpha > -theta",
            Assumption::DistinctBasins => "initial points must lie in the basins of distinct wells",
            Assumption::CollisionRadius => "collision radius must lie in (0, eps0)",
        };
        write!(f, "{} ({})", self.code(), what)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("assumption {assumption} violated: {detail}")]
    Assumption {
        assumption: Assumption,
        detail: String,
    },

    #[error("numeric failure: {detail}")]
    Numeric { detail: String },

    #[error("blow-up at t={time} (side {side}, particle {particle}); reduce dt")]
    BlowUp {
        time: f64,
        side: usize,
        particle: usize,
    },

    #[error("every replicate was censored: {0}")]
    AllCensored(String),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn assumption(assumption: Assumption, detail: impl Into<String>) -> Self {
        Error::Assumption {
            assumption,
            detail: detail.into(),
        }
    }

    pub fn numeric(detail: impl Into<String>) -> Self {
        Error::Numeric {
            detail: detail.into(),
        }
    }

    /// Short machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Config(_) => "config",
            Error::Assumption { .. } => "assumption",
            Error::Numeric { .. } => "numeric",
            Error::BlowUp { .. } => "blow_up",
            Error::AllCensored(_) => "all_censored",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
