//! Command-line surface of the collision-time toolkit: TOML configuration,
//! subcommands, CSV/JSON artifacts and their schema checks.

pub mod config;
pub mod manifest;
pub mod output;
pub mod run;
pub mod schema;

use serde_json::{json, Value};

pub use schema::SchemaError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] collide::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Schema(#[from] SchemaError),
}

impl CliError {
    /// 2 config or assumption, 3 numeric, 4 all censored, 1 I/O or schema.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) => match e {
                collide::Error::Config(_) | collide::Error::Assumption { .. } => 2,
                collide::Error::Numeric { .. } | collide::Error::BlowUp { .. } => 3,
                collide::Error::AllCensored(_) => 4,
            },
            CliError::Io { .. } | CliError::Schema(_) => 1,
        }
    }

    pub fn to_json(&self) -> Value {
        let (kind, assumption) = match self {
            CliError::Core(collide::Error::Assumption { assumption, .. }) => {
                ("assumption", Some(assumption.code()))
            }
            CliError::Core(e) => (e.kind(), None),
            CliError::Io { .. } => ("io", None),
            CliError::Schema(_) => ("schema", None),
        };
        json!({
            "error": {
                "kind": kind,
                "assumption": assumption,
                "message": self.to_string(),
                "exit_code": self.exit_code(),
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use collide::Assumption;

    #[test]
    fn exit_codes() {
        let code = |e: collide::Error| CliError::from(e).exit_code();
        assert_eq!(code(collide::Error::config("x")), 2);
        assert_eq!(code(collide::Error::assumption(Assumption::Growth, "x")), 2);
        assert_eq!(code(collide::Error::numeric("x")), 3);
        assert_eq!(
            code(collide::Error::BlowUp {
                time: 1.0,
                side: 0,
                particle: 0
            }),
            3
        );
        assert_eq!(code(collide::Error::AllCensored("x".into())), 4);
    }

    #[test]
    fn error_json_names_the_assumption() {
        let e = CliError::from(collide::Error::assumption(
            Assumption::Synchronization,
            "alpha = 1",
        ));
        let v = e.to_json();
        assert_eq!(v["error"]["kind"], "assumption");
        assert_eq!(v["error"]["assumption"], "A(iii)");
        assert_eq!(v["error"]["exit_code"], 2);
    }
}
