use std::path::PathBuf;

use serde_json::{json, Value};
use thiserror::Error;

/// Failure of a job. The exit status is derived from the variant.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// Malformed or schema-violating input, or an unusable flag combination.
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] coulomb_core::Error),
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
/// `diff` found a differing term.
pub const EXIT_DIFFERENT: i32 = 3;

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_domain() => EXIT_DOMAIN,
            _ => EXIT_IO,
        }
    }

    /// Machine-readable form of a domain error.
    pub fn to_json(&self) -> Value {
        let mut error = json!({ "message": self.to_string() });
        let kind = match self {
            CliError::Core(e) => {
                match e {
                    coulomb_core::Error::NotProper(v) => {
                        error["verdict"] = json!(v.name());
                    }
                    coulomb_core::Error::Overflow { radius, cap } => {
                        error["radius"] = json!(radius);
                        error["cap"] = json!(cap);
                    }
                    _ => {}
                }
                e.kind()
            }
            CliError::Io { .. } => "IoError",
            CliError::Input(_) => "SchemaError",
        };
        error["kind"] = json!(kind);
        json!({ "format": "coulomb-error/1", "error": error })
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
