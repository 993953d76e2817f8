//! Failure taxonomy for the binary: config problems exit 1, numerical and
//! I/O problems exit 2, and every failure prints one machine-readable JSON
//! object to stderr.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed config or table text; the message carries line and key.
    #[error("{0}")]
    Parse(String),
    /// Well-formed config with inadmissible values; every violation is
    /// listed, not only the first.
    #[error("configuration invalid: {}", .0.join("; "))]
    Validation(Vec<String>),
    /// A core computation failed on a valid config.
    #[error("{0}")]
    Numerical(String),
    /// An artifact could not be read or written.
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) | CliError::Validation(_) => 1,
            CliError::Numerical(_) | CliError::Io(_) => 2,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "parse",
            CliError::Validation(_) => "validation",
            CliError::Numerical(_) => "numerical",
            CliError::Io(_) => "io",
        }
    }

    /// The stderr artifact: `{"error":{"kind":…,"message":…}}`, with a
    /// `violations` array on validation failures.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Body<'a> {
            kind: &'static str,
            message: String,
            #[serde(skip_serializing_if = "Option::is_none")]
            violations: Option<&'a [String]>,
        }
        #[derive(Serialize)]
        struct Envelope<'a> {
            error: Body<'a>,
        }
        let violations = match self {
            CliError::Validation(list) => Some(list.as_slice()),
            _ => None,
        };
        let envelope = Envelope {
            error: Body { kind: self.kind(), message: self.to_string(), violations },
        };
        serde_json::to_string(&envelope).expect("error envelope holds no non-finite numbers")
    }
}

macro_rules! numerical_from {
    ($($source:ty),* $(,)?) => {$(
        impl From<$source> for CliError {
            fn from(err: $source) -> Self {
                CliError::Numerical(err.to_string())
            }
        }
    )*};
}

numerical_from!(
    quenchlab_core::DispersionError,
    quenchlab_core::FieldError,
    quenchlab_core::QuadError,
    quenchlab_core::ObservableError,
    quenchlab_core::SteadyError,
    quenchlab_core::GologyError,
    quenchlab_core::FiniteSizeError,
);

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Io(err.to_string())
    }
}
