use std::fmt;

use serde::Serialize;

pub const EXIT_COMPUTE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliError {
    pub kind: String,
    pub message: String,
    #[serde(skip)]
    pub exit_code: i32,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            kind: "usage".into(),
            message: message.into(),
            exit_code: EXIT_USAGE,
        }
    }

    pub fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        Self {
            kind: "io".into(),
            message: format!("{}: {err}", path.display()),
            exit_code: EXIT_COMPUTE,
        }
    }

    pub fn compute(kind: &str, message: impl Into<String>) -> Self {
        Self {
            kind: kind.into(),
            message: message.into(),
            exit_code: EXIT_COMPUTE,
        }
    }

    /// `{"error": {"kind": ..., "message": ...}}` for stderr.
    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": { "kind": self.kind, "message": self.message } }).to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl From<kppf_core::Error> for CliError {
    fn from(e: kppf_core::Error) -> Self {
        use kppf_core::Error as E;
        let exit_code = match e {
            E::InvalidParameter { .. } | E::Domain { .. } => EXIT_USAGE,
            _ => EXIT_COMPUTE,
        };
        Self {
            kind: e.kind().into(),
            message: e.to_string(),
            exit_code,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
