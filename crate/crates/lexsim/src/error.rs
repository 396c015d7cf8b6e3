use std::fmt;
use std::path::PathBuf;

use serde::Serialize;
use thiserror::Error;

/// A single invalid field in a config file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    /// Dotted path from the config root, e.g. `settle.dispute.p_q`.
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid config: {}", join(.0))]
    Validation(Vec<Violation>),

    #[error(transparent)]
    Model(#[from] lexsim_core::Error),

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("sweep point {point} replicate {replicate} ({coordinates}) failed: {source}")]
    SweepPoint {
        point: usize,
        replicate: u64,
        coordinates: String,
        source: Box<HarnessError>,
    },
}

fn join(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

impl HarnessError {
    /// 1 for unreadable or invalid input, 2 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Read { .. } | HarnessError::Parse(_) | HarnessError::Validation(_) => 1,
            HarnessError::SweepPoint { source, .. } => source.exit_code(),
            HarnessError::Model(_) | HarnessError::Write { .. } => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            HarnessError::Read { .. } => "read",
            HarnessError::Parse(_) => "parse",
            HarnessError::Validation(_) => "validation",
            HarnessError::Model(_) => "model",
            HarnessError::Write { .. } => "write",
            HarnessError::SweepPoint { .. } => "sweep",
        }
    }

    /// One-line JSON diagnostic for stderr.
    pub fn to_json_line(&self) -> String {
        #[derive(Serialize)]
        struct Line<'a> {
            error: &'a str,
            message: String,
            #[serde(skip_serializing_if = "Option::is_none")]
            violations: Option<&'a [Violation]>,
        }
        let violations = match self {
            HarnessError::Validation(v) => Some(v.as_slice()),
            HarnessError::SweepPoint { source, .. } => match source.as_ref() {
                HarnessError::Validation(v) => Some(v.as_slice()),
                _ => None,
            },
            _ => None,
        };
        serde_json::to_string(&Line {
            error: self.kind(),
            message: self.to_string(),
            violations,
        })
        .expect("diagnostic serializes")
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
