//! Serialization of configurations: a canonical JSON document and a
//! MEKA/WEKA-style nested command string, both parseable back.

mod json;
mod meka;

pub use json::{from_json, to_json, to_json_value};
pub use meka::{from_meka_command, to_meka_command};

/// Schema version of the JSON document.
pub const JSON_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CodecError {
    #[error("schema error at {path}: {reason}")]
    Schema { path: String, reason: String },
    #[error("configuration has hard violations: {0}")]
    InvalidConfiguration(String),
    #[error("command parse error: {0}")]
    Command(String),
}

impl CodecError {
    pub(crate) fn schema(path: impl Into<String>, reason: impl Into<String>) -> Self {
        CodecError::Schema {
            path: path.into(),
            reason: reason.into(),
        }
    }
}
