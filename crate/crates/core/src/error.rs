use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("malformed qualified name {0:?}")]
    MalformedName(String),
    #[error("version {version_id}: expected ordinal {expected}, found {found}")]
    OrdinalGap {
        version_id: String,
        expected: usize,
        found: usize,
    },
    #[error("duplicate version id {0:?}")]
    DuplicateVersion(String),
    #[error("severity {value} of {member} outside [0,1]")]
    SeverityOutOfRange { member: String, value: f64 },
    #[error("invalid antipattern instance: {0}")]
    Instance(String),
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed document {path}: {source}")]
    Malformed {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("version {version_id}: {message}")]
    Invalid { version_id: String, message: String },
    #[error("manifest: {0}")]
    Manifest(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Pipeline bug: an internal contract between modules was broken.
#[derive(Debug, Error)]
#[error("internal error: {0}")]
pub struct InternalError(pub String);

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("export refused: {0}")]
    Inconsistent(String),
    #[error("non-finite value in field {0}")]
    NonFinite(String),
    #[error("scene serialization failed: {0}")]
    Serialize(#[from] serde_json::Error),
}

#[derive(Debug, Error)]
pub enum LayoutError {
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("no disk for entity {0}")]
    MissingDisk(String),
}
