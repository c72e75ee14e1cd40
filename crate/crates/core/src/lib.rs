//! Design-erosion analysis over multi-version type dependency graphs.
//!
//! The pipeline reads a manifest of per-version graphs ([`ingest`]), detects
//! circular dependencies and subtype-knowledge instances with severity ranks
//! ([`analysis`]), links instances across versions ([`evolution`]), packs a
//! version-stable nested-disk layout ([`layout`]) and writes a scene document
//! plus reports ([`scene`]). [`pipeline`] wires the stages together.

pub mod analysis;
pub mod config;
pub mod error;
pub mod evolution;
pub mod ingest;
pub mod layout;
pub mod model;
pub mod pipeline;
pub mod scene;

pub use config::{ColorParams, FdebParams, LayoutParams, PipelineParams};
pub use error::{IngestError, InternalError, LayoutError, ModelError, SceneError};
pub use model::{
    AntipatternInstance, AntipatternKind, CentralityTable, DependencyEdge, EdgeKind, LineageGraph, ProjectHistory,
    TypeKind, TypeNode, VersionGraph,
};
