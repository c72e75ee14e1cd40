//! Read-only HTTP API over prebuilt scene documents.
//!
//! State is loaded and validated once at startup and never mutated, so
//! handlers share it through an `Arc` without locking.

use std::collections::BTreeMap;
use std::future::Future;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use erosion_core::model::{LineageLabel, TerminalMark};
use erosion_core::scene::{filter_layers, parse_scene, scene_to_bytes, validate_scene, SceneDocument, SceneInstance};
use erosion_core::AntipatternKind;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use tower_http::cors::{AllowOrigin, Any, CorsLayer};
use tower_http::services::ServeDir;

#[derive(Debug, Error)]
pub enum ServeError {
    #[error("scene {source_name} is not a scene document: {source}")]
    Parse {
        source_name: String,
        source: serde_json::Error,
    },
    #[error("scene {source_name} failed validation: {}", problems.join("; "))]
    Invalid { source_name: String, problems: Vec<String> },
    #[error("two scenes share the project name {0:?}")]
    DuplicateProject(String),
    #[error("invalid CORS origin {0:?}")]
    CorsOrigin(String),
}

struct LoadedScene {
    /// The scene file exactly as given; full-scene requests return it verbatim.
    raw: Bytes,
    doc: SceneDocument,
    index: BTreeMap<String, usize>,
}

/// Every served project, keyed by project name.
pub struct ServiceState {
    projects: BTreeMap<String, LoadedScene>,
}

impl ServiceState {
    /// Parses and validates every scene. `source_name` is only used in errors.
    pub fn from_scenes<I, S>(scenes: I) -> Result<Self, ServeError>
    where
        I: IntoIterator<Item = (S, Vec<u8>)>,
        S: Into<String>,
    {
        let mut projects = BTreeMap::new();
        for (source_name, bytes) in scenes {
            let source_name = source_name.into();
            let doc = parse_scene(&bytes).map_err(|source| ServeError::Parse {
                source_name: source_name.clone(),
                source,
            })?;
            let problems = validate_scene(&doc);
            if !problems.is_empty() {
                return Err(ServeError::Invalid { source_name, problems });
            }
            let name = doc.project.name.clone();
            let index = doc
                .antipatterns
                .iter()
                .enumerate()
                .map(|(i, a)| (a.id.clone(), i))
                .collect();
            let loaded = LoadedScene {
                raw: Bytes::from(bytes),
                doc,
                index,
            };
            if projects.insert(name.clone(), loaded).is_some() {
                return Err(ServeError::DuplicateProject(name));
            }
        }
        Ok(Self { projects })
    }

    pub fn project_names(&self) -> Vec<&str> {
        self.projects.keys().map(String::as_str).collect()
    }
}

#[derive(Debug, Clone, Default)]
pub struct ServeOptions {
    /// `Some("*")` allows any origin; any other value allows that origin only.
    pub cors_origin: Option<String>,
    /// Directory with the viewer's static files, served at `/`.
    pub assets: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct ErrorBody {
    error: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    valid_versions: Option<Vec<String>>,
}

fn error(status: StatusCode, message: impl Into<String>) -> Response {
    (
        status,
        Json(ErrorBody {
            error: message.into(),
            valid_versions: None,
        }),
    )
        .into_response()
}

fn json_bytes(bytes: impl Into<Bytes>) -> Response {
    (
        [(header::CONTENT_TYPE, HeaderValue::from_static("application/json"))],
        bytes.into(),
    )
        .into_response()
}

type Shared = Arc<ServiceState>;

async fn healthz() -> Json<serde_json::Value> {
    Json(serde_json::json!({ "status": "ok" }))
}

async fn projects(State(state): State<Shared>) -> Json<Vec<String>> {
    Json(state.projects.keys().cloned().collect())
}

#[derive(Debug, Deserialize)]
struct SceneQuery {
    versions: Option<String>,
}

async fn scene(State(state): State<Shared>, Path(project): Path<String>, Query(q): Query<SceneQuery>) -> Response {
    let Some(loaded) = state.projects.get(&project) else {
        return error(StatusCode::NOT_FOUND, format!("unknown project {project}"));
    };
    let Some(list) = q.versions else {
        return json_bytes(loaded.raw.clone());
    };
    let versions: Vec<String> = list.split(',').filter(|v| !v.is_empty()).map(str::to_string).collect();
    if versions.is_empty() {
        return error(StatusCode::BAD_REQUEST, "empty version filter");
    }
    match filter_layers(&loaded.doc, &versions) {
        Ok(doc) => match scene_to_bytes(&doc) {
            Ok(bytes) => json_bytes(bytes),
            Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
        },
        Err(e) => (
            StatusCode::BAD_REQUEST,
            Json(ErrorBody {
                error: format!("unknown version(s): {}", e.unknown.join(", ")),
                valid_versions: Some(e.valid),
            }),
        )
            .into_response(),
    }
}

#[derive(Debug, Serialize)]
struct InstanceSummary<'a> {
    id: &'a str,
    kind: AntipatternKind,
    version: &'a str,
    size: usize,
    terminal: Option<TerminalMark>,
}

async fn antipatterns(State(state): State<Shared>, Path(project): Path<String>) -> Response {
    let Some(loaded) = state.projects.get(&project) else {
        return error(StatusCode::NOT_FOUND, format!("unknown project {project}"));
    };
    let list: Vec<InstanceSummary> = loaded
        .doc
        .antipatterns
        .iter()
        .map(|a| InstanceSummary {
            id: &a.id,
            kind: a.kind,
            version: &a.version,
            size: a.members.len(),
            terminal: loaded.doc.lineage.terminal.get(&a.id).copied(),
        })
        .collect();
    Json(list).into_response()
}

#[derive(Debug, Serialize)]
struct Neighbor<'a> {
    id: &'a str,
    label: LineageLabel,
    also_merge: bool,
    intersection_size: usize,
}

#[derive(Debug, Serialize)]
struct InstanceDetail<'a> {
    #[serde(flatten)]
    instance: &'a SceneInstance,
    predecessors: Vec<Neighbor<'a>>,
    successors: Vec<Neighbor<'a>>,
    terminal: Option<TerminalMark>,
}

async fn antipattern(State(state): State<Shared>, Path((project, id)): Path<(String, String)>) -> Response {
    let Some(loaded) = state.projects.get(&project) else {
        return error(StatusCode::NOT_FOUND, format!("unknown project {project}"));
    };
    let Some(&i) = loaded.index.get(&id) else {
        return error(StatusCode::NOT_FOUND, format!("unknown antipattern {id}"));
    };
    let lineage = &loaded.doc.lineage;
    let detail = InstanceDetail {
        instance: &loaded.doc.antipatterns[i],
        predecessors: lineage
            .edges
            .iter()
            .filter(|e| e.successor == id)
            .map(|e| Neighbor {
                id: &e.predecessor,
                label: e.label,
                also_merge: e.also_merge,
                intersection_size: e.intersection_size,
            })
            .collect(),
        successors: lineage
            .edges
            .iter()
            .filter(|e| e.predecessor == id)
            .map(|e| Neighbor {
                id: &e.successor,
                label: e.label,
                also_merge: e.also_merge,
                intersection_size: e.intersection_size,
            })
            .collect(),
        terminal: lineage.terminal.get(&id).copied(),
    };
    Json(detail).into_response()
}

async fn not_found() -> Response {
    error(StatusCode::NOT_FOUND, "not found")
}

pub fn router(state: ServiceState, options: &ServeOptions) -> Result<Router, ServeError> {
    let api = Router::new()
        .route("/api/projects", get(projects))
        .route("/api/projects/{project}/scene", get(scene))
        .route("/api/projects/{project}/antipatterns", get(antipatterns))
        .route("/api/projects/{project}/antipatterns/{id}", get(antipattern))
        .route("/api/{*rest}", get(not_found))
        .route("/healthz", get(healthz))
        .with_state(Arc::new(state));
    let app = match &options.assets {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.fallback(not_found),
    };
    Ok(match &options.cors_origin {
        None => app,
        Some(origin) => {
            let allow = if origin == "*" {
                AllowOrigin::from(Any)
            } else {
                let value = HeaderValue::from_str(origin).map_err(|_| ServeError::CorsOrigin(origin.clone()))?;
                AllowOrigin::exact(value)
            };
            app.layer(
                CorsLayer::new()
                    .allow_origin(allow)
                    .allow_methods([axum::http::Method::GET]),
            )
        }
    })
}

/// Serves `app` on an already bound listener until `shutdown` resolves.
pub async fn serve(
    listener: tokio::net::TcpListener,
    app: Router,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    if let Ok(addr) = listener.local_addr() {
        log::info!("listening on http://{addr}");
    }
    axum::serve(listener, app).with_graceful_shutdown(shutdown).await
}
