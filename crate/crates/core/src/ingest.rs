//! Multi-version graph interchange format.
//!
//! A manifest lists the versions of a project in release order, each pointing
//! at a graph document:
//!
//! ```json
//! {"project": "demo", "versions": [{"id": "1.0", "graph": "v1.json"}]}
//! ```
//!
//! ```json
//! {"types": [{"name": "org.a.A", "kind": "class", "abstract": false}],
//!  "edges": [{"from": "org.a.A", "to": "org.a.B", "kind": "uses"}]}
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::IngestError;
use crate::model::{package_path, DependencyEdge, EdgeKind, ProjectHistory, TypeKind, TypeNode, VersionGraph};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestDocument {
    pub project: String,
    pub versions: Vec<ManifestVersion>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestVersion {
    pub id: String,
    pub graph: PathBuf,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDocument {
    #[serde(default)]
    pub types: Vec<TypeEntry>,
    #[serde(default)]
    pub edges: Vec<EdgeEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeEntry {
    pub name: String,
    pub kind: String,
    #[serde(rename = "abstract", default, skip_serializing_if = "Option::is_none")]
    pub is_abstract: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeEntry {
    pub from: String,
    pub to: String,
    pub kind: String,
}

/// Counts of edges normalized away while parsing one graph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseStats {
    pub dropped_self_edges: usize,
    pub duplicate_edges: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VersionDiagnostics {
    pub version_id: String,
    #[serde(flatten)]
    pub stats: ParseStats,
}

/// A validated history plus per-version ingest diagnostics.
#[derive(Debug, Clone)]
pub struct LoadedProject {
    pub history: ProjectHistory,
    pub diagnostics: Vec<VersionDiagnostics>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationCode {
    EmptyName,
    MalformedName,
    DuplicateType,
    DanglingEndpoint,
    SelfEdge,
    DuplicateEdge,
    KindMismatch,
    InterfaceAbstract,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::EmptyName => "empty-name",
            ViolationCode::MalformedName => "malformed-name",
            ViolationCode::DuplicateType => "duplicate-type",
            ViolationCode::DanglingEndpoint => "dangling-endpoint",
            ViolationCode::SelfEdge => "self-edge",
            ViolationCode::DuplicateEdge => "duplicate-edge",
            ViolationCode::KindMismatch => "kind-mismatch",
            ViolationCode::InterfaceAbstract => "interface-abstract",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub names: Vec<String>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.code.as_str(), self.message)
    }
}

fn inheritance_allowed(edge: EdgeKind, source: TypeKind, target: TypeKind) -> bool {
    use TypeKind::*;
    match edge {
        EdgeKind::Extends => matches!((source, target), (Class, Class) | (Interface, Interface)),
        EdgeKind::Implements => matches!((source, target), (Class, Interface) | (EnumType, Interface)),
        EdgeKind::Uses => true,
    }
}

/// Checks every `VersionGraph` invariant. An empty list means the graph is valid.
pub fn validate(graph: &VersionGraph) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut kinds: BTreeMap<&str, TypeKind> = BTreeMap::new();
    for node in graph.nodes() {
        if node.name.is_empty() {
            out.push(Violation {
                code: ViolationCode::EmptyName,
                names: vec![],
                message: "type with empty name".into(),
            });
            continue;
        }
        if package_path(&node.name).is_err() {
            out.push(Violation {
                code: ViolationCode::MalformedName,
                names: vec![node.name.clone()],
                message: format!("malformed qualified name {:?}", node.name),
            });
        }
        if kinds.insert(&node.name, node.kind).is_some() {
            out.push(Violation {
                code: ViolationCode::DuplicateType,
                names: vec![node.name.clone()],
                message: format!("type {} declared more than once", node.name),
            });
        }
        if node.kind == TypeKind::Interface && !node.is_abstract {
            out.push(Violation {
                code: ViolationCode::InterfaceAbstract,
                names: vec![node.name.clone()],
                message: format!("interface {} must be abstract", node.name),
            });
        }
    }

    let mut seen: BTreeSet<(&str, &str, EdgeKind)> = BTreeSet::new();
    for e in graph.edges() {
        let names = vec![e.source.clone(), e.target.clone()];
        for endpoint in [&e.source, &e.target] {
            if !kinds.contains_key(endpoint.as_str()) {
                out.push(Violation {
                    code: ViolationCode::DanglingEndpoint,
                    names: names.clone(),
                    message: format!(
                        "dangling endpoint {} in {} -{}-> {}",
                        endpoint,
                        e.source,
                        e.kind.as_str(),
                        e.target
                    ),
                });
            }
        }
        if e.source == e.target {
            out.push(Violation {
                code: ViolationCode::SelfEdge,
                names: names.clone(),
                message: format!("self edge {} -{}-> {}", e.source, e.kind.as_str(), e.target),
            });
        }
        if !seen.insert((&e.source, &e.target, e.kind)) {
            out.push(Violation {
                code: ViolationCode::DuplicateEdge,
                names: names.clone(),
                message: format!("duplicate edge {} -{}-> {}", e.source, e.kind.as_str(), e.target),
            });
        }
        if let (Some(&sk), Some(&tk)) = (kinds.get(e.source.as_str()), kinds.get(e.target.as_str())) {
            if !inheritance_allowed(e.kind, sk, tk) {
                out.push(Violation {
                    code: ViolationCode::KindMismatch,
                    names,
                    message: format!(
                        "{} {} cannot {} {} {}",
                        sk.as_str(),
                        e.source,
                        e.kind.as_str(),
                        tk.as_str(),
                        e.target
                    ),
                });
            }
        }
    }
    out
}

fn invalid(version_id: &str, message: impl Into<String>) -> IngestError {
    IngestError::Invalid {
        version_id: version_id.to_string(),
        message: message.into(),
    }
}

/// Normalizes a graph document into a validated `VersionGraph`.
///
/// Self-edges of kind `uses` are dropped and duplicate edges collapsed; both
/// are counted in the returned stats.
pub fn parse_graph(
    document: &GraphDocument,
    version_id: &str,
    ordinal: usize,
) -> Result<(VersionGraph, ParseStats), IngestError> {
    let mut nodes = Vec::with_capacity(document.types.len());
    for t in &document.types {
        let kind = TypeKind::parse(&t.kind)
            .ok_or_else(|| invalid(version_id, format!("unknown type kind {:?} for {}", t.kind, t.name)))?;
        let is_abstract = t.is_abstract.unwrap_or(kind == TypeKind::Interface);
        nodes.push(TypeNode::new(t.name.clone(), kind, is_abstract));
    }
    let declared: BTreeSet<&str> = document.types.iter().map(|t| t.name.as_str()).collect();

    let mut stats = ParseStats::default();
    let mut edges = BTreeSet::new();
    for e in &document.edges {
        let kind = EdgeKind::parse(&e.kind).ok_or_else(|| {
            invalid(
                version_id,
                format!("unknown edge kind {:?} in {} -> {}", e.kind, e.from, e.to),
            )
        })?;
        for endpoint in [&e.from, &e.to] {
            if !declared.contains(endpoint.as_str()) {
                return Err(invalid(
                    version_id,
                    format!("dangling endpoint {} in {} -{}-> {}", endpoint, e.from, e.kind, e.to),
                ));
            }
        }
        if e.from == e.to {
            if kind == EdgeKind::Uses {
                stats.dropped_self_edges += 1;
                continue;
            }
            return Err(invalid(
                version_id,
                format!("illegal self edge {} -{}-> {}", e.from, e.kind, e.to),
            ));
        }
        if !edges.insert(DependencyEdge::new(e.from.clone(), e.to.clone(), kind)) {
            stats.duplicate_edges += 1;
        }
    }

    let graph = VersionGraph::new(version_id, ordinal, nodes, edges.into_iter().collect());
    let violations = validate(&graph);
    if let Some(first) = violations.first() {
        let detail: Vec<String> = violations.iter().map(ToString::to_string).collect();
        log::debug!("version {version_id}: {} violations", violations.len());
        return Err(invalid(
            version_id,
            if violations.len() == 1 {
                first.to_string()
            } else {
                detail.join("; ")
            },
        ));
    }
    Ok((graph, stats))
}

/// Inverse of [`parse_graph`] for valid graphs.
pub fn serialize_graph(graph: &VersionGraph) -> GraphDocument {
    GraphDocument {
        types: graph
            .nodes()
            .iter()
            .map(|n| TypeEntry {
                name: n.name.clone(),
                kind: n.kind.as_str().to_string(),
                is_abstract: Some(n.is_abstract),
            })
            .collect(),
        edges: graph
            .edges()
            .iter()
            .map(|e| EdgeEntry {
                from: e.source.clone(),
                to: e.target.clone(),
                kind: e.kind.as_str().to_string(),
            })
            .collect(),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, IngestError> {
    let bytes = fs::read(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_slice(&bytes).map_err(|source| IngestError::Malformed {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a manifest and every graph it references, in parallel.
pub fn load_manifest(path: &Path) -> Result<LoadedProject, IngestError> {
    let manifest: ManifestDocument = read_json(path)?;
    if manifest.versions.is_empty() {
        return Err(IngestError::Manifest(format!("{} lists no versions", path.display())));
    }
    let mut ids = BTreeSet::new();
    for v in &manifest.versions {
        if !ids.insert(v.id.as_str()) {
            return Err(IngestError::Manifest(format!("duplicate version id {:?}", v.id)));
        }
    }
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let parsed: Vec<(VersionGraph, ParseStats)> = manifest
        .versions
        .par_iter()
        .enumerate()
        .map(|(ordinal, v)| {
            let doc: GraphDocument = read_json(&base.join(&v.graph))?;
            parse_graph(&doc, &v.id, ordinal)
        })
        .collect::<Result<_, _>>()?;

    let mut diagnostics = Vec::with_capacity(parsed.len());
    let mut versions = Vec::with_capacity(parsed.len());
    for (g, stats) in parsed {
        diagnostics.push(VersionDiagnostics {
            version_id: g.version_id().to_string(),
            stats,
        });
        versions.push(g);
    }
    let history = ProjectHistory::new(manifest.project, versions)?;
    Ok(LoadedProject { history, diagnostics })
}

/// Writes a history as a manifest plus one graph file per version into `dir`.
pub fn write_history(history: &ProjectHistory, dir: &Path) -> std::io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let mut versions = Vec::new();
    for g in history.versions() {
        let file = PathBuf::from(format!("graph-{:03}.json", g.ordinal()));
        let doc = serialize_graph(g);
        fs::write(dir.join(&file), serde_json::to_vec_pretty(&doc)?)?;
        versions.push(ManifestVersion {
            id: g.version_id().to_string(),
            graph: file,
        });
    }
    let manifest = ManifestDocument {
        project: history.project_name().to_string(),
        versions,
    };
    let path = dir.join("manifest.json");
    fs::write(&path, serde_json::to_vec_pretty(&manifest)?)?;
    Ok(path)
}
