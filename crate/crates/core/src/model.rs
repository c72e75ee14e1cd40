//! Shared domain types: typed dependency graphs, antipattern instances,
//! lineage and centrality tables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Kind of a type declaration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TypeKind {
    Class,
    Interface,
    #[serde(rename = "enum")]
    EnumType,
}

impl TypeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TypeKind::Class => "class",
            TypeKind::Interface => "interface",
            TypeKind::EnumType => "enum",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "class" => Some(TypeKind::Class),
            "interface" => Some(TypeKind::Interface),
            "enum" => Some(TypeKind::EnumType),
            _ => None,
        }
    }
}

/// A type vertex of a dependency graph.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TypeNode {
    pub name: String,
    pub kind: TypeKind,
    pub is_abstract: bool,
}

impl TypeNode {
    pub fn new(name: impl Into<String>, kind: TypeKind, is_abstract: bool) -> Self {
        Self {
            name: name.into(),
            kind,
            is_abstract,
        }
    }

    pub fn class(name: impl Into<String>) -> Self {
        Self::new(name, TypeKind::Class, false)
    }

    pub fn abstract_class(name: impl Into<String>) -> Self {
        Self::new(name, TypeKind::Class, true)
    }

    pub fn interface(name: impl Into<String>) -> Self {
        Self::new(name, TypeKind::Interface, true)
    }
}

/// Relationship carried by a dependency edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    Extends,
    Implements,
    Uses,
}

impl EdgeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::Extends => "extends",
            EdgeKind::Implements => "implements",
            EdgeKind::Uses => "uses",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "extends" => Some(EdgeKind::Extends),
            "implements" => Some(EdgeKind::Implements),
            "uses" => Some(EdgeKind::Uses),
            _ => None,
        }
    }

    /// Extends and implements edges form the subtype relation.
    pub fn is_inheritance(self) -> bool {
        matches!(self, EdgeKind::Extends | EdgeKind::Implements)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DependencyEdge {
    pub source: String,
    pub target: String,
    pub kind: EdgeKind,
}

impl DependencyEdge {
    pub fn new(source: impl Into<String>, target: impl Into<String>, kind: EdgeKind) -> Self {
        Self {
            source: source.into(),
            target: target.into(),
            kind,
        }
    }
}

/// One version's typed dependency graph.
///
/// Nodes are kept sorted by name and edges sorted by `(source, target, kind)`,
/// so node index order is byte-lexicographic name order. Construction does
/// not validate; see [`crate::ingest::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VersionGraph {
    version_id: String,
    ordinal: usize,
    nodes: Vec<TypeNode>,
    edges: Vec<DependencyEdge>,
}

impl VersionGraph {
    pub fn new(
        version_id: impl Into<String>,
        ordinal: usize,
        mut nodes: Vec<TypeNode>,
        mut edges: Vec<DependencyEdge>,
    ) -> Self {
        nodes.sort_by(|a, b| a.name.cmp(&b.name));
        edges.sort();
        Self {
            version_id: version_id.into(),
            ordinal,
            nodes,
            edges,
        }
    }

    pub fn version_id(&self) -> &str {
        &self.version_id
    }

    pub fn ordinal(&self) -> usize {
        self.ordinal
    }

    pub fn nodes(&self) -> &[TypeNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[DependencyEdge] {
        &self.edges
    }

    pub fn node(&self, name: &str) -> Option<&TypeNode> {
        self.nodes
            .binary_search_by(|n| n.name.as_str().cmp(name))
            .ok()
            .map(|i| &self.nodes[i])
    }

    pub fn contains(&self, name: &str) -> bool {
        self.node(name).is_some()
    }

    pub fn node_names(&self) -> impl Iterator<Item = &str> {
        self.nodes.iter().map(|n| n.name.as_str())
    }
}

/// Ordered release sequence of one project.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectHistory {
    project_name: String,
    versions: Vec<VersionGraph>,
}

impl ProjectHistory {
    pub fn new(project_name: impl Into<String>, versions: Vec<VersionGraph>) -> Result<Self, ModelError> {
        let mut seen = BTreeSet::new();
        for (i, v) in versions.iter().enumerate() {
            if v.ordinal != i {
                return Err(ModelError::OrdinalGap {
                    version_id: v.version_id.clone(),
                    expected: i,
                    found: v.ordinal,
                });
            }
            if !seen.insert(v.version_id.as_str()) {
                return Err(ModelError::DuplicateVersion(v.version_id.clone()));
            }
        }
        Ok(Self {
            project_name: project_name.into(),
            versions,
        })
    }

    pub fn project_name(&self) -> &str {
        &self.project_name
    }

    pub fn versions(&self) -> &[VersionGraph] {
        &self.versions
    }

    pub fn version(&self, id: &str) -> Option<&VersionGraph> {
        self.versions.iter().find(|v| v.version_id == id)
    }

    pub fn version_ids(&self) -> Vec<&str> {
        self.versions.iter().map(|v| v.version_id.as_str()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AntipatternKind {
    Cycle,
    Stk,
}

impl AntipatternKind {
    pub const ALL: [AntipatternKind; 2] = [AntipatternKind::Cycle, AntipatternKind::Stk];

    pub fn as_str(self) -> &'static str {
        match self {
            AntipatternKind::Cycle => "cycle",
            AntipatternKind::Stk => "stk",
        }
    }
}

impl fmt::Display for AntipatternKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StkRoles {
    pub supertype: String,
    pub subtype: String,
}

/// A detected cycle or subtype-knowledge occurrence with per-member severity.
///
/// Members are exactly the keys of `severity`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AntipatternInstance {
    id: String,
    kind: AntipatternKind,
    version_id: String,
    members: BTreeSet<String>,
    severity: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stk_roles: Option<StkRoles>,
}

impl AntipatternInstance {
    /// Builds an instance with an empty id; ids are assigned by
    /// [`assign_instance_ids`] once a version's list is complete.
    pub fn new(
        kind: AntipatternKind,
        version_id: impl Into<String>,
        severity: BTreeMap<String, f64>,
        stk_roles: Option<StkRoles>,
    ) -> Result<Self, ModelError> {
        let version_id = version_id.into();
        for (name, &s) in &severity {
            if !(0.0..=1.0).contains(&s) {
                return Err(ModelError::SeverityOutOfRange {
                    member: name.clone(),
                    value: s,
                });
            }
        }
        match (kind, &stk_roles) {
            (AntipatternKind::Cycle, Some(_)) => {
                return Err(ModelError::Instance("cycle instance carries stk roles".into()))
            }
            (AntipatternKind::Cycle, None) if severity.len() < 2 => {
                return Err(ModelError::Instance(format!(
                    "cycle instance needs at least 2 members, got {}",
                    severity.len()
                )))
            }
            (AntipatternKind::Stk, None) => return Err(ModelError::Instance("stk instance without roles".into())),
            (AntipatternKind::Stk, Some(roles)) => {
                if severity.get(&roles.supertype) != Some(&1.0) {
                    return Err(ModelError::Instance(format!(
                        "stk supertype {} must have severity 1.0",
                        roles.supertype
                    )));
                }
                if severity.get(&roles.subtype) != Some(&0.0) {
                    return Err(ModelError::Instance(format!(
                        "stk subtype {} must have severity 0.0",
                        roles.subtype
                    )));
                }
            }
            _ => {}
        }
        let members = severity.keys().cloned().collect();
        Ok(Self {
            id: String::new(),
            kind,
            version_id,
            members,
            severity,
            stk_roles,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn kind(&self) -> AntipatternKind {
        self.kind
    }

    pub fn version_id(&self) -> &str {
        &self.version_id
    }

    pub fn members(&self) -> &BTreeSet<String> {
        &self.members
    }

    pub fn severity(&self) -> &BTreeMap<String, f64> {
        &self.severity
    }

    pub fn stk_roles(&self) -> Option<&StkRoles> {
        self.stk_roles.as_ref()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    fn smallest_member(&self) -> &str {
        self.members.iter().next().map(String::as_str).unwrap_or("")
    }
}

/// Sorts a version's instances of one kind by (size desc, smallest member)
/// and assigns ids `{kind}-{version_id}-{k}`.
///
/// Remaining ties are broken by the full member list and then the STK roles,
/// so the order is total.
pub fn assign_instance_ids(instances: &mut [AntipatternInstance]) {
    instances.sort_by(|a, b| {
        b.len()
            .cmp(&a.len())
            .then_with(|| a.smallest_member().cmp(b.smallest_member()))
            .then_with(|| a.members.iter().cmp(b.members.iter()))
            .then_with(|| {
                let key =
                    |i: &AntipatternInstance| i.stk_roles.as_ref().map(|r| (r.supertype.clone(), r.subtype.clone()));
                key(a).cmp(&key(b))
            })
    });
    for (k, inst) in instances.iter_mut().enumerate() {
        inst.id = format!("{}-{}-{}", inst.kind, inst.version_id, k);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineageLabel {
    Continued,
    SplitBranch,
    MergeBranch,
}

impl LineageLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            LineageLabel::Continued => "continued",
            LineageLabel::SplitBranch => "split_branch",
            LineageLabel::MergeBranch => "merge_branch",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineageEdge {
    pub predecessor: String,
    pub successor: String,
    pub label: LineageLabel,
    /// Set when a split branch is simultaneously a merge branch.
    #[serde(default)]
    pub also_merge: bool,
    pub intersection_size: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalMark {
    Alive,
    TypesRemoved,
    Dissolved,
}

impl TerminalMark {
    pub fn as_str(self) -> &'static str {
        match self {
            TerminalMark::Alive => "alive",
            TerminalMark::TypesRemoved => "types_removed",
            TerminalMark::Dissolved => "dissolved",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineageGraph {
    pub nodes: Vec<String>,
    pub edges: Vec<LineageEdge>,
    pub terminal_marks: BTreeMap<String, TerminalMark>,
}

impl LineageGraph {
    pub fn predecessors<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a LineageEdge> + 'a {
        self.edges.iter().filter(move |e| e.successor == id)
    }

    pub fn successors<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a LineageEdge> + 'a {
        self.edges.iter().filter(move |e| e.predecessor == id)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralityTable {
    pub version_id: String,
    pub raw: BTreeMap<String, f64>,
    pub normalized: BTreeMap<String, f64>,
}

/// Package segments of a qualified type name (everything but the last segment).
pub fn package_path(qualified_name: &str) -> Result<Vec<&str>, ModelError> {
    let segments: Vec<&str> = qualified_name.split('.').collect();
    if segments.iter().any(|s| s.is_empty()) {
        return Err(ModelError::MalformedName(qualified_name.to_string()));
    }
    Ok(segments[..segments.len() - 1].to_vec())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Overlap {
    pub intersection_size: usize,
    pub matched: bool,
}

/// Member overlap under the at-least-half rule, in either direction.
///
/// `2·|a∩b| ≥ |a|` or `2·|a∩b| ≥ |b|`, i.e. the ceiling of half on integers.
pub fn instance_overlap(a: &BTreeSet<String>, b: &BTreeSet<String>) -> Overlap {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let intersection_size = small.iter().filter(|m| large.contains(*m)).count();
    let matched = intersection_size > 0 && (2 * intersection_size >= a.len() || 2 * intersection_size >= b.len());
    Overlap {
        intersection_size,
        matched,
    }
}
