//! Recursive-disk geometry.
//!
//! Packages and types become nested disks. Positions are computed once on
//! the union of all versions so an entity sits at the same (x, y) in every
//! version layer; layers are stacked along z by release ordinal.

mod bundle;
mod enclose;
mod pack;

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::config::LayoutParams;
use crate::error::LayoutError;
use crate::model::{package_path, AntipatternInstance, CentralityTable, ProjectHistory, TypeKind, VersionGraph};

pub use bundle::{bundle_edges, compatibility, Bounds, FdebState};
pub use enclose::{enclosing_circle, Circle};
pub use pack::pack_disks;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntityKind {
    /// The whole project; parent of top-level packages and default-package types.
    Root,
    Package,
    Class,
    Interface,
    #[serde(rename = "enum")]
    EnumType,
}

impl EntityKind {
    pub fn is_type(self) -> bool {
        matches!(self, EntityKind::Class | EntityKind::Interface | EntityKind::EnumType)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EntityKind::Root => "root",
            EntityKind::Package => "package",
            EntityKind::Class => "class",
            EntityKind::Interface => "interface",
            EntityKind::EnumType => "enum",
        }
    }
}

impl From<TypeKind> for EntityKind {
    fn from(k: TypeKind) -> Self {
        match k {
            TypeKind::Class => EntityKind::Class,
            TypeKind::Interface => EntityKind::Interface,
            TypeKind::EnumType => EntityKind::EnumType,
        }
    }
}

/// One entity of the union over all versions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnionEntry {
    /// Qualified name for types, dotted path for packages, empty for the root.
    pub entity: String,
    pub kind: EntityKind,
    /// Index of the parent entry; `None` only for the root.
    pub parent: Option<usize>,
    pub depth: usize,
    /// Present in version `k` iff `presence[k]`.
    pub presence: Vec<bool>,
    /// Per-version normalized centrality; types only.
    pub centrality: Vec<Option<f64>>,
    pub children: Vec<usize>,
}

/// All packages and types across the history, as a tree rooted at index 0.
///
/// Children are ordered packages-first, then by name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnionModel {
    pub version_ids: Vec<String>,
    pub entries: Vec<UnionEntry>,
}

impl UnionModel {
    pub fn root(&self) -> &UnionEntry {
        &self.entries[0]
    }
}

/// Latest kind, per-version presence and per-version centrality of a type.
type TypeTrack = (TypeKind, Vec<bool>, Vec<Option<f64>>);

/// Builds the union tree. `centrality[k]` must belong to version `k`.
pub fn union_model(history: &ProjectHistory, centrality: &[CentralityTable]) -> Result<UnionModel, LayoutError> {
    let versions = history.versions();
    let n = versions.len();
    // Latest kind wins for types whose kind changed across versions.
    let mut types: BTreeMap<&str, TypeTrack> = BTreeMap::new();
    let mut packages: BTreeMap<Vec<&str>, Vec<bool>> = BTreeMap::new();
    for (k, g) in versions.iter().enumerate() {
        let table = centrality.get(k).filter(|t| t.version_id == g.version_id());
        for node in g.nodes() {
            let entry = types
                .entry(&node.name)
                .or_insert_with(|| (node.kind, vec![false; n], vec![None; n]));
            entry.0 = node.kind;
            entry.1[k] = true;
            entry.2[k] = Some(
                table
                    .and_then(|t| t.normalized.get(&node.name).copied())
                    .ok_or_else(|| {
                        LayoutError::Contract(format!("no centrality for {} in version {}", node.name, g.version_id()))
                    })?,
            );
            let path = package_path(&node.name).map_err(|e| LayoutError::Contract(e.to_string()))?;
            for depth in 1..=path.len() {
                packages.entry(path[..depth].to_vec()).or_insert_with(|| vec![false; n])[k] = true;
            }
        }
    }

    let mut entries = vec![UnionEntry {
        entity: String::new(),
        kind: EntityKind::Root,
        parent: None,
        depth: 0,
        presence: vec![true; n],
        centrality: vec![None; n],
        children: Vec::new(),
    }];
    let mut package_index: BTreeMap<Vec<&str>, usize> = BTreeMap::new();
    // BTreeMap order visits every package after its prefix.
    for (path, presence) in &packages {
        let parent = if path.len() == 1 {
            0
        } else {
            package_index[&path[..path.len() - 1]]
        };
        let idx = entries.len();
        entries.push(UnionEntry {
            entity: path.join("."),
            kind: EntityKind::Package,
            parent: Some(parent),
            depth: path.len(),
            presence: presence.clone(),
            centrality: vec![None; n],
            children: Vec::new(),
        });
        entries[parent].children.push(idx);
        package_index.insert(path.clone(), idx);
    }
    for (name, (kind, presence, cent)) in types {
        let path = package_path(name).map_err(|e| LayoutError::Contract(e.to_string()))?;
        let parent = if path.is_empty() { 0 } else { package_index[&path] };
        let idx = entries.len();
        entries.push(UnionEntry {
            entity: name.to_string(),
            kind: kind.into(),
            parent: Some(parent),
            depth: entries[parent].depth + 1,
            presence,
            centrality: cent,
            children: Vec::new(),
        });
        entries[parent].children.push(idx);
    }
    Ok(UnionModel {
        version_ids: versions.iter().map(|v| v.version_id().to_string()).collect(),
        entries,
    })
}

/// Linear area between `area_min` and `area_max`.
pub fn disk_area(normalized_centrality: f64, params: &LayoutParams) -> Result<f64, LayoutError> {
    if !(0.0..=1.0).contains(&normalized_centrality) {
        return Err(LayoutError::Contract(format!(
            "normalized centrality {normalized_centrality} outside [0,1]"
        )));
    }
    Ok(params.area_min + normalized_centrality * (params.area_max - params.area_min))
}

pub fn radius_for_area(area: f64) -> f64 {
    (area / PI).sqrt()
}

/// A packed disk in absolute scene coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub entity: String,
    pub kind: EntityKind,
    pub parent: Option<usize>,
    pub depth: usize,
    pub center: (f64, f64),
    /// Footprint reserved in every version.
    pub pack_radius: f64,
    /// Drawn radius, keyed by version id; only versions where the entity exists.
    pub render_radius: BTreeMap<String, f64>,
}

/// Packed disks, index-aligned with `UnionModel::entries`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskLayout {
    pub disks: Vec<Disk>,
    type_index: BTreeMap<String, usize>,
}

impl DiskLayout {
    pub(crate) fn new(disks: Vec<Disk>) -> Self {
        let type_index = disks
            .iter()
            .enumerate()
            .filter(|(_, d)| d.kind.is_type())
            .map(|(i, d)| (d.entity.clone(), i))
            .collect();
        Self { disks, type_index }
    }

    pub fn root(&self) -> &Disk {
        &self.disks[0]
    }

    pub fn type_disk(&self, name: &str) -> Option<&Disk> {
        self.type_index.get(name).map(|&i| &self.disks[i])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub version_id: String,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerStack {
    pub layers: Vec<Layer>,
    pub layer_gap: f64,
}

impl LayerStack {
    pub fn z_of(&self, version_id: &str) -> Option<f64> {
        self.layers.iter().find(|l| l.version_id == version_id).map(|l| l.z)
    }
}

/// Layer `k` sits at `z = k * layer_gap`.
pub fn stack_versions(history: &ProjectHistory, layer_gap: f64) -> Result<LayerStack, LayoutError> {
    if !(layer_gap > 0.0 && layer_gap.is_finite()) {
        return Err(LayoutError::Contract(format!("layer gap {layer_gap} must be positive")));
    }
    Ok(LayerStack {
        layers: history
            .versions()
            .iter()
            .map(|v| Layer {
                version_id: v.version_id().to_string(),
                z: v.ordinal() as f64 * layer_gap,
            })
            .collect(),
        layer_gap,
    })
}

/// Whether a disk is drawn in a version's layer.
pub fn is_visible(disk: &Disk, version_id: &str) -> bool {
    disk.render_radius.contains_key(version_id)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeGeometry {
    pub source: String,
    pub target: String,
    pub version_id: String,
    pub polyline: Vec<[f64; 3]>,
    pub thickness: f64,
}

/// Line thickness from the mean of the endpoints' normalized centralities.
pub fn edge_thickness(source_centrality: f64, target_centrality: f64, params: &LayoutParams) -> f64 {
    let importance = ((source_centrality + target_centrality) / 2.0).clamp(0.0, 1.0);
    params.thickness_min + importance * (params.thickness_max - params.thickness_min)
}

/// One straight segment per dependency between two members of `instance`.
///
/// Parallel edges of different kinds between the same ordered pair share a
/// segment.
pub fn straight_edges(
    instance: &AntipatternInstance,
    graph: &VersionGraph,
    layout: &DiskLayout,
    layer: &Layer,
    centrality: &CentralityTable,
    params: &LayoutParams,
) -> Result<Vec<EdgeGeometry>, LayoutError> {
    let members = instance.members();
    let pairs: BTreeSet<(&str, &str)> = graph
        .edges()
        .iter()
        .filter(|e| members.contains(&e.source) && members.contains(&e.target))
        .map(|e| (e.source.as_str(), e.target.as_str()))
        .collect();
    let centrality_of = |name: &str| {
        centrality
            .normalized
            .get(name)
            .copied()
            .ok_or_else(|| LayoutError::Contract(format!("no centrality for {name}")))
    };
    pairs
        .into_iter()
        .map(|(s, t)| {
            let sd = layout
                .type_disk(s)
                .ok_or_else(|| LayoutError::MissingDisk(s.to_string()))?;
            let td = layout
                .type_disk(t)
                .ok_or_else(|| LayoutError::MissingDisk(t.to_string()))?;
            Ok(EdgeGeometry {
                source: s.to_string(),
                target: t.to_string(),
                version_id: layer.version_id.clone(),
                polyline: vec![[sd.center.0, sd.center.1, layer.z], [td.center.0, td.center.1, layer.z]],
                thickness: edge_thickness(centrality_of(s)?, centrality_of(t)?, params),
            })
        })
        .collect()
}
