//! Scene document for the viewer and the text/CSV reports.
//!
//! The scene is a single JSON object with the top-level keys `project`,
//! `layers`, `disks`, `antipatterns`, `lineage` and `legend`. Maps are
//! key-sorted and every float is written with six decimals, so identical
//! inputs produce identical bytes.

mod format;
mod report;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::analysis::VersionAnalysis;
use crate::config::{ColorParams, PipelineParams};
use crate::error::SceneError;
use crate::layout::{is_visible, DiskLayout, EdgeGeometry, EntityKind, LayerStack};
use crate::model::{AntipatternKind, LineageEdge, LineageGraph, ProjectHistory, StkRoles, TerminalMark};

pub use format::{Rgb, F6};
pub use report::{export_report, Report};

pub const SCENE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneDocument {
    pub project: ProjectMeta,
    pub layers: Vec<SceneLayer>,
    pub disks: Vec<SceneDisk>,
    pub antipatterns: Vec<SceneInstance>,
    pub lineage: SceneLineage,
    pub legend: Legend,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectMeta {
    pub name: String,
    pub format_version: u32,
    /// Every version of the analyzed history, in release order.
    pub versions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneLayer {
    pub version: String,
    pub ordinal: usize,
    pub z: F6,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneDisk {
    pub entity: String,
    pub kind: EntityKind,
    /// Index into `disks`.
    pub parent: Option<usize>,
    pub depth: usize,
    pub x: F6,
    pub y: F6,
    pub pack_radius: F6,
    /// Only versions in which the entity exists.
    pub versions: BTreeMap<String, DiskVersion>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiskVersion {
    pub radius: F6,
    pub color: Rgb,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub centrality: Option<F6>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stk_rank: Option<F6>,
    pub tooltip: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneInstance {
    pub id: String,
    pub kind: AntipatternKind,
    pub version: String,
    pub members: Vec<String>,
    pub severity: BTreeMap<String, F6>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stk_roles: Option<StkRoles>,
    pub edges: Vec<SceneEdge>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneEdge {
    pub source: String,
    pub target: String,
    pub thickness: F6,
    pub straight: Vec<[F6; 3]>,
    pub bundled: Vec<[F6; 3]>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneLineage {
    pub nodes: Vec<String>,
    pub edges: Vec<LineageEdge>,
    pub terminal: BTreeMap<String, TerminalMark>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Legend {
    pub rank_low_color: Rgb,
    pub rank_high_color: Rgb,
    pub neutral_color: Rgb,
    pub thickness_min: F6,
    pub thickness_max: F6,
    pub area_min: F6,
    pub area_max: F6,
    pub layer_gap: F6,
}

/// Straight and bundled geometry of one instance's edges, index-aligned.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct InstanceEdges {
    pub straight: Vec<EdgeGeometry>,
    pub bundled: Vec<EdgeGeometry>,
}

pub struct SceneInputs<'a> {
    pub history: &'a ProjectHistory,
    pub analyses: &'a [VersionAnalysis],
    pub lineage: &'a LineageGraph,
    pub layout: &'a DiskLayout,
    pub stack: &'a LayerStack,
    pub edges: &'a BTreeMap<String, InstanceEdges>,
    pub params: &'a PipelineParams,
}

/// Green-to-red by rank, neutral grey for entities in no STK instance.
pub fn color_for_rank(rank: Option<f64>, colors: &ColorParams) -> Result<Rgb, SceneError> {
    let Some(r) = rank else {
        return Ok(colors.neutral);
    };
    if !(0.0..=1.0).contains(&r) {
        return Err(SceneError::Inconsistent(format!("rank {r} outside [0,1]")));
    }
    let lerp = |a: u8, b: u8| (a as f64 + r * (b as f64 - a as f64)).round() as u8;
    let (lo, hi) = (colors.rank_low, colors.rank_high);
    Ok(Rgb(lerp(lo.0, hi.0), lerp(lo.1, hi.1), lerp(lo.2, hi.2)))
}

fn point(p: &[f64; 3]) -> [F6; 3] {
    [F6(p[0]), F6(p[1]), F6(p[2])]
}

/// Assembles the scene, refusing inputs that reference unknown entities.
pub fn build_scene(inputs: &SceneInputs<'_>) -> Result<SceneDocument, SceneError> {
    let SceneInputs {
        history,
        analyses,
        lineage,
        layout,
        stack,
        edges,
        params,
    } = inputs;
    let versions = history.versions();
    if analyses.len() != versions.len() || stack.layers.len() != versions.len() {
        return Err(SceneError::Inconsistent(format!(
            "{} versions but {} analyses and {} layers",
            versions.len(),
            analyses.len(),
            stack.layers.len()
        )));
    }

    // Highest STK rank per (version, type).
    let mut stk_rank: Vec<BTreeMap<&str, f64>> = vec![BTreeMap::new(); versions.len()];
    for (k, a) in analyses.iter().enumerate() {
        for inst in &a.stk {
            for (m, &s) in inst.severity() {
                let slot = stk_rank[k].entry(m.as_str()).or_insert(s);
                if s > *slot {
                    *slot = s;
                }
            }
        }
    }

    // Types per container per version, for package tooltips.
    let mut contained: Vec<BTreeMap<&str, usize>> = vec![BTreeMap::new(); layout.disks.len()];
    for d in layout.disks.iter().filter(|d| d.kind.is_type()) {
        for v in d.render_radius.keys() {
            let mut parent = d.parent;
            while let Some(p) = parent {
                *contained[p].entry(v.as_str()).or_default() += 1;
                parent = layout.disks[p].parent;
            }
        }
    }

    let mut disks = Vec::with_capacity(layout.disks.len());
    for (i, d) in layout.disks.iter().enumerate() {
        let mut states = BTreeMap::new();
        for (k, g) in versions.iter().enumerate() {
            let vid = g.version_id();
            let Some(&radius) = d.render_radius.get(vid) else {
                continue;
            };
            let state = if d.kind.is_type() {
                let centrality = analyses[k]
                    .centrality
                    .normalized
                    .get(&d.entity)
                    .copied()
                    .ok_or_else(|| SceneError::Inconsistent(format!("type {} has no centrality in {vid}", d.entity)))?;
                let rank = stk_rank[k].get(d.entity.as_str()).copied();
                let tooltip = format!(
                    "{}\n{} in version {}\n{}\ncentrality {:.3}",
                    d.entity,
                    d.kind.as_str(),
                    vid,
                    match rank {
                        Some(r) => format!("STK rank {r:.2}"),
                        None => "not in STK".to_string(),
                    },
                    centrality
                );
                DiskVersion {
                    radius: F6(radius),
                    color: color_for_rank(rank, &params.colors)?,
                    centrality: Some(F6(centrality)),
                    stk_rank: rank.map(F6),
                    tooltip,
                }
            } else {
                let count = contained[i].get(vid).copied().unwrap_or(0);
                let tooltip = match d.kind {
                    EntityKind::Root => format!("{}\n{count} types in version {vid}", history.project_name()),
                    _ => format!("{}\npackage, {count} types in version {vid}", d.entity),
                };
                DiskVersion {
                    radius: F6(radius),
                    color: params.colors.neutral,
                    centrality: None,
                    stk_rank: None,
                    tooltip,
                }
            };
            states.insert(vid.to_string(), state);
        }
        disks.push(SceneDisk {
            entity: d.entity.clone(),
            kind: d.kind,
            parent: d.parent,
            depth: d.depth,
            x: F6(d.center.0),
            y: F6(d.center.1),
            pack_radius: F6(d.pack_radius),
            versions: states,
        });
    }

    let mut antipatterns = Vec::new();
    for a in analyses.iter() {
        for inst in a.instances() {
            for m in inst.members() {
                let visible = layout.type_disk(m).is_some_and(|d| is_visible(d, inst.version_id()));
                if !visible {
                    return Err(SceneError::Inconsistent(format!(
                        "instance {} member {m} has no disk in version {}",
                        inst.id(),
                        inst.version_id()
                    )));
                }
            }
            let geometry = edges
                .get(inst.id())
                .ok_or_else(|| SceneError::Inconsistent(format!("no edge geometry for instance {}", inst.id())))?;
            if geometry.straight.len() != geometry.bundled.len() {
                return Err(SceneError::Inconsistent(format!(
                    "instance {}: straight and bundled edge lists differ in length",
                    inst.id()
                )));
            }
            let scene_edges = geometry
                .straight
                .iter()
                .zip(&geometry.bundled)
                .map(|(s, b)| SceneEdge {
                    source: s.source.clone(),
                    target: s.target.clone(),
                    thickness: F6(s.thickness),
                    straight: s.polyline.iter().map(point).collect(),
                    bundled: b.polyline.iter().map(point).collect(),
                })
                .collect();
            antipatterns.push(SceneInstance {
                id: inst.id().to_string(),
                kind: inst.kind(),
                version: inst.version_id().to_string(),
                members: inst.members().iter().cloned().collect(),
                severity: inst.severity().iter().map(|(k, &v)| (k.clone(), F6(v))).collect(),
                stk_roles: inst.stk_roles().cloned(),
                edges: scene_edges,
            });
        }
    }

    let known: BTreeSet<&str> = antipatterns.iter().map(|i| i.id.as_str()).collect();
    for e in &lineage.edges {
        for id in [&e.predecessor, &e.successor] {
            if !known.contains(id.as_str()) {
                return Err(SceneError::Inconsistent(format!(
                    "lineage references unknown instance {id}"
                )));
            }
        }
    }

    let layout_params = &params.layout;
    Ok(SceneDocument {
        project: ProjectMeta {
            name: history.project_name().to_string(),
            format_version: SCENE_FORMAT_VERSION,
            versions: versions.iter().map(|v| v.version_id().to_string()).collect(),
        },
        layers: stack
            .layers
            .iter()
            .enumerate()
            .map(|(k, l)| SceneLayer {
                version: l.version_id.clone(),
                ordinal: k,
                z: F6(l.z),
            })
            .collect(),
        disks,
        antipatterns,
        lineage: SceneLineage {
            nodes: lineage.nodes.clone(),
            edges: lineage.edges.clone(),
            terminal: lineage.terminal_marks.clone(),
        },
        legend: Legend {
            rank_low_color: params.colors.rank_low,
            rank_high_color: params.colors.rank_high,
            neutral_color: params.colors.neutral,
            thickness_min: F6(layout_params.thickness_min),
            thickness_max: F6(layout_params.thickness_max),
            area_min: F6(layout_params.area_min),
            area_max: F6(layout_params.area_max),
            layer_gap: F6(layout_params.layer_gap),
        },
    })
}

/// Compact single-line JSON followed by a newline.
pub fn scene_to_bytes(doc: &SceneDocument) -> Result<Vec<u8>, SceneError> {
    let mut out = serde_json::to_vec(doc)?;
    out.push(b'\n');
    Ok(out)
}

pub fn export_scene(inputs: &SceneInputs<'_>) -> Result<Vec<u8>, SceneError> {
    scene_to_bytes(&build_scene(inputs)?)
}

pub fn parse_scene(bytes: &[u8]) -> Result<SceneDocument, serde_json::Error> {
    serde_json::from_slice(bytes)
}

/// Semantic checks beyond the schema. An empty list means the scene is valid.
pub fn validate_scene(doc: &SceneDocument) -> Vec<String> {
    let mut problems = Vec::new();
    let layer_ids: BTreeSet<&str> = doc.layers.iter().map(|l| l.version.as_str()).collect();
    if layer_ids.len() != doc.layers.len() {
        problems.push("duplicate layer version".to_string());
    }
    for w in doc.layers.windows(2) {
        if w[0].z.get() >= w[1].z.get() {
            problems.push(format!("layer z not increasing at {}", w[1].version));
        }
    }
    for l in &doc.layers {
        if !doc.project.versions.contains(&l.version) {
            problems.push(format!("layer {} is not a project version", l.version));
        }
    }

    let mut type_disks: BTreeMap<&str, &SceneDisk> = BTreeMap::new();
    for (i, d) in doc.disks.iter().enumerate() {
        match (d.kind, d.parent) {
            (EntityKind::Root, None) => {}
            (EntityKind::Root, Some(_)) => problems.push("root disk has a parent".to_string()),
            (_, None) => problems.push(format!("disk {} has no parent", d.entity)),
            (_, Some(p)) if p >= i => problems.push(format!("disk {} parent index {p} out of order", d.entity)),
            _ => {}
        }
        if d.pack_radius.get() <= 0.0 {
            problems.push(format!("disk {} has non-positive pack radius", d.entity));
        }
        for (v, state) in &d.versions {
            if !layer_ids.contains(v.as_str()) {
                problems.push(format!("disk {} references unknown layer {v}", d.entity));
            }
            // Six-decimal rounding can push the drawn radius past the footprint by half an ulp of the format.
            if state.radius.get() > d.pack_radius.get() + 1e-6 || state.radius.get() <= 0.0 {
                problems.push(format!("disk {} radius out of bounds in {v}", d.entity));
            }
        }
        if d.kind.is_type() {
            type_disks.insert(&d.entity, d);
        }
    }

    let (tmin, tmax) = (doc.legend.thickness_min.get(), doc.legend.thickness_max.get());
    let mut ids = BTreeSet::new();
    for inst in &doc.antipatterns {
        if !ids.insert(inst.id.as_str()) {
            problems.push(format!("duplicate instance id {}", inst.id));
        }
        let members: BTreeSet<&str> = inst.members.iter().map(String::as_str).collect();
        let keys: BTreeSet<&str> = inst.severity.keys().map(String::as_str).collect();
        if members != keys {
            problems.push(format!("instance {} severity keys differ from members", inst.id));
        }
        if inst.kind == AntipatternKind::Cycle && members.len() < 2 {
            problems.push(format!("cycle {} has fewer than 2 members", inst.id));
        }
        if (inst.kind == AntipatternKind::Stk) != inst.stk_roles.is_some() {
            problems.push(format!("instance {} stk_roles presence does not match kind", inst.id));
        }
        for (m, s) in &inst.severity {
            if !(0.0..=1.0).contains(&s.get()) {
                problems.push(format!("instance {} severity of {m} outside [0,1]", inst.id));
            }
        }
        if layer_ids.contains(inst.version.as_str()) {
            for m in &inst.members {
                let ok = type_disks
                    .get(m.as_str())
                    .is_some_and(|d| d.versions.contains_key(&inst.version));
                if !ok {
                    problems.push(format!(
                        "instance {} member {m} has no disk in layer {}",
                        inst.id, inst.version
                    ));
                }
            }
        }
        for e in &inst.edges {
            if !(members.contains(e.source.as_str()) && members.contains(e.target.as_str())) {
                problems.push(format!(
                    "instance {} edge {}->{} leaves the instance",
                    inst.id, e.source, e.target
                ));
            }
            if e.thickness.get() < tmin - 1e-6 || e.thickness.get() > tmax + 1e-6 {
                problems.push(format!("instance {} edge thickness outside legend bounds", inst.id));
            }
            if e.straight.len() != 2 || e.bundled.len() < 2 {
                problems.push(format!(
                    "instance {} edge {}->{} has malformed geometry",
                    inst.id, e.source, e.target
                ));
            } else if e.straight.first() != e.bundled.first() || e.straight.last() != e.bundled.last() {
                problems.push(format!("instance {} bundled edge endpoints moved", inst.id));
            }
        }
    }
    for e in &doc.lineage.edges {
        for id in [&e.predecessor, &e.successor] {
            if !ids.contains(id.as_str()) {
                problems.push(format!("lineage edge references unknown instance {id}"));
            }
        }
    }
    problems
}

/// Unknown version ids in a layer filter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownVersions {
    pub unknown: Vec<String>,
    pub valid: Vec<String>,
}

fn check_filter(doc: &SceneDocument, versions: &[String]) -> Result<BTreeSet<String>, UnknownVersions> {
    let valid: Vec<String> = doc.layers.iter().map(|l| l.version.clone()).collect();
    let unknown: Vec<String> = versions.iter().filter(|v| !valid.contains(v)).cloned().collect();
    if !unknown.is_empty() {
        return Err(UnknownVersions { unknown, valid });
    }
    Ok(versions.iter().cloned().collect())
}

/// Drops layers and per-version disk state outside `versions`; the
/// antipattern index and lineage stay whole.
pub fn filter_layers(doc: &SceneDocument, versions: &[String]) -> Result<SceneDocument, UnknownVersions> {
    let keep = check_filter(doc, versions)?;
    let mut out = doc.clone();
    out.layers.retain(|l| keep.contains(&l.version));
    for d in &mut out.disks {
        d.versions.retain(|v, _| keep.contains(v));
    }
    Ok(out)
}

/// Restricts a scene to `versions` entirely: layers, disk state, instances of
/// those versions, and lineage edges whose endpoints both survive.
pub fn project_versions(doc: &SceneDocument, versions: &[String]) -> Result<SceneDocument, UnknownVersions> {
    let keep = check_filter(doc, versions)?;
    let mut out = filter_layers(doc, versions)?;
    out.antipatterns.retain(|i| keep.contains(&i.version));
    let ids: BTreeSet<String> = out.antipatterns.iter().map(|i| i.id.clone()).collect();
    out.lineage.nodes.retain(|n| ids.contains(n));
    out.lineage
        .edges
        .retain(|e| ids.contains(&e.predecessor) && ids.contains(&e.successor));
    out.lineage.terminal.retain(|id, _| ids.contains(id));
    Ok(out)
}
