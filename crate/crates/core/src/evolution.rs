//! Cross-version lineage of antipattern instances.
//!
//! Instances in consecutive versions are linked when they share at least half
//! of either side's members. Matching is many-to-many, which is what makes
//! splits and merges representable.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::{
    instance_overlap, AntipatternInstance, AntipatternKind, LineageEdge, LineageGraph, LineageLabel, ProjectHistory,
    TerminalMark, VersionGraph,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchEdge {
    pub predecessor: String,
    pub successor: String,
    pub intersection_size: usize,
}

/// Every qualifying (prev, next) pair of the same kind.
pub fn match_instances(prev: &[AntipatternInstance], next: &[AntipatternInstance]) -> Vec<MatchEdge> {
    let mut out = Vec::new();
    for a in prev {
        for b in next {
            if a.kind() != b.kind() {
                continue;
            }
            let overlap = instance_overlap(a.members(), b.members());
            if overlap.matched {
                out.push(MatchEdge {
                    predecessor: a.id().to_string(),
                    successor: b.id().to_string(),
                    intersection_size: overlap.intersection_size,
                });
            }
        }
    }
    out
}

/// Why an instance without a successor is gone: at least half of its members
/// were deleted, or the members survive but the structure broke.
pub fn classify_disappearance(instance: &AntipatternInstance, next_graph: &VersionGraph) -> TerminalMark {
    let absent = instance.members().iter().filter(|m| !next_graph.contains(m)).count();
    if 2 * absent >= instance.len() {
        TerminalMark::TypesRemoved
    } else {
        TerminalMark::Dissolved
    }
}

/// Links instances across all consecutive version pairs.
///
/// `instances[k]` holds every instance of version `k`.
pub fn build_lineage(history: &ProjectHistory, instances: &[Vec<AntipatternInstance>]) -> LineageGraph {
    let versions = history.versions();
    let matches: Vec<Vec<MatchEdge>> = (1..instances.len().min(versions.len()))
        .into_par_iter()
        .map(|k| match_instances(&instances[k - 1], &instances[k]))
        .collect();

    let mut out_degree: HashMap<&str, usize> = HashMap::new();
    let mut in_degree: HashMap<&str, usize> = HashMap::new();
    for m in matches.iter().flatten() {
        *out_degree.entry(&m.predecessor).or_default() += 1;
        *in_degree.entry(&m.successor).or_default() += 1;
    }

    let edges: Vec<LineageEdge> = matches
        .iter()
        .flatten()
        .map(|m| {
            let split = out_degree[m.predecessor.as_str()] >= 2;
            let merge = in_degree[m.successor.as_str()] >= 2;
            let label = match (split, merge) {
                (true, _) => LineageLabel::SplitBranch,
                (false, true) => LineageLabel::MergeBranch,
                (false, false) => LineageLabel::Continued,
            };
            LineageEdge {
                predecessor: m.predecessor.clone(),
                successor: m.successor.clone(),
                label,
                also_merge: split && merge,
                intersection_size: m.intersection_size,
            }
        })
        .collect();

    let mut nodes = Vec::new();
    let mut terminal_marks = BTreeMap::new();
    let last = versions.len().saturating_sub(1);
    for (k, list) in instances.iter().enumerate() {
        for inst in list {
            nodes.push(inst.id().to_string());
            let mark = if k >= last || out_degree.contains_key(inst.id()) {
                TerminalMark::Alive
            } else {
                classify_disappearance(inst, &versions[k + 1])
            };
            terminal_marks.insert(inst.id().to_string(), mark);
        }
    }
    LineageGraph {
        nodes,
        edges,
        terminal_marks,
    }
}

/// Per-version, per-kind lineage counts.
///
/// Instances of version `k` are exactly one of new (no predecessor),
/// continued (one predecessor) or merged (two or more). `split` counts
/// predecessors in `k-1` with two or more successors; `disappeared` counts
/// `k-1` instances without a successor, broken down into `removed` and
/// `dissolved`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimelineRow {
    pub version: String,
    pub kind: AntipatternKind,
    pub instances: usize,
    pub new: usize,
    pub continued: usize,
    pub split: usize,
    pub merged: usize,
    pub disappeared: usize,
    pub removed: usize,
    pub dissolved: usize,
    pub total_members: usize,
    pub largest_instance: usize,
}

impl TimelineRow {
    pub const CSV_HEADER: &'static str =
        "version,kind,new,continued,split,merged,disappeared,removed,dissolved,largest_instance";

    pub fn is_zero(&self) -> bool {
        self.instances == 0 && self.split == 0 && self.disappeared == 0
    }
}

pub fn erosion_timeline(
    history: &ProjectHistory,
    lineage: &LineageGraph,
    instances: &[Vec<AntipatternInstance>],
) -> Vec<TimelineRow> {
    let mut in_degree: HashMap<&str, usize> = HashMap::new();
    let mut out_degree: HashMap<&str, usize> = HashMap::new();
    for e in &lineage.edges {
        *in_degree.entry(&e.successor).or_default() += 1;
        *out_degree.entry(&e.predecessor).or_default() += 1;
    }
    let empty = Vec::new();
    let mut rows = Vec::new();
    for (k, version) in history.versions().iter().enumerate() {
        let current = instances.get(k).unwrap_or(&empty);
        let previous = if k > 0 {
            instances.get(k - 1).unwrap_or(&empty)
        } else {
            &empty
        };
        for kind in AntipatternKind::ALL {
            let mut row = TimelineRow {
                version: version.version_id().to_string(),
                kind,
                instances: 0,
                new: 0,
                continued: 0,
                split: 0,
                merged: 0,
                disappeared: 0,
                removed: 0,
                dissolved: 0,
                total_members: 0,
                largest_instance: 0,
            };
            for inst in current.iter().filter(|i| i.kind() == kind) {
                row.instances += 1;
                row.total_members += inst.len();
                row.largest_instance = row.largest_instance.max(inst.len());
                match in_degree.get(inst.id()).copied().unwrap_or(0) {
                    0 => row.new += 1,
                    1 => row.continued += 1,
                    _ => row.merged += 1,
                }
            }
            for inst in previous.iter().filter(|i| i.kind() == kind) {
                match out_degree.get(inst.id()).copied().unwrap_or(0) {
                    0 => {
                        row.disappeared += 1;
                        match lineage.terminal_marks.get(inst.id()) {
                            Some(TerminalMark::TypesRemoved) => row.removed += 1,
                            _ => row.dissolved += 1,
                        }
                    }
                    1 => {}
                    _ => row.split += 1,
                }
            }
            rows.push(row);
        }
    }
    rows
}

pub fn timeline_csv(rows: &[TimelineRow]) -> String {
    let mut out = String::from(TimelineRow::CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            csv_field(&r.version),
            r.kind,
            r.new,
            r.continued,
            r.split,
            r.merged,
            r.disappeared,
            r.removed,
            r.dissolved,
            r.largest_instance
        ));
    }
    out
}

pub fn lineage_csv(lineage: &LineageGraph) -> String {
    let mut out = String::from("predecessor,successor,label,also_merge,intersection_size\n");
    for e in &lineage.edges {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            csv_field(&e.predecessor),
            csv_field(&e.successor),
            e.label.as_str(),
            e.also_merge,
            e.intersection_size
        ));
    }
    out
}

/// Quotes a CSV field when it contains a delimiter, quote or newline.
pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
