//! Human-readable and CSV summaries of a pipeline run.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::evolution::{csv_field, TimelineRow};
use crate::model::{AntipatternInstance, LineageGraph, ProjectHistory};

/// Per-version table plus per-instance detail, as text and CSV.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub text: String,
    pub versions_csv: String,
    pub instances_csv: String,
}

const INSTANCE_HEADER: &str = "id,kind,version,size,members,severity,predecessors,successors,terminal";

/// Version rows whose counts are all zero are omitted, so a project without
/// antipatterns yields header-only tables.
pub fn export_report(
    history: &ProjectHistory,
    instances: &[Vec<AntipatternInstance>],
    lineage: &LineageGraph,
    timeline: &[TimelineRow],
) -> Report {
    let rows: Vec<&TimelineRow> = timeline.iter().filter(|r| !r.is_zero()).collect();

    let mut versions_csv = String::from(TimelineRow::CSV_HEADER);
    versions_csv.push('\n');
    for r in &rows {
        let _ = writeln!(
            versions_csv,
            "{},{},{},{},{},{},{},{},{},{}",
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
        );
    }

    let mut preds: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    let mut succs: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for e in &lineage.edges {
        preds.entry(&e.successor).or_default().push(&e.predecessor);
        succs.entry(&e.predecessor).or_default().push(&e.successor);
    }

    let mut instances_csv = String::from(INSTANCE_HEADER);
    instances_csv.push('\n');
    let mut detail = String::new();
    for inst in instances.iter().flatten() {
        let members: Vec<&str> = inst.members().iter().map(String::as_str).collect();
        let severity: Vec<String> = inst.severity().iter().map(|(m, s)| format!("{m}={s:.6}")).collect();
        let p = preds.get(inst.id()).map(|v| v.join(";")).unwrap_or_default();
        let s = succs.get(inst.id()).map(|v| v.join(";")).unwrap_or_default();
        let terminal = lineage.terminal_marks.get(inst.id()).map(|m| m.as_str()).unwrap_or("");
        let _ = writeln!(
            instances_csv,
            "{},{},{},{},{},{},{},{},{}",
            csv_field(inst.id()),
            inst.kind(),
            csv_field(inst.version_id()),
            inst.len(),
            csv_field(&members.join(";")),
            csv_field(&severity.join(";")),
            csv_field(&p),
            csv_field(&s),
            terminal
        );

        let _ = writeln!(
            detail,
            "{} ({} members, version {})",
            inst.id(),
            inst.len(),
            inst.version_id()
        );
        if let Some(roles) = inst.stk_roles() {
            let _ = writeln!(detail, "  supertype {} / subtype {}", roles.supertype, roles.subtype);
        }
        for (m, sev) in inst.severity() {
            let _ = writeln!(detail, "  {sev:.6}  {m}");
        }
        let _ = writeln!(
            detail,
            "  predecessors: {}  successors: {}  status: {}",
            if p.is_empty() { "-" } else { &p },
            if s.is_empty() { "-" } else { &s },
            terminal
        );
    }

    let mut text = String::new();
    let _ = writeln!(text, "Erosion report: {}", history.project_name());
    let _ = writeln!(text, "Versions: {}", history.version_ids().join(", "));
    let _ = writeln!(text);
    let _ = writeln!(text, "Per-version summary");
    let _ = writeln!(
        text,
        "{:<16} {:<6} {:>9} {:>5} {:>9} {:>5} {:>6} {:>11} {:>7} {:>9} {:>7}",
        "version",
        "kind",
        "instances",
        "new",
        "continued",
        "split",
        "merged",
        "disappeared",
        "removed",
        "dissolved",
        "largest"
    );
    for r in &rows {
        let _ = writeln!(
            text,
            "{:<16} {:<6} {:>9} {:>5} {:>9} {:>5} {:>6} {:>11} {:>7} {:>9} {:>7}",
            r.version,
            r.kind.as_str(),
            r.instances,
            r.new,
            r.continued,
            r.split,
            r.merged,
            r.disappeared,
            r.removed,
            r.dissolved,
            r.largest_instance
        );
    }
    let _ = writeln!(text);
    let _ = writeln!(text, "Instances");
    text.push_str(&detail);

    Report {
        text,
        versions_csv,
        instances_csv,
    }
}
