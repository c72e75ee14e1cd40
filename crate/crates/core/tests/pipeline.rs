mod common;

use std::fs;

use common::*;
use erosion_core::ingest::{load_manifest, write_history};
use erosion_core::pipeline;
use erosion_core::scene::{filter_layers, parse_scene, project_versions, scene_to_bytes, validate_scene, Rgb};
use erosion_core::{AntipatternKind, IngestError, PipelineParams, ProjectHistory, VersionGraph};
use proptest::prelude::*;

fn scene_of(h: &ProjectHistory) -> Vec<u8> {
    let params = PipelineParams::default();
    pipeline::run(h, &params).unwrap().scene_bytes(h, &params).unwrap()
}

#[test]
fn toy_scene_is_valid_and_round_trips() {
    let h = toy_project();
    let bytes = scene_of(&h);
    assert_eq!(bytes.last(), Some(&b'\n'));
    let doc = parse_scene(&bytes).unwrap();
    assert!(validate_scene(&doc).is_empty(), "{:?}", validate_scene(&doc));
    assert_eq!(scene_to_bytes(&doc).unwrap(), bytes);

    assert_eq!(doc.project.versions, ["1.0", "1.1"]);
    assert_eq!(doc.layers.len(), 2);
    let cycles: Vec<_> = doc
        .antipatterns
        .iter()
        .filter(|i| i.kind == AntipatternKind::Cycle)
        .collect();
    assert_eq!(cycles.len(), 2);
    assert!(cycles.iter().all(|c| c.members.len() == 3 && c.edges.len() == 3));
    assert_eq!(doc.lineage.edges.len(), 1);

    // Types outside every instance are grey.
    let service = doc.disks.iter().find(|d| d.entity == "app.api.ServiceImpl").unwrap();
    assert!(service.versions.values().all(|v| v.color == Rgb(150, 150, 150)));
}

#[test]
fn floats_are_written_with_six_decimals() {
    let bytes = scene_of(&toy_project());
    let text = String::from_utf8(bytes).unwrap();
    let z = text.find("\"z\":").unwrap();
    let value: String = text[z + 4..].chars().take_while(|c| *c != ',' && *c != '}').collect();
    assert_eq!(value, "0.000000");
    let bytes = text.as_bytes();
    let exponent = bytes
        .windows(3)
        .any(|w| w[0].is_ascii_digit() && w[1] == b'e' && (w[2] == b'-' || w[2] == b'+' || w[2].is_ascii_digit()));
    assert!(!exponent, "no exponent notation");
}

#[test]
fn split_and_merge_timelines() {
    for (split, row_check) in [(true, "split"), (false, "merged")] {
        let h = split_merge_history(split);
        let analyses = pipeline::analyze(&h).unwrap();
        let (_, timeline) = pipeline::trace(&h, &analyses);
        let row = timeline
            .iter()
            .find(|r| r.version == "v1" && r.kind == AntipatternKind::Cycle)
            .unwrap();
        if row_check == "split" {
            assert_eq!((row.split, row.continued, row.new), (1, 2, 0));
        } else {
            assert_eq!((row.merged, row.continued, row.new), (1, 0, 0));
        }
    }
}

#[test]
fn report_lists_instances_and_skips_empty_rows() {
    let h = toy_project();
    let out = pipeline::run(&h, &PipelineParams::default()).unwrap();
    let report = out.report(&h);
    let rows: Vec<&str> = report.versions_csv.lines().collect();
    assert_eq!(
        rows[0],
        "version,kind,new,continued,split,merged,disappeared,removed,dissolved,largest_instance"
    );
    assert_eq!(&rows[1..], ["1.0,cycle,1,0,0,0,0,0,0,3", "1.1,cycle,0,1,0,0,0,0,0,3"]);
    assert_eq!(report.instances_csv.lines().count(), 3);
    assert!(report.text.contains("Erosion report: toy"));

    let quiet = history_of_names(&[vec!["a.A".into(), "a.B".into()]]);
    let out = pipeline::run(&quiet, &PipelineParams::default()).unwrap();
    let report = out.report(&quiet);
    assert_eq!(report.versions_csv.lines().count(), 1);
    assert_eq!(report.instances_csv.lines().count(), 1);
}

#[test]
fn layer_filters() {
    let doc = parse_scene(&scene_of(&toy_project())).unwrap();
    let only = vec!["1.1".to_string()];

    let served = filter_layers(&doc, &only).unwrap();
    assert_eq!(served.layers.len(), 1);
    assert_eq!(served.layers[0].z, doc.layers[1].z);
    assert_eq!(served.antipatterns, doc.antipatterns);
    assert!(served.disks.iter().all(|d| !d.versions.contains_key("1.0")));
    assert!(validate_scene(&served).is_empty());

    let projected = project_versions(&doc, &only).unwrap();
    assert!(projected.antipatterns.iter().all(|i| i.version == "1.1"));
    assert!(projected.lineage.edges.is_empty());
    assert!(validate_scene(&projected).is_empty());

    let err = filter_layers(&doc, &["9.9".to_string()]).unwrap_err();
    assert_eq!(err.unknown, ["9.9"]);
    assert_eq!(err.valid, ["1.0", "1.1"]);
}

#[test]
fn validate_scene_reports_broken_references() {
    let mut doc = parse_scene(&scene_of(&toy_project())).unwrap();
    doc.lineage.edges[0].successor = "cycle-9.9-0".into();
    doc.antipatterns[0].members.push("app.nowhere.Ghost".into());
    let problems = validate_scene(&doc);
    assert!(problems.iter().any(|p| p.contains("unknown instance cycle-9.9-0")));
    assert!(problems.iter().any(|p| p.contains("severity keys differ")));
}

#[test]
fn load_manifest_reports_bad_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let missing = load_manifest(&dir.path().join("nope.json")).unwrap_err();
    assert!(matches!(missing, IngestError::Io { .. }));

    let path = write_history(&toy_project(), dir.path()).unwrap();
    fs::write(dir.path().join("graph-001.json"), "{\"types\": [").unwrap();
    assert!(matches!(
        load_manifest(&path).unwrap_err(),
        IngestError::Malformed { .. }
    ));

    fs::write(
        dir.path().join("graph-001.json"),
        r#"{"types":[{"name":"a.A","kind":"class"}],"edges":[{"from":"a.A","to":"a.C","kind":"uses"}]}"#,
    )
    .unwrap();
    let err = load_manifest(&path).unwrap_err().to_string();
    assert!(err.contains("dangling endpoint a.C"), "{err}");

    fs::write(&path, r#"{"project":"p","versions":[]}"#).unwrap();
    assert!(matches!(load_manifest(&path).unwrap_err(), IngestError::Manifest(_)));
}

#[test]
fn load_manifest_counts_normalizations() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("g.json"),
        r#"{"types":[{"name":"a.A","kind":"class"},{"name":"a.B","kind":"interface"}],
            "edges":[{"from":"a.A","to":"a.A","kind":"uses"},
                     {"from":"a.A","to":"a.B","kind":"implements"},
                     {"from":"a.A","to":"a.B","kind":"implements"}]}"#,
    )
    .unwrap();
    let path = dir.path().join("m.json");
    fs::write(&path, r#"{"project":"p","versions":[{"id":"1","graph":"g.json"}]}"#).unwrap();
    let loaded = load_manifest(&path).unwrap();
    assert_eq!(loaded.diagnostics[0].stats.dropped_self_edges, 1);
    assert_eq!(loaded.diagnostics[0].stats.duplicate_edges, 1);
    let g = &loaded.history.versions()[0];
    assert!(g.node("a.B").unwrap().is_abstract);
    assert_eq!(g.edges().len(), 1);
}

/// Spreads `nNNN` names over a few nested packages.
fn packaged(name: &str) -> String {
    let i: usize = name[1..].parse().unwrap();
    match i % 3 {
        0 => format!("core.{name}"),
        1 => format!("core.util.{name}"),
        _ => format!("ui.{name}"),
    }
}

fn random_history(seed: u64, versions: usize) -> ProjectHistory {
    let mut r = rng(seed);
    let graphs: Vec<VersionGraph> = (0..versions)
        .map(|k| {
            let g = random_typed_graph(&mut r, 2 + k * 3 % 9, 0.2, 0.15);
            let nodes = g.nodes().iter().map(|n| {
                let mut n = n.clone();
                n.name = packaged(&n.name);
                n
            });
            let edges = g
                .edges()
                .iter()
                .map(|e| erosion_core::DependencyEdge::new(packaged(&e.source), packaged(&e.target), e.kind));
            VersionGraph::new(format!("r{k}"), k, nodes.collect(), edges.collect())
        })
        .collect();
    ProjectHistory::new("prop", graphs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn history_survives_disk_round_trip(seed in any::<u64>(), versions in 1usize..5) {
        let h = random_history(seed, versions);
        let dir = tempfile::tempdir().unwrap();
        let path = write_history(&h, dir.path()).unwrap();
        let loaded = load_manifest(&path).unwrap();
        prop_assert_eq!(loaded.history, h);
    }

    #[test]
    fn scene_bytes_round_trip_and_validate(seed in any::<u64>(), versions in 1usize..4) {
        let h = random_history(seed, versions);
        let bytes = scene_of(&h);
        let doc = parse_scene(&bytes).unwrap();
        prop_assert!(validate_scene(&doc).is_empty(), "{:?}", validate_scene(&doc));
        prop_assert_eq!(scene_to_bytes(&doc).unwrap(), bytes.clone());
        prop_assert_eq!(scene_of(&h), bytes);
    }
}

/// Structural check of a value against the subset of JSON Schema used in
/// docs/scene.schema.json.
fn check_schema(
    schema: &serde_json::Value,
    root: &serde_json::Value,
    v: &serde_json::Value,
    path: &str,
    errors: &mut Vec<String>,
) {
    use serde_json::Value;
    if let Some(r) = schema.get("$ref").and_then(Value::as_str) {
        let name = r.trim_start_matches("#/$defs/");
        return check_schema(&root["$defs"][name], root, v, path, errors);
    }
    if let Some(options) = schema.get("enum").and_then(Value::as_array) {
        if !options.contains(v) {
            errors.push(format!("{path}: {v} not in enum"));
        }
    }
    if let Some(c) = schema.get("const") {
        if c != v {
            errors.push(format!("{path}: expected {c}"));
        }
    }
    if let Some(pattern) = schema.get("pattern").and_then(Value::as_str) {
        assert_eq!(pattern, "^#[0-9a-f]{6}$");
        let s = v.as_str().unwrap_or("");
        if !(s.len() == 7
            && s.starts_with('#')
            && s[1..].chars().all(|c| c.is_ascii_digit() || ('a'..='f').contains(&c)))
        {
            errors.push(format!("{path}: bad color {v}"));
        }
    }
    if schema.get("description").and_then(Value::as_str) == Some("Written with exactly six decimals.") {
        let text = v.to_string();
        if text.split('.').nth(1).map(str::len) != Some(6) {
            errors.push(format!("{path}: {text} lacks six decimals"));
        }
    }
    match v {
        Value::Object(map) => {
            if let Some(required) = schema.get("required").and_then(Value::as_array) {
                for k in required {
                    if !map.contains_key(k.as_str().unwrap()) {
                        errors.push(format!("{path}: missing {k}"));
                    }
                }
            }
            let props = schema.get("properties").and_then(Value::as_object);
            for (k, child) in map {
                match (props.and_then(|p| p.get(k)), schema.get("additionalProperties")) {
                    (Some(s), _) => check_schema(s, root, child, &format!("{path}.{k}"), errors),
                    (None, Some(Value::Object(_))) => check_schema(
                        &schema["additionalProperties"],
                        root,
                        child,
                        &format!("{path}.{k}"),
                        errors,
                    ),
                    (None, Some(Value::Bool(false))) => errors.push(format!("{path}: unexpected key {k}")),
                    _ => {}
                }
            }
        }
        Value::Array(items) => {
            if let Some(min) = schema.get("minItems").and_then(Value::as_u64) {
                if (items.len() as u64) < min {
                    errors.push(format!("{path}: fewer than {min} items"));
                }
            }
            if let Some(item_schema) = schema.get("items") {
                for (i, item) in items.iter().enumerate() {
                    check_schema(item_schema, root, item, &format!("{path}[{i}]"), errors);
                }
            }
        }
        _ => {}
    }
}

#[test]
fn scene_matches_published_schema() {
    let schema: serde_json::Value = serde_json::from_str(include_str!("../../../docs/scene.schema.json")).unwrap();
    let mut h = split_merge_history(true);
    // Add an STK pair so stk_roles and stk_rank appear.
    let mut graphs: Vec<VersionGraph> = h.versions().to_vec();
    let last = graphs.pop().unwrap();
    let mut nodes = last.nodes().to_vec();
    nodes.push(erosion_core::TypeNode::abstract_class("q.Shape"));
    nodes.push(erosion_core::TypeNode::class("q.Circle"));
    let mut edges = last.edges().to_vec();
    edges.push(erosion_core::DependencyEdge::new(
        "q.Circle",
        "q.Shape",
        erosion_core::EdgeKind::Extends,
    ));
    edges.push(erosion_core::DependencyEdge::new(
        "q.Shape",
        "q.Circle",
        erosion_core::EdgeKind::Uses,
    ));
    graphs.push(VersionGraph::new(last.version_id(), last.ordinal(), nodes, edges));
    h = ProjectHistory::new("schema", graphs).unwrap();

    let doc: serde_json::Value = serde_json::from_slice(&scene_of(&h)).unwrap();
    assert!(doc["antipatterns"]
        .as_array()
        .unwrap()
        .iter()
        .any(|i| i.get("stk_roles").is_some()));
    let mut errors = Vec::new();
    check_schema(&schema, &schema, &doc, "$", &mut errors);
    assert!(errors.is_empty(), "{errors:#?}");
}
