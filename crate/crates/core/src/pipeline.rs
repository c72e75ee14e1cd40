//! End-to-end orchestration: analyze, trace, lay out, export.

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::analysis::{analyze_version, VersionAnalysis};
use crate::config::PipelineParams;
use crate::error::{InternalError, LayoutError, SceneError};
use crate::evolution::{build_lineage, erosion_timeline, TimelineRow};
use crate::layout::{
    bundle_edges, pack_disks, stack_versions, straight_edges, union_model, Bounds, DiskLayout, LayerStack, UnionModel,
};
use crate::model::{AntipatternInstance, LineageGraph, ProjectHistory};
use crate::scene::{build_scene, export_report, scene_to_bytes, InstanceEdges, Report, SceneDocument, SceneInputs};

/// Control points may leave the root disk's bounding box by this fraction.
pub const BUNDLE_MARGIN: f64 = 0.1;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Internal(#[from] InternalError),
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error(transparent)]
    Scene(#[from] SceneError),
}

pub fn analyze(history: &ProjectHistory) -> Result<Vec<VersionAnalysis>, InternalError> {
    history.versions().par_iter().map(analyze_version).collect()
}

/// All instances of each version, cycles first.
pub fn instances_per_version(analyses: &[VersionAnalysis]) -> Vec<Vec<AntipatternInstance>> {
    analyses.iter().map(|a| a.instances().cloned().collect()).collect()
}

pub fn trace(history: &ProjectHistory, analyses: &[VersionAnalysis]) -> (LineageGraph, Vec<TimelineRow>) {
    let instances = instances_per_version(analyses);
    let lineage = build_lineage(history, &instances);
    let timeline = erosion_timeline(history, &lineage, &instances);
    (lineage, timeline)
}

pub struct SceneLayout {
    pub union: UnionModel,
    pub disks: DiskLayout,
    pub stack: LayerStack,
    pub edges: BTreeMap<String, InstanceEdges>,
}

/// Packs the union model and computes both edge variants for every instance.
pub fn lay_out(
    history: &ProjectHistory,
    analyses: &[VersionAnalysis],
    params: &PipelineParams,
) -> Result<SceneLayout, LayoutError> {
    let lp = &params.layout;
    let tables: Vec<_> = analyses.iter().map(|a| a.centrality.clone()).collect();
    let union = union_model(history, &tables)?;
    let disks = pack_disks(&union, lp)?;
    let stack = stack_versions(history, lp.layer_gap)?;
    let root = disks.root();
    let bounds = Bounds::around_disk(root.center, root.pack_radius, BUNDLE_MARGIN);

    let jobs: Vec<(usize, &AntipatternInstance)> = analyses
        .iter()
        .enumerate()
        .flat_map(|(k, a)| a.instances().map(move |i| (k, i)))
        .collect();
    let edges = jobs
        .par_iter()
        .map(|&(k, inst)| {
            let straight = straight_edges(
                inst,
                &history.versions()[k],
                &disks,
                &stack.layers[k],
                &analyses[k].centrality,
                lp,
            )?;
            let bundled = if straight.is_empty() {
                Vec::new()
            } else {
                bundle_edges(&straight, &lp.fdeb, bounds)
            };
            Ok((inst.id().to_string(), InstanceEdges { straight, bundled }))
        })
        .collect::<Result<BTreeMap<_, _>, LayoutError>>()?;
    Ok(SceneLayout {
        union,
        disks,
        stack,
        edges,
    })
}

/// Results of a full run.
pub struct PipelineOutput {
    pub analyses: Vec<VersionAnalysis>,
    pub lineage: LineageGraph,
    pub timeline: Vec<TimelineRow>,
    pub layout: SceneLayout,
}

impl PipelineOutput {
    pub fn scene(&self, history: &ProjectHistory, params: &PipelineParams) -> Result<SceneDocument, SceneError> {
        build_scene(&SceneInputs {
            history,
            analyses: &self.analyses,
            lineage: &self.lineage,
            layout: &self.layout.disks,
            stack: &self.layout.stack,
            edges: &self.layout.edges,
            params,
        })
    }

    pub fn scene_bytes(&self, history: &ProjectHistory, params: &PipelineParams) -> Result<Vec<u8>, SceneError> {
        scene_to_bytes(&self.scene(history, params)?)
    }

    pub fn report(&self, history: &ProjectHistory) -> Report {
        export_report(
            history,
            &instances_per_version(&self.analyses),
            &self.lineage,
            &self.timeline,
        )
    }
}

pub fn run(history: &ProjectHistory, params: &PipelineParams) -> Result<PipelineOutput, PipelineError> {
    let analyses = analyze(history)?;
    log::info!(
        "analyzed {} versions: {} instances",
        analyses.len(),
        analyses.iter().map(|a| a.cycles.len() + a.stk.len()).sum::<usize>()
    );
    let (lineage, timeline) = trace(history, &analyses);
    let layout = lay_out(history, &analyses, params)?;
    Ok(PipelineOutput {
        analyses,
        lineage,
        timeline,
        layout,
    })
}
