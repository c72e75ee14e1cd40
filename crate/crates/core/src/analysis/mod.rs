//! Single-version antipattern detection and severity ranking.

mod centrality;
mod scc;
mod stk;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::InternalError;
use crate::model::{assign_instance_ids, AntipatternInstance, CentralityTable, EdgeKind, VersionGraph};

pub use centrality::{betweenness, centrality_table, normalize_minmax, rank_cycle};
pub use scc::{detect_cycles, strongly_connected_components, SccPartition};
pub use stk::{
    detect_stk, detect_stk_with_witnesses, rank_stk, StkWitness, ABSTRACT_CHAIN_SEVERITY, CONCRETE_CHAIN_SEVERITY,
};

/// Index-based adjacency over a `VersionGraph`.
///
/// Node `i` is `graph.nodes()[i]`, so index order is name order and every
/// neighbor list is sorted ascending. Parallel edges of different kinds
/// collapse to one entry in `all`.
pub(crate) struct IndexedGraph<'g> {
    pub graph: &'g VersionGraph,
    pub all: Vec<Vec<usize>>,
    pub uses_out: Vec<Vec<usize>>,
    pub uses_in: Vec<Vec<usize>>,
    pub inherit_out: Vec<Vec<usize>>,
    pub inherit_in: Vec<Vec<usize>>,
}

impl<'g> IndexedGraph<'g> {
    pub fn new(graph: &'g VersionGraph) -> Self {
        let n = graph.nodes().len();
        let index: HashMap<&str, usize> = graph
            .nodes()
            .iter()
            .enumerate()
            .map(|(i, node)| (node.name.as_str(), i))
            .collect();
        let mut all = vec![Vec::new(); n];
        let mut uses_out = vec![Vec::new(); n];
        let mut uses_in = vec![Vec::new(); n];
        let mut inherit_out = vec![Vec::new(); n];
        let mut inherit_in = vec![Vec::new(); n];
        for e in graph.edges() {
            let (Some(&s), Some(&t)) = (index.get(e.source.as_str()), index.get(e.target.as_str())) else {
                continue;
            };
            if s == t {
                continue;
            }
            all[s].push(t);
            if e.kind == EdgeKind::Uses {
                uses_out[s].push(t);
                uses_in[t].push(s);
            } else {
                inherit_out[s].push(t);
                inherit_in[t].push(s);
            }
        }
        for lists in [&mut all, &mut uses_out, &mut uses_in, &mut inherit_out, &mut inherit_in] {
            for l in lists.iter_mut() {
                l.sort_unstable();
                l.dedup();
            }
        }
        Self {
            graph,
            all,
            uses_out,
            uses_in,
            inherit_out,
            inherit_in,
        }
    }

    pub fn len(&self) -> usize {
        self.all.len()
    }

    pub fn name(&self, i: usize) -> &'g str {
        &self.graph.nodes()[i].name
    }
}

/// Everything detected in one version.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VersionAnalysis {
    pub version_id: String,
    pub ordinal: usize,
    pub centrality: CentralityTable,
    pub cycles: Vec<AntipatternInstance>,
    pub stk: Vec<AntipatternInstance>,
    /// Witness chains keyed by STK instance id.
    pub stk_witnesses: Vec<(String, StkWitness)>,
}

impl VersionAnalysis {
    pub fn instances(&self) -> impl Iterator<Item = &AntipatternInstance> {
        self.cycles.iter().chain(self.stk.iter())
    }
}

/// Runs cycle and STK detection on one version and assigns instance ids.
pub fn analyze_version(graph: &VersionGraph) -> Result<VersionAnalysis, InternalError> {
    let centrality = centrality_table(graph);
    let mut cycles = detect_cycles(graph, &centrality)?;
    assign_instance_ids(&mut cycles);

    let found = detect_stk_with_witnesses(graph)?;
    let mut stk: Vec<AntipatternInstance> = Vec::with_capacity(found.len());
    let mut by_roles = HashMap::new();
    for (inst, witness) in found {
        by_roles.insert((witness.supertype.clone(), witness.subtype.clone()), witness);
        stk.push(inst);
    }
    assign_instance_ids(&mut stk);
    let stk_witnesses = stk
        .iter()
        .map(|inst| {
            let roles = inst.stk_roles().expect("stk instance has roles");
            let w = by_roles
                .remove(&(roles.supertype.clone(), roles.subtype.clone()))
                .expect("one witness per stk pair");
            (inst.id().to_string(), w)
        })
        .collect();

    Ok(VersionAnalysis {
        version_id: graph.version_id().to_string(),
        ordinal: graph.ordinal(),
        centrality,
        cycles,
        stk,
        stk_witnesses,
    })
}
