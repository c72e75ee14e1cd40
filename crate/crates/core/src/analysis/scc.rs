//! Tarjan's strongly connected components and cycle instances.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{rank_cycle, IndexedGraph};
use crate::error::InternalError;
use crate::model::{AntipatternInstance, AntipatternKind, CentralityTable, VersionGraph};

/// Partition of a graph's nodes into strongly connected components.
///
/// Members inside a component are sorted; components are ordered by their
/// smallest member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SccPartition {
    pub components: Vec<Vec<String>>,
}

const UNVISITED: usize = usize::MAX;

/// Iterative Tarjan over index adjacency. Returns components as sorted
/// index lists, ordered by smallest index.
pub(crate) fn tarjan(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    // (node, next neighbor position)
    let mut call: Vec<(usize, usize)> = Vec::new();
    let mut next_index = 0usize;
    let mut components = Vec::new();

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        call.push((root, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if let Some(&w) = adj[v].get(*pos) {
                *pos += 1;
                if index[w] == UNVISITED {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                components.push(comp);
            }
        }
    }
    components.sort_unstable_by_key(|c| c[0]);
    components
}

/// Exact SCC partition over all edge kinds.
pub fn strongly_connected_components(graph: &VersionGraph) -> SccPartition {
    let ig = IndexedGraph::new(graph);
    let components = tarjan(&ig.all)
        .into_iter()
        .map(|c| c.into_iter().map(|i| ig.name(i).to_string()).collect())
        .collect();
    SccPartition { components }
}

/// One cycle instance per non-trivial SCC, ranked by graph-wide normalized
/// betweenness. Ids are left empty.
pub fn detect_cycles(
    graph: &VersionGraph,
    centrality: &CentralityTable,
) -> Result<Vec<AntipatternInstance>, InternalError> {
    strongly_connected_components(graph)
        .components
        .into_iter()
        .filter(|c| c.len() >= 2)
        .map(|members| {
            let severity: BTreeMap<String, f64> = rank_cycle(&members, centrality)?;
            AntipatternInstance::new(AntipatternKind::Cycle, graph.version_id(), severity, None)
                .map_err(|e| InternalError(e.to_string()))
        })
        .collect()
}
