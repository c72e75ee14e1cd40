//! Subtype-knowledge detection: a supertype that reaches one of its
//! transitive subtypes through `uses` dependencies.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::IndexedGraph;
use crate::error::InternalError;
use crate::model::{AntipatternInstance, AntipatternKind, StkRoles, VersionGraph};

/// Severity of an abstract node inside the dependency chain.
pub const ABSTRACT_CHAIN_SEVERITY: f64 = 0.66;
/// Severity of a concrete node inside the dependency chain.
pub const CONCRETE_CHAIN_SEVERITY: f64 = 0.33;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StkWitness {
    pub supertype: String,
    pub subtype: String,
    /// Subtype up to supertype over extends/implements edges.
    pub inheritance_chain: Vec<String>,
    /// Supertype down to subtype over uses edges.
    pub dependency_chain: Vec<String>,
}

const UNREACHED: u32 = u32::MAX;

/// BFS distances *to* `target` following `reverse` adjacency.
fn distances_to(reverse: &[Vec<usize>], target: usize) -> Vec<u32> {
    let mut dist = vec![UNREACHED; reverse.len()];
    let mut queue = VecDeque::new();
    dist[target] = 0;
    queue.push_back(target);
    while let Some(v) = queue.pop_front() {
        for &u in &reverse[v] {
            if dist[u] == UNREACHED {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    dist
}

/// Lexicographically smallest shortest path from `from` given distances to
/// the path's end. Neighbor lists are sorted, so the first neighbor one step
/// closer is the smallest.
fn smallest_shortest_path(forward: &[Vec<usize>], dist_to_end: &[u32], from: usize) -> Vec<usize> {
    let mut path = vec![from];
    let mut cur = from;
    while dist_to_end[cur] > 0 {
        let want = dist_to_end[cur] - 1;
        cur = *forward[cur]
            .iter()
            .find(|&&w| dist_to_end[w] == want)
            .expect("a shortest-path successor exists when distance is finite");
        path.push(cur);
    }
    path
}

/// Role-based severity of one STK witness.
pub fn rank_stk(witness: &StkWitness, graph: &VersionGraph) -> BTreeMap<String, f64> {
    let mut severity: BTreeMap<String, f64> = BTreeMap::new();
    let mut raise = |name: &str, value: f64| {
        let slot = severity.entry(name.to_string()).or_insert(value);
        if value > *slot {
            *slot = value;
        }
    };
    if let [_, interior @ .., _] = witness.dependency_chain.as_slice() {
        for name in interior {
            let is_abstract = graph.node(name).is_some_and(|n| n.is_abstract);
            raise(
                name,
                if is_abstract {
                    ABSTRACT_CHAIN_SEVERITY
                } else {
                    CONCRETE_CHAIN_SEVERITY
                },
            );
        }
    }
    if let [_, interior @ .., _] = witness.inheritance_chain.as_slice() {
        for name in interior {
            raise(name, 0.0);
        }
    }
    severity.insert(witness.supertype.clone(), 1.0);
    severity.insert(witness.subtype.clone(), 0.0);
    severity
}

/// All STK pairs with their witnesses, ordered by (supertype, subtype).
pub fn detect_stk_with_witnesses(
    graph: &VersionGraph,
) -> Result<Vec<(AntipatternInstance, StkWitness)>, InternalError> {
    let ig = IndexedGraph::new(graph);
    let n = ig.len();
    let mut inherit_dist_cache: HashMap<usize, Vec<u32>> = HashMap::new();
    let mut pairs: Vec<(usize, usize, Vec<usize>, Vec<usize>)> = Vec::new();

    for sub in 0..n {
        if ig.inherit_out[sub].is_empty() {
            continue;
        }
        // Transitive supertypes of `sub`.
        let mut is_super = vec![false; n];
        let mut queue = VecDeque::from([sub]);
        let mut supers = Vec::new();
        while let Some(v) = queue.pop_front() {
            for &w in &ig.inherit_out[v] {
                if w != sub && !is_super[w] {
                    is_super[w] = true;
                    supers.push(w);
                    queue.push_back(w);
                }
            }
        }
        if supers.is_empty() {
            continue;
        }
        let uses_dist = distances_to(&ig.uses_in, sub);
        supers.sort_unstable();
        for sup in supers {
            if uses_dist[sup] == UNREACHED {
                continue;
            }
            let dependency = smallest_shortest_path(&ig.uses_out, &uses_dist, sup);
            let inherit_dist = inherit_dist_cache
                .entry(sup)
                .or_insert_with(|| distances_to(&ig.inherit_in, sup));
            let inheritance = smallest_shortest_path(&ig.inherit_out, inherit_dist, sub);
            pairs.push((sup, sub, inheritance, dependency));
        }
    }
    pairs.sort_unstable_by_key(|p| (p.0, p.1));

    pairs
        .into_iter()
        .map(|(sup, sub, inheritance, dependency)| {
            let names = |p: Vec<usize>| p.into_iter().map(|i| ig.name(i).to_string()).collect();
            let witness = StkWitness {
                supertype: ig.name(sup).to_string(),
                subtype: ig.name(sub).to_string(),
                inheritance_chain: names(inheritance),
                dependency_chain: names(dependency),
            };
            let severity = rank_stk(&witness, graph);
            let roles = StkRoles {
                supertype: witness.supertype.clone(),
                subtype: witness.subtype.clone(),
            };
            let inst = AntipatternInstance::new(AntipatternKind::Stk, graph.version_id(), severity, Some(roles))
                .map_err(|e| InternalError(e.to_string()))?;
            Ok((inst, witness))
        })
        .collect()
}

/// One STK instance per (supertype, subtype) pair. Ids are left empty.
pub fn detect_stk(graph: &VersionGraph) -> Result<Vec<AntipatternInstance>, InternalError> {
    Ok(detect_stk_with_witnesses(graph)?.into_iter().map(|(i, _)| i).collect())
}
