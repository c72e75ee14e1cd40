//! Brandes betweenness centrality and min-max normalization.

use std::collections::{BTreeMap, VecDeque};

use rayon::prelude::*;

use super::IndexedGraph;
use crate::error::InternalError;
use crate::model::{CentralityTable, VersionGraph};

/// Fixed source-chunk size; partial sums are merged in chunk order so the
/// result does not depend on the worker count.
const SOURCE_CHUNK: usize = 64;

/// Single-source dependency accumulation, added into `acc`.
fn accumulate_from(adj: &[Vec<usize>], s: usize, ws: &mut Workspace, acc: &mut [f64]) {
    ws.reset();
    let Workspace {
        sigma,
        dist,
        delta,
        preds,
        order,
        queue,
    } = ws;
    sigma[s] = 1.0;
    dist[s] = 0;
    queue.push_back(s);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        let dv = dist[v];
        for &w in &adj[v] {
            if dist[w] < 0 {
                dist[w] = dv + 1;
                queue.push_back(w);
            }
            if dist[w] == dv + 1 {
                sigma[w] += sigma[v];
                preds[w].push(v);
            }
        }
    }
    for &w in order.iter().rev() {
        let coeff = (1.0 + delta[w]) / sigma[w];
        for &v in &preds[w] {
            delta[v] += sigma[v] * coeff;
        }
        if w != s {
            acc[w] += delta[w];
        }
    }
}

struct Workspace {
    sigma: Vec<f64>,
    dist: Vec<i64>,
    delta: Vec<f64>,
    preds: Vec<Vec<usize>>,
    order: Vec<usize>,
    queue: VecDeque<usize>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Self {
            sigma: vec![0.0; n],
            dist: vec![-1; n],
            delta: vec![0.0; n],
            preds: vec![Vec::new(); n],
            order: Vec::with_capacity(n),
            queue: VecDeque::with_capacity(n),
        }
    }

    fn reset(&mut self) {
        for &v in &self.order {
            self.sigma[v] = 0.0;
            self.dist[v] = -1;
            self.delta[v] = 0.0;
            self.preds[v].clear();
        }
        self.order.clear();
        self.queue.clear();
    }
}

/// Directed, unweighted betweenness over index adjacency.
pub(crate) fn brandes(adj: &[Vec<usize>]) -> Vec<f64> {
    let n = adj.len();
    let sources: Vec<usize> = (0..n).collect();
    let partials: Vec<Vec<f64>> = sources
        .par_chunks(SOURCE_CHUNK)
        .map(|chunk| {
            let mut ws = Workspace::new(n);
            let mut acc = vec![0.0; n];
            for &s in chunk {
                accumulate_from(adj, s, &mut ws, &mut acc);
            }
            acc
        })
        .collect();
    let mut total = vec![0.0; n];
    for part in partials {
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    total
}

/// Raw betweenness for every node, all edge kinds traversed uniformly.
pub fn betweenness(graph: &VersionGraph) -> BTreeMap<String, f64> {
    let ig = IndexedGraph::new(graph);
    brandes(&ig.all)
        .into_iter()
        .enumerate()
        .map(|(i, v)| (ig.name(i).to_string(), v))
        .collect()
}

/// `(v - min) / (max - min)`, or all zeros when every value is equal.
pub fn normalize_minmax(raw: &BTreeMap<String, f64>) -> BTreeMap<String, f64> {
    let min = raw.values().copied().fold(f64::INFINITY, f64::min);
    let max = raw.values().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = max - min;
    raw.iter()
        .map(|(k, &v)| {
            let norm = if span > 0.0 {
                ((v - min) / span).clamp(0.0, 1.0)
            } else {
                0.0
            };
            (k.clone(), norm)
        })
        .collect()
}

pub fn centrality_table(graph: &VersionGraph) -> CentralityTable {
    let raw = betweenness(graph);
    let normalized = normalize_minmax(&raw);
    CentralityTable {
        version_id: graph.version_id().to_string(),
        raw,
        normalized,
    }
}

/// Cycle severity: each member's graph-wide normalized centrality.
pub fn rank_cycle<S: AsRef<str>>(
    members: &[S],
    table: &CentralityTable,
) -> Result<BTreeMap<String, f64>, InternalError> {
    members
        .iter()
        .map(|m| {
            let m = m.as_ref();
            table.normalized.get(m).map(|&v| (m.to_string(), v)).ok_or_else(|| {
                InternalError(format!(
                    "member {m} missing from centrality table of {}",
                    table.version_id
                ))
            })
        })
        .collect()
}
