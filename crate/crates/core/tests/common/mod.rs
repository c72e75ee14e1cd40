//! Generators, fixtures and brute-force oracles shared by the integration
//! tests. Oracles work on plain adjacency matrices and never call into the
//! implementation under test.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use erosion_core::model::{assign_instance_ids, StkRoles};
use erosion_core::{
    AntipatternInstance, AntipatternKind, CentralityTable, DependencyEdge, EdgeKind, ProjectHistory, TypeKind,
    TypeNode, VersionGraph,
};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn node_name(i: usize) -> String {
    format!("n{i:03}")
}

/// Random `uses` digraph with the given edge probability.
pub fn random_uses_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> VersionGraph {
    let nodes = (0..n).map(|i| TypeNode::class(node_name(i))).collect();
    let mut edges = Vec::new();
    for s in 0..n {
        for t in 0..n {
            if s != t && rng.random_bool(p) {
                edges.push(DependencyEdge::new(node_name(s), node_name(t), EdgeKind::Uses));
            }
        }
    }
    VersionGraph::new("v0", 0, nodes, edges)
}

/// Random typed graph whose inheritance edges respect declaration kinds.
pub fn random_typed_graph(rng: &mut ChaCha8Rng, n: usize, p_uses: f64, p_inherit: f64) -> VersionGraph {
    let kinds: Vec<TypeKind> = (0..n)
        .map(|_| {
            if rng.random_bool(0.3) {
                TypeKind::Interface
            } else {
                TypeKind::Class
            }
        })
        .collect();
    let nodes = (0..n)
        .map(|i| {
            let is_abstract = kinds[i] == TypeKind::Interface || rng.random_bool(0.3);
            TypeNode::new(node_name(i), kinds[i], is_abstract)
        })
        .collect();
    let mut edges = Vec::new();
    for s in 0..n {
        for t in 0..n {
            if s == t {
                continue;
            }
            if rng.random_bool(p_uses) {
                edges.push(DependencyEdge::new(node_name(s), node_name(t), EdgeKind::Uses));
            }
            if rng.random_bool(p_inherit) {
                let kind = match (kinds[s], kinds[t]) {
                    (TypeKind::Class, TypeKind::Class) | (TypeKind::Interface, TypeKind::Interface) => {
                        EdgeKind::Extends
                    }
                    (TypeKind::Class, TypeKind::Interface) => EdgeKind::Implements,
                    _ => continue,
                };
                edges.push(DependencyEdge::new(node_name(s), node_name(t), kind));
            }
        }
    }
    VersionGraph::new("v0", 0, nodes, edges)
}

/// Boolean adjacency over a graph's nodes (index = sorted name order),
/// restricted to the given edge kinds.
pub fn adjacency(graph: &VersionGraph, kinds: &[EdgeKind]) -> Vec<Vec<bool>> {
    let names: Vec<&str> = graph.nodes().iter().map(|n| n.name.as_str()).collect();
    let idx = |s: &str| names.iter().position(|n| *n == s).unwrap();
    let n = names.len();
    let mut adj = vec![vec![false; n]; n];
    for e in graph.edges() {
        if kinds.contains(&e.kind) {
            adj[idx(&e.source)][idx(&e.target)] = true;
        }
    }
    adj
}

/// Floyd–Warshall transitive closure (paths of length >= 1).
pub fn closure(adj: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = adj.len();
    let mut r = adj.to_vec();
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                let via = r[k].clone();
                for (dst, reach) in r[i].iter_mut().zip(via) {
                    *dst |= reach;
                }
            }
        }
    }
    r
}

pub const ALL_KINDS: [EdgeKind; 3] = [EdgeKind::Extends, EdgeKind::Implements, EdgeKind::Uses];

/// Mutual-reachability classes, members sorted, classes ordered by smallest member.
pub fn scc_oracle(graph: &VersionGraph) -> Vec<Vec<String>> {
    let names: Vec<String> = graph.nodes().iter().map(|n| n.name.clone()).collect();
    let reach = closure(&adjacency(graph, &ALL_KINDS));
    let n = names.len();
    let mut assigned = vec![false; n];
    let mut out = Vec::new();
    for i in 0..n {
        if assigned[i] {
            continue;
        }
        let mut class = vec![names[i].clone()];
        assigned[i] = true;
        for j in i + 1..n {
            if !assigned[j] && reach[i][j] && reach[j][i] {
                assigned[j] = true;
                class.push(names[j].clone());
            }
        }
        out.push(class);
    }
    out
}

/// All-pairs BFS distances and shortest-path counts.
fn bfs_counts(adj: &[Vec<bool>], s: usize) -> (Vec<Option<usize>>, Vec<f64>) {
    let n = adj.len();
    let mut dist = vec![None; n];
    let mut sigma = vec![0.0; n];
    dist[s] = Some(0);
    sigma[s] = 1.0;
    let mut q = VecDeque::from([s]);
    while let Some(v) = q.pop_front() {
        let dv = dist[v].unwrap();
        for w in 0..n {
            if !adj[v][w] {
                continue;
            }
            match dist[w] {
                None => {
                    dist[w] = Some(dv + 1);
                    sigma[w] = sigma[v];
                    q.push_back(w);
                }
                Some(dw) if dw == dv + 1 => sigma[w] += sigma[v],
                _ => {}
            }
        }
    }
    (dist, sigma)
}

/// Naive betweenness: for each ordered pair (s, t) and each interior v on a
/// shortest path, add sigma_sv * sigma_vt / sigma_st.
pub fn betweenness_oracle(graph: &VersionGraph) -> BTreeMap<String, f64> {
    let adj = adjacency(graph, &ALL_KINDS);
    let n = adj.len();
    let all: Vec<_> = (0..n).map(|s| bfs_counts(&adj, s)).collect();
    let mut cb = vec![0.0; n];
    for s in 0..n {
        for t in 0..n {
            if s == t {
                continue;
            }
            let Some(dst) = all[s].0[t] else { continue };
            let sigma_st = all[s].1[t];
            for v in 0..n {
                if v == s || v == t {
                    continue;
                }
                if let (Some(dsv), Some(dvt)) = (all[s].0[v], all[v].0[t]) {
                    if dsv + dvt == dst {
                        cb[v] += all[s].1[v] * all[v].1[t] / sigma_st;
                    }
                }
            }
        }
    }
    graph.nodes().iter().map(|n| n.name.clone()).zip(cb).collect()
}

/// Sum over ordered reachable pairs of the expected number of interior
/// vertices on a uniformly chosen shortest path, i.e. (d(s,t) - 1).
pub fn betweenness_total_oracle(graph: &VersionGraph) -> f64 {
    let adj = adjacency(graph, &ALL_KINDS);
    let n = adj.len();
    let mut total = 0.0;
    for s in 0..n {
        let (dist, _) = bfs_counts(&adj, s);
        for (t, d) in dist.iter().enumerate() {
            if let (true, Some(d)) = (t != s, d) {
                total += (*d as f64) - 1.0;
            }
        }
    }
    total
}

/// Every (supertype, subtype) pair with T reaching S by inheritance and S
/// reaching T by uses.
pub fn stk_oracle(graph: &VersionGraph) -> BTreeSet<(String, String)> {
    let names: Vec<String> = graph.nodes().iter().map(|n| n.name.clone()).collect();
    let inh = closure(&adjacency(graph, &[EdgeKind::Extends, EdgeKind::Implements]));
    let uses = closure(&adjacency(graph, &[EdgeKind::Uses]));
    let mut out = BTreeSet::new();
    for s in 0..names.len() {
        for t in 0..names.len() {
            if s != t && inh[t][s] && uses[s][t] {
                out.insert((names[s].clone(), names[t].clone()));
            }
        }
    }
    out
}

/// Shortest path length over the given edge kinds, by BFS on the matrix.
pub fn shortest_len(graph: &VersionGraph, kinds: &[EdgeKind], from: &str, to: &str) -> Option<usize> {
    let names: Vec<&str> = graph.nodes().iter().map(|n| n.name.as_str()).collect();
    let idx = |s: &str| names.iter().position(|n| *n == s).unwrap();
    let (dist, _) = bfs_counts(&adjacency(graph, kinds), idx(from));
    dist[idx(to)]
}

pub fn has_edge(graph: &VersionGraph, from: &str, to: &str, kinds: &[EdgeKind]) -> bool {
    graph
        .edges()
        .iter()
        .any(|e| e.source == from && e.target == to && kinds.contains(&e.kind))
}

/// Brute-force lineage matcher: every same-kind pair between consecutive
/// versions with 2·|a∩b| >= |a| or 2·|a∩b| >= |b|.
pub fn lineage_oracle(instances: &[Vec<AntipatternInstance>]) -> BTreeSet<(String, String, usize)> {
    let mut out = BTreeSet::new();
    for k in 1..instances.len() {
        for a in &instances[k - 1] {
            for b in &instances[k] {
                if a.kind() != b.kind() {
                    continue;
                }
                let mut inter = 0;
                for m in a.members() {
                    for o in b.members() {
                        if m == o {
                            inter += 1;
                        }
                    }
                }
                if inter > 0 && (2 * inter >= a.len() || 2 * inter >= b.len()) {
                    out.insert((a.id().to_string(), b.id().to_string(), inter));
                }
            }
        }
    }
    out
}

pub fn cycle_instance(version: &str, members: &[&str]) -> AntipatternInstance {
    let sev = members.iter().map(|m| (m.to_string(), 0.0)).collect();
    AntipatternInstance::new(AntipatternKind::Cycle, version, sev, None).unwrap()
}

/// Random per-version instance lists over a small universe.
pub fn random_instances(
    rng: &mut ChaCha8Rng,
    versions: usize,
    max_per_version: usize,
) -> Vec<Vec<AntipatternInstance>> {
    let universe: Vec<String> = (0..12).map(|i| format!("t{i:02}")).collect();
    (0..versions)
        .map(|k| {
            let vid = format!("v{k}");
            let count = rng.random_range(0..=max_per_version);
            let mut list: Vec<AntipatternInstance> = (0..count)
                .map(|_| {
                    let size = rng.random_range(2..=6);
                    let members: Vec<&String> = universe.choose_multiple(rng, size).collect();
                    if rng.random_bool(0.7) {
                        let sev = members.iter().map(|m| (m.to_string(), 0.0)).collect();
                        AntipatternInstance::new(AntipatternKind::Cycle, &vid, sev, None).unwrap()
                    } else {
                        let mut sev: BTreeMap<String, f64> = members.iter().map(|m| (m.to_string(), 0.33)).collect();
                        sev.insert(members[0].clone(), 1.0);
                        sev.insert(members[1].clone(), 0.0);
                        let roles = StkRoles {
                            supertype: members[0].clone(),
                            subtype: members[1].clone(),
                        };
                        AntipatternInstance::new(AntipatternKind::Stk, &vid, sev, Some(roles)).unwrap()
                    }
                })
                .collect();
            // Ids are assigned per kind.
            let (mut cycles, mut stk): (Vec<_>, Vec<_>) =
                list.drain(..).partition(|i| i.kind() == AntipatternKind::Cycle);
            assign_instance_ids(&mut cycles);
            assign_instance_ids(&mut stk);
            cycles.extend(stk);
            cycles
        })
        .collect()
}

pub fn history_of_names(versions: &[Vec<String>]) -> ProjectHistory {
    let graphs = versions
        .iter()
        .enumerate()
        .map(|(k, names)| VersionGraph::new(format!("v{k}"), k, names.iter().map(TypeNode::class).collect(), vec![]))
        .collect();
    ProjectHistory::new("fixture", graphs).unwrap()
}

/// Random package hierarchy of up to `max_classes` classes and `max_depth`
/// package levels over `versions` versions, with random presence and random
/// normalized centrality tables.
pub fn random_hierarchy(
    rng: &mut ChaCha8Rng,
    max_classes: usize,
    max_depth: usize,
    versions: usize,
) -> (ProjectHistory, Vec<CentralityTable>) {
    let n = rng.random_range(1..=max_classes);
    let mut packages: Vec<Vec<String>> = vec![vec![]];
    let n_packages = rng.random_range(1..=(n / 4).max(1));
    for p in 0..n_packages {
        let parent = packages.choose(rng).unwrap().clone();
        if parent.len() < max_depth {
            let mut path = parent;
            path.push(format!("p{p}"));
            packages.push(path);
        }
    }
    let names: Vec<String> = (0..n)
        .map(|i| {
            let pkg = packages.choose(rng).unwrap();
            let mut segs = pkg.clone();
            segs.push(format!("C{i}"));
            segs.join(".")
        })
        .collect();
    let mut graphs = Vec::new();
    let mut tables = Vec::new();
    for k in 0..versions {
        let present: Vec<&String> = names.iter().filter(|_| rng.random_bool(0.85)).collect();
        let vid = format!("v{k}");
        let normalized: BTreeMap<String, f64> = present.iter().map(|n| (n.to_string(), rng.random::<f64>())).collect();
        tables.push(CentralityTable {
            version_id: vid.clone(),
            raw: normalized.clone(),
            normalized,
        });
        graphs.push(VersionGraph::new(
            vid,
            k,
            present.into_iter().map(TypeNode::class).collect(),
            vec![],
        ));
    }
    (ProjectHistory::new("random", graphs).unwrap(), tables)
}

/// Synthetic project: `types` types in a package tree, `versions` versions
/// with light churn, one large cycle of `cycle_size` members and a handful of
/// subtype-knowledge motifs.
pub fn synthetic_project(seed: u64, types: usize, versions: usize, cycle_size: usize) -> ProjectHistory {
    let mut rng = rng(seed);
    let packages: Vec<String> = (0..40)
        .map(|p| {
            let depth = 1 + p % 4;
            (0..depth)
                .map(|d| format!("pk{}", (p + d) % 9))
                .collect::<Vec<_>>()
                .join(".")
        })
        .collect();
    let names: Vec<String> = (0..types)
        .map(|i| format!("org.synth.{}.T{i:04}", packages[i % packages.len()]))
        .collect();
    let kinds: Vec<TypeKind> = (0..types)
        .map(|i| {
            if i % 7 == 3 {
                TypeKind::Interface
            } else {
                TypeKind::Class
            }
        })
        .collect();
    let is_abstract: Vec<bool> = (0..types)
        .map(|i| kinds[i] == TypeKind::Interface || i % 5 == 0)
        .collect();

    // Base edges: uses edges point from higher to lower index (acyclic), plus
    // a ring with chords over the first `cycle_size` types.
    let mut base: BTreeSet<(usize, usize, EdgeKind)> = BTreeSet::new();
    for s in 1..types {
        let fan_out = if s < cycle_size { 1 } else { 4 };
        for _ in 0..fan_out {
            let t = rng.random_range(0..s);
            base.insert((s, t, EdgeKind::Uses));
        }
        if rng.random_bool(0.3) {
            let t = rng.random_range(0..s);
            let kind = match (kinds[s], kinds[t]) {
                (TypeKind::Class, TypeKind::Class) | (TypeKind::Interface, TypeKind::Interface) => {
                    Some(EdgeKind::Extends)
                }
                (TypeKind::Class, TypeKind::Interface) => Some(EdgeKind::Implements),
                _ => None,
            };
            if let Some(kind) = kind {
                base.insert((s, t, kind));
            }
        }
    }
    for i in 0..cycle_size {
        base.insert((i, (i + 1) % cycle_size, EdgeKind::Uses));
        if i % 3 == 0 {
            base.insert((i, rng.random_range(0..cycle_size), EdgeKind::Uses));
        }
    }
    // Supertype-uses-subtype motifs outside the ring.
    for m in 0..8 {
        let sup = cycle_size + 10 + m * 20;
        let sub = sup + 5;
        if sub < types && kinds[sup] == kinds[sub] {
            base.insert((sub, sup, EdgeKind::Extends));
            base.insert((sup, sub, EdgeKind::Uses));
        }
    }

    let mut graphs = Vec::new();
    for k in 0..versions {
        // Drop ~2% of non-ring types per version, deterministically per seed.
        let removed: BTreeSet<usize> = (cycle_size..types).filter(|i| (i * 31 + k * 17) % 50 == 0).collect();
        let nodes: Vec<TypeNode> = (0..types)
            .filter(|i| !removed.contains(i))
            .map(|i| TypeNode::new(names[i].clone(), kinds[i], is_abstract[i]))
            .collect();
        let edges: Vec<DependencyEdge> = base
            .iter()
            .filter(|(s, t, _)| s != t && !removed.contains(s) && !removed.contains(t))
            .map(|&(s, t, kind)| DependencyEdge::new(names[s].clone(), names[t].clone(), kind))
            .collect();
        graphs.push(VersionGraph::new(format!("{}.{}.0", 1 + k / 4, k % 4), k, nodes, edges));
    }
    ProjectHistory::new("synthetic", graphs).unwrap()
}

/// Two-version toy project with one 3-cycle in each version.
pub fn toy_project() -> ProjectHistory {
    let nodes = || {
        vec![
            TypeNode::class("app.core.Engine"),
            TypeNode::class("app.core.Registry"),
            TypeNode::class("app.ui.View"),
            TypeNode::interface("app.api.Service"),
            TypeNode::class("app.api.ServiceImpl"),
        ]
    };
    let edges = |extra: bool| {
        let mut e = vec![
            DependencyEdge::new("app.core.Engine", "app.core.Registry", EdgeKind::Uses),
            DependencyEdge::new("app.core.Registry", "app.ui.View", EdgeKind::Uses),
            DependencyEdge::new("app.ui.View", "app.core.Engine", EdgeKind::Uses),
            DependencyEdge::new("app.api.ServiceImpl", "app.api.Service", EdgeKind::Implements),
        ];
        if extra {
            e.push(DependencyEdge::new("app.ui.View", "app.api.Service", EdgeKind::Uses));
        }
        e
    };
    ProjectHistory::new(
        "toy",
        vec![
            VersionGraph::new("1.0", 0, nodes(), edges(false)),
            VersionGraph::new("1.1", 1, nodes(), edges(true)),
        ],
    )
    .unwrap()
}

/// Graph of four types where one 4-cycle becomes two 2-cycles (`split`) or
/// the reverse (`!split`).
pub fn split_merge_history(split: bool) -> ProjectHistory {
    let nodes = || {
        ["a", "b", "c", "d"]
            .iter()
            .map(|n| TypeNode::class(format!("p.{n}")))
            .collect::<Vec<_>>()
    };
    let e = |s: &str, t: &str| DependencyEdge::new(format!("p.{s}"), format!("p.{t}"), EdgeKind::Uses);
    let big = vec![e("a", "b"), e("b", "c"), e("c", "d"), e("d", "a")];
    let pair = vec![e("a", "b"), e("b", "a"), e("c", "d"), e("d", "c")];
    let (first, second) = if split { (big, pair) } else { (pair, big) };
    ProjectHistory::new(
        "fig",
        vec![
            VersionGraph::new("v0", 0, nodes(), first),
            VersionGraph::new("v1", 1, nodes(), second),
        ],
    )
    .unwrap()
}

pub fn shuffle<T>(rng: &mut ChaCha8Rng, v: &mut [T]) {
    v.shuffle(rng);
}
