use std::collections::VecDeque;

use rand::Rng;

use super::InterventionError;
use crate::graph::{Graph, VisibilityView};

/// Tuning for [`partition_visible`].
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionOptions {
    /// Short walks started from every visible node.
    pub walks_per_node: usize,
    pub walk_length: usize,
    /// Split a cluster only if its best sweep cut has lower conductance.
    pub accept_conductance: f64,
    /// Clusters smaller than this are not split further.
    pub min_cluster_size: usize,
    /// Stop once this many clusters exist; `None` recurses until no cut
    /// passes the threshold.
    pub cluster_count_hint: Option<usize>,
    pub power_iterations: usize,
}

impl Default for PartitionOptions {
    fn default() -> Self {
        Self {
            walks_per_node: 8,
            walk_length: 4,
            accept_conductance: 0.3,
            min_cluster_size: 4,
            cluster_count_hint: None,
            power_iterations: 300,
        }
    }
}

/// A visible edge `(u, v)`, `u < v` in global ids, with its walk-crossing
/// frequency (crossings per walk started).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredEdge {
    pub u: usize,
    pub v: usize,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionAssignment {
    /// Cluster id per visible node, indexed by local id.
    pub cluster: Vec<usize>,
    pub cluster_count: usize,
    /// Visible edges whose endpoints lie in different clusters.
    pub cut_edges: Vec<ScoredEdge>,
    /// Every visible edge with its score, in edge order.
    pub edge_scores: Vec<ScoredEdge>,
    /// Conductance of each accepted split, in the order performed.
    pub split_conductances: Vec<f64>,
}

impl PartitionAssignment {
    /// Cluster of a global node id; `None` for non-adopters.
    pub fn cluster_of(&self, view: &VisibilityView, global: usize) -> Option<usize> {
        view.to_local(global).map(|l| self.cluster[l])
    }
}

/// CSR slot offsets of a graph, so each directed slot can carry an edge id.
fn slot_offsets(h: &Graph) -> Vec<usize> {
    let mut offsets = Vec::with_capacity(h.node_count() + 1);
    offsets.push(0);
    for u in 0..h.node_count() {
        offsets.push(offsets[u] + h.degree(u));
    }
    offsets
}

/// Lazy Metropolis step `y = M x` on a connected graph (symmetric, so the
/// stationary law is uniform).
fn metropolis_apply(h: &Graph, x: &[f64], y: &mut [f64]) {
    for i in 0..h.node_count() {
        let di = h.degree(i) as f64;
        let mut acc = 0.0;
        let mut out = 0.0;
        for &j in h.neighbors(i) {
            let p = 0.5 / di.max(h.degree(j) as f64);
            acc += p * x[j];
            out += p;
        }
        y[i] = acc + (1.0 - out) * x[i];
    }
}

fn center_and_normalize(x: &mut [f64]) -> bool {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter_mut().for_each(|v| *v -= mean);
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm <= 1e-300 {
        return false;
    }
    x.iter_mut().for_each(|v| *v /= norm);
    true
}

/// Best sweep cut over `order`: returns `(prefix length, conductance)`.
///
/// Conductance is `cut(S) / min(vol S, vol S̄)` with volumes as degree sums.
pub fn best_sweep_cut(h: &Graph, order: &[usize]) -> Option<(usize, f64)> {
    let n = h.node_count();
    let total: usize = (0..n).map(|u| h.degree(u)).sum();
    let mut inside = vec![false; n];
    let mut cut: isize = 0;
    let mut vol = 0usize;
    let mut best: Option<(usize, f64)> = None;
    for (k, &v) in order.iter().enumerate().take(n.saturating_sub(1)) {
        let already = h.neighbors(v).iter().filter(|&&w| inside[w]).count() as isize;
        cut += h.degree(v) as isize - 2 * already;
        vol += h.degree(v);
        inside[v] = true;
        let denom = vol.min(total - vol);
        if denom == 0 {
            continue;
        }
        let phi = cut as f64 / denom as f64;
        if best.is_none_or(|(_, b)| phi < b) {
            best = Some((k + 1, phi));
        }
    }
    best
}

/// Split the visible subgraph into clusters separated by low-conductance cuts.
///
/// 1. From every visible node, `walks_per_node` short Metropolis walks
///    (`min(1/dᵢ, 1/dⱼ)` moves) record how often each edge is crossed and
///    which nodes each start co-visits.
/// 2. A random projection of the co-visit counts seeds power iteration on
///    each cluster's lazy Metropolis chain, deflated against the uniform
///    stationary vector, approximating the second eigenvector.
/// 3. The best sweep cut over that vector splits the cluster when its
///    conductance is below the threshold. Clusters are processed FIFO, the
///    connected components of each side re-queued.
///
/// Components of a disconnected visible graph are clustered independently.
pub fn partition_visible<R: Rng + ?Sized>(
    view: &VisibilityView,
    options: &PartitionOptions,
    rng: &mut R,
) -> Result<PartitionAssignment, InterventionError> {
    let h = view.visible_graph();
    let n = h.node_count();
    if n < 2 {
        return Err(InterventionError::TooSmallToPartition(n));
    }

    let offsets = slot_offsets(h);
    let mut edge_of_slot = vec![usize::MAX; offsets[n]];
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(h.edge_count());
    for u in 0..n {
        for (k, &v) in h.neighbors(u).iter().enumerate() {
            if u < v {
                edge_of_slot[offsets[u] + k] = edges.len();
                edges.push((u, v));
            }
        }
    }
    for u in 0..n {
        for (k, &v) in h.neighbors(u).iter().enumerate() {
            if v < u {
                let back = h.neighbors(v).binary_search(&u).expect("undirected adjacency");
                edge_of_slot[offsets[u] + k] = edge_of_slot[offsets[v] + back];
            }
        }
    }

    let sign: Vec<f64> = (0..n).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect();
    let mut crossings = vec![0u64; edges.len()];
    let mut projection = vec![0.0; n];
    for (start, proj) in projection.iter_mut().enumerate() {
        for _ in 0..options.walks_per_node {
            let mut at = start;
            for _ in 0..options.walk_length {
                let d = h.degree(at);
                if d == 0 {
                    break;
                }
                let k = rng.gen_range(0..d);
                let next = h.neighbors(at)[k];
                let accept = d as f64 / h.degree(next) as f64;
                if accept >= 1.0 || rng.gen::<f64>() < accept {
                    crossings[edge_of_slot[offsets[at] + k]] += 1;
                    at = next;
                }
                *proj += sign[at];
            }
        }
    }
    let walks = (n * options.walks_per_node).max(1) as f64;
    let edge_scores: Vec<ScoredEdge> = edges
        .iter()
        .zip(&crossings)
        .map(|(&(a, b), &c)| ScoredEdge {
            u: view.to_global(a),
            v: view.to_global(b),
            score: c as f64 / walks,
        })
        .collect();

    let mut cluster = vec![usize::MAX; n];
    let mut cluster_count = 0;
    let mut split_conductances = Vec::new();
    let mut queue: VecDeque<Vec<usize>> = h.components().into();
    while let Some(members) = queue.pop_front() {
        let total_now = cluster_count + queue.len() + 1;
        let hint_reached = options.cluster_count_hint.is_some_and(|k| total_now >= k);
        let split = if hint_reached || members.len() < options.min_cluster_size.max(2) {
            None
        } else {
            try_split(h, &members, &projection, options)
        };
        match split {
            Some((side_a, side_b, phi)) => {
                split_conductances.push(phi);
                for side in [side_a, side_b] {
                    let sub = h.induced_subgraph(&side);
                    for comp in sub.components() {
                        queue.push_back(comp.iter().map(|&i| side[i]).collect());
                    }
                }
            }
            None => {
                for &u in &members {
                    cluster[u] = cluster_count;
                }
                cluster_count += 1;
            }
        }
    }

    let cut_edges = edges
        .iter()
        .zip(&edge_scores)
        .filter(|(&(a, b), _)| cluster[a] != cluster[b])
        .map(|(_, &e)| e)
        .collect();
    Ok(PartitionAssignment {
        cluster,
        cluster_count,
        cut_edges,
        edge_scores,
        split_conductances,
    })
}

/// Sweep cut of one connected cluster; `Some((S, S̄, φ))` when `φ` passes.
fn try_split(
    h: &Graph,
    members: &[usize],
    projection: &[f64],
    options: &PartitionOptions,
) -> Option<(Vec<usize>, Vec<usize>, f64)> {
    let sub = h.induced_subgraph(members);
    let m = sub.node_count();
    let mut x: Vec<f64> = members.iter().map(|&u| projection[u]).collect();
    if !center_and_normalize(&mut x) {
        x = (0..m).map(|i| i as f64).collect();
        center_and_normalize(&mut x);
    }
    let mut y = vec![0.0; m];
    for _ in 0..options.power_iterations {
        metropolis_apply(&sub, &x, &mut y);
        std::mem::swap(&mut x, &mut y);
        if !center_and_normalize(&mut x) {
            return None;
        }
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(a.cmp(&b)));
    let (k, phi) = best_sweep_cut(&sub, &order)?;
    if phi >= options.accept_conductance {
        return None;
    }
    let mut side_a: Vec<usize> = order[..k].iter().map(|&i| members[i]).collect();
    let mut side_b: Vec<usize> = order[k..].iter().map(|&i| members[i]).collect();
    side_a.sort_unstable();
    side_b.sort_unstable();
    Some((side_a, side_b, phi))
}
