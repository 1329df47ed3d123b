//! Undirected proximity graphs.
//!
//! [`Graph`] is an immutable compressed adjacency structure over dense node
//! ids `0..N`. Each node keeps the identifier it had in the source file
//! ([`Graph::original_id`]) so reports can refer back to the input.

mod load;
mod synth;
mod view;

use std::collections::VecDeque;

use thiserror::Error;

pub use load::{load_edge_list, load_edge_list_file, LoadOptions};
pub use synth::{generate_synthetic, SyntheticModel};
pub use view::{sample_visibility, VisibilityView};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("line {line}: self-loop on node {node}")]
    SelfLoop { line: usize, node: u64 },
    #[error("graph has no nodes")]
    Empty,
    #[error("graph has no edges")]
    NoEdges,
    #[error("node id {id} out of range for {n} nodes")]
    NodeOutOfRange { id: usize, n: usize },
    #[error("invalid synthetic model parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    edge_count: usize,
    original_ids: Vec<u64>,
}

impl Graph {
    /// Build from an edge iterator over nodes `0..n`. Duplicate edges (in
    /// either direction) collapse and self-loops are dropped.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::from_edges_with_ids(edges, (0..n as u64).collect())
    }

    /// As [`Graph::from_edges`], carrying one original identifier per node.
    pub fn from_edges_with_ids<I>(edges: I, original_ids: Vec<u64>) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let n = original_ids.len();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (u, v) in edges {
            for id in [u, v] {
                if id >= n {
                    return Err(GraphError::NodeOutOfRange { id, n });
                }
            }
            if u != v {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            targets.extend_from_slice(list);
            offsets.push(targets.len());
        }
        let edge_count = targets.len() / 2;
        Ok(Self {
            offsets,
            targets,
            edge_count,
            original_ids,
        })
    }

    pub fn node_count(&self) -> usize {
        self.original_ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    /// Sorted neighbour ids.
    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    pub fn original_id(&self, u: usize) -> u64 {
        self.original_ids[u]
    }

    pub fn original_ids(&self) -> &[u64] {
        &self.original_ids
    }

    pub fn max_degree(&self) -> usize {
        (0..self.node_count()).map(|u| self.degree(u)).max().unwrap_or(0)
    }

    pub fn mean_degree(&self) -> f64 {
        if self.node_count() == 0 {
            0.0
        } else {
            2.0 * self.edge_count as f64 / self.node_count() as f64
        }
    }

    /// Connected components, each sorted ascending, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut comp = Vec::new();
            while let Some(u) = queue.pop_front() {
                comp.push(u);
                for &v in self.neighbors(u) {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.node_count() > 0 && self.components().len() == 1
    }

    /// Bipartiteness check by BFS two-colouring.
    pub fn is_bipartite(&self) -> bool {
        let n = self.node_count();
        let mut colour = vec![u8::MAX; n];
        let mut queue = VecDeque::new();
        for s in 0..n {
            if colour[s] != u8::MAX {
                continue;
            }
            colour[s] = 0;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for &v in self.neighbors(u) {
                    if colour[v] == u8::MAX {
                        colour[v] = 1 - colour[u];
                        queue.push_back(v);
                    } else if colour[v] == colour[u] {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Subgraph induced on `nodes` (any order), re-indexed `0..nodes.len()` in
    /// ascending order of the given ids. Original identifiers carry over.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Graph {
        let mut keep: Vec<usize> = nodes.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let mut local = vec![usize::MAX; self.node_count()];
        for (i, &u) in keep.iter().enumerate() {
            local[u] = i;
        }
        let mut offsets = Vec::with_capacity(keep.len() + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for &u in &keep {
            // neighbour lists stay sorted because `local` is monotone
            targets.extend(
                self.neighbors(u)
                    .iter()
                    .filter(|&&v| local[v] != usize::MAX)
                    .map(|&v| local[v]),
            );
            offsets.push(targets.len());
        }
        let edge_count = targets.len() / 2;
        Graph {
            offsets,
            targets,
            edge_count,
            original_ids: keep.iter().map(|&u| self.original_ids[u]).collect(),
        }
    }
}

/// Degree counts and the degree-proportional probability vector `dᵢ / 2|E|`.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    pub degrees: Vec<usize>,
    pub probabilities: Vec<f64>,
}

pub fn degree_distribution(g: &Graph) -> Result<DegreeDistribution, GraphError> {
    if g.edge_count() == 0 {
        return Err(GraphError::NoEdges);
    }
    let total = 2.0 * g.edge_count() as f64;
    let degrees: Vec<usize> = (0..g.node_count()).map(|u| g.degree(u)).collect();
    let probabilities = degrees.iter().map(|&d| d as f64 / total).collect();
    Ok(DegreeDistribution {
        degrees,
        probabilities,
    })
}

/// The largest connected component, re-indexed. Ties go to the component
/// containing the smallest original id.
pub fn largest_connected_component(g: &Graph) -> Graph {
    let comps = g.components();
    let best = comps.iter().max_by(|a, b| {
        a.len().cmp(&b.len()).then_with(|| {
            let min_a = a.iter().map(|&u| g.original_id(u)).min();
            let min_b = b.iter().map(|&u| g.original_id(u)).min();
            // reversed: smaller original id should compare as "greater"
            min_b.cmp(&min_a)
        })
    });
    match best {
        Some(c) if c.len() == g.node_count() => g.clone(),
        Some(c) => g.induced_subgraph(c),
        None => g.clone(),
    }
}
