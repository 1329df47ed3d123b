use rand::seq::index;
use rand::Rng;

use super::Graph;
use crate::ceil_fraction;

/// The responder's partial view of the contact graph: a set of adopters and
/// the encounters between them.
///
/// Visible edges are the edges of the full graph induced on the adopter set;
/// an encounter is only recorded when both parties are adopters. The induced
/// subgraph is stored compactly with local ids `0..adopters.len()`, ordered
/// like the (sorted) adopter list.
#[derive(Debug, Clone)]
pub struct VisibilityView {
    visibility: f64,
    adopters: Vec<usize>,
    local: Vec<usize>,
    visible: Graph,
}

const NOT_ADOPTER: usize = usize::MAX;

impl VisibilityView {
    /// View from an explicit adopter set.
    pub fn from_adopters(g: &Graph, adopters: &[usize], visibility: f64) -> Self {
        let mut adopters = adopters.to_vec();
        adopters.sort_unstable();
        adopters.dedup();
        let mut local = vec![NOT_ADOPTER; g.node_count()];
        for (i, &u) in adopters.iter().enumerate() {
            local[u] = i;
        }
        let visible = g.induced_subgraph(&adopters);
        Self {
            visibility,
            adopters,
            local,
            visible,
        }
    }

    /// Everyone visible.
    pub fn full(g: &Graph) -> Self {
        let all: Vec<usize> = (0..g.node_count()).collect();
        Self::from_adopters(g, &all, 1.0)
    }

    pub fn visibility(&self) -> f64 {
        self.visibility
    }

    /// Population size of the underlying graph.
    pub fn population(&self) -> usize {
        self.local.len()
    }

    /// Sorted adopter ids (global).
    pub fn adopters(&self) -> &[usize] {
        &self.adopters
    }

    pub fn is_adopter(&self, u: usize) -> bool {
        self.local[u] != NOT_ADOPTER
    }

    /// The induced subgraph in local ids.
    pub fn visible_graph(&self) -> &Graph {
        &self.visible
    }

    pub fn to_global(&self, local: usize) -> usize {
        self.adopters[local]
    }

    pub fn to_local(&self, global: usize) -> Option<usize> {
        match self.local[global] {
            NOT_ADOPTER => None,
            l => Some(l),
        }
    }

    pub fn visible_degree(&self, global: usize) -> usize {
        self.to_local(global).map_or(0, |l| self.visible.degree(l))
    }

    /// Visible neighbours of an adopter, ascending global ids.
    pub fn visible_neighbors(&self, global: usize) -> impl Iterator<Item = usize> + '_ {
        let list: &[usize] = match self.to_local(global) {
            Some(l) => self.visible.neighbors(l),
            None => &[],
        };
        list.iter().map(move |&l| self.adopters[l])
    }

    pub fn visible_edge_count(&self) -> usize {
        self.visible.edge_count()
    }

    /// Visible edges in global ids, `(u, v)` with `u < v`.
    pub fn visible_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.visible
            .edges()
            .map(move |(a, b)| (self.adopters[a], self.adopters[b]))
    }
}

/// Choose `⌈v·N⌉` adopters uniformly without replacement.
pub fn sample_visibility<R: Rng + ?Sized>(g: &Graph, v: f64, rng: &mut R) -> VisibilityView {
    assert!((0.0..=1.0).contains(&v), "visibility {v} outside [0, 1]");
    let n = g.node_count();
    let k = ceil_fraction(v, n);
    let adopters = if k == n {
        (0..n).collect()
    } else {
        index::sample(rng, n, k).into_vec()
    };
    VisibilityView::from_adopters(g, &adopters, v)
}
