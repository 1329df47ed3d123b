use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use super::{largest_connected_component, Graph, GraphError};

/// Desk-scale random graph models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SyntheticModel {
    /// Watts–Strogatz: ring lattice with `k` neighbours per node, each edge
    /// rewired with probability `beta`.
    SmallWorld { n: usize, k: usize, beta: f64 },
    /// Barabási–Albert: each arriving node attaches `m` edges by degree.
    PreferentialAttachment { n: usize, m: usize },
    /// G(n, p).
    ErdosRenyi { n: usize, p: f64 },
}

impl SyntheticModel {
    fn validate(&self) -> Result<(), GraphError> {
        let bad = |msg: String| Err(GraphError::InvalidParams(msg));
        match *self {
            SyntheticModel::SmallWorld { n, k, beta } => {
                if n < 3 {
                    return bad(format!("small-world needs n >= 3, got {n}"));
                }
                if k < 2 || k % 2 != 0 || k >= n {
                    return bad(format!("small-world needs even k with 2 <= k < n, got k={k}"));
                }
                if !(0.0..=1.0).contains(&beta) {
                    return bad(format!("rewiring probability {beta} outside [0, 1]"));
                }
            }
            SyntheticModel::PreferentialAttachment { n, m } => {
                if n < 3 {
                    return bad(format!("preferential attachment needs n >= 3, got {n}"));
                }
                if m < 1 || m >= n {
                    return bad(format!("preferential attachment needs 1 <= m < n, got m={m}"));
                }
            }
            SyntheticModel::ErdosRenyi { n, p } => {
                if n < 3 {
                    return bad(format!("erdos-renyi needs n >= 3, got {n}"));
                }
                if !(0.0..=1.0).contains(&p) {
                    return bad(format!("edge probability {p} outside [0, 1]"));
                }
                if p * (n as f64 - 1.0) < 2.0 {
                    return bad(format!("mean degree {} below 2", p * (n as f64 - 1.0)));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for SyntheticModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SyntheticModel::SmallWorld { n, k, beta } => write!(f, "small-world:n={n},k={k},beta={beta}"),
            SyntheticModel::PreferentialAttachment { n, m } => write!(f, "pa:n={n},m={m}"),
            SyntheticModel::ErdosRenyi { n, p } => write!(f, "er:n={n},p={p}"),
        }
    }
}

/// Parses `small-world:n=2000,k=10,beta=0.1`, `pa:n=1000,m=5`, `er:n=100,p=0.05`.
impl FromStr for SyntheticModel {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |msg: String| GraphError::InvalidParams(msg);
        let (name, params) = s.split_once(':').unwrap_or((s, ""));
        let mut n = None;
        let mut k = None;
        let mut m = None;
        let mut beta = None;
        let mut p = None;
        for kv in params.split(',').filter(|kv| !kv.trim().is_empty()) {
            let (key, value) = kv
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, got {kv:?}")))?;
            let value = value.trim();
            let int = || value.parse::<usize>().map_err(|_| bad(format!("{key}: not an integer: {value:?}")));
            let real = || value.parse::<f64>().map_err(|_| bad(format!("{key}: not a number: {value:?}")));
            match key.trim() {
                "n" => n = Some(int()?),
                "k" => k = Some(int()?),
                "m" => m = Some(int()?),
                "beta" => beta = Some(real()?),
                "p" => p = Some(real()?),
                other => return Err(bad(format!("unknown parameter {other:?}"))),
            }
        }
        let need = |v: Option<usize>, key: &str| v.ok_or_else(|| bad(format!("{name} requires {key}")));
        match name.trim() {
            "small-world" | "sw" | "watts-strogatz" => Ok(SyntheticModel::SmallWorld {
                n: need(n, "n")?,
                k: need(k, "k")?,
                beta: beta.unwrap_or(0.1),
            }),
            "preferential-attachment" | "pa" | "barabasi-albert" => Ok(SyntheticModel::PreferentialAttachment {
                n: need(n, "n")?,
                m: need(m, "m")?,
            }),
            "erdos-renyi" | "er" => Ok(SyntheticModel::ErdosRenyi {
                n: need(n, "n")?,
                p: p.ok_or_else(|| bad("erdos-renyi requires p".into()))?,
            }),
            other => Err(bad(format!("unknown model {other:?}"))),
        }
    }
}

/// Generate a graph from `model`, reduced to its largest connected component.
pub fn generate_synthetic<R: Rng + ?Sized>(model: SyntheticModel, rng: &mut R) -> Result<Graph, GraphError> {
    model.validate()?;
    let g = match model {
        SyntheticModel::SmallWorld { n, k, beta } => small_world(n, k, beta, rng)?,
        SyntheticModel::PreferentialAttachment { n, m } => preferential_attachment(n, m, rng)?,
        SyntheticModel::ErdosRenyi { n, p } => erdos_renyi(n, p, rng)?,
    };
    let lcc = largest_connected_component(&g);
    if lcc.node_count() < 3 {
        return Err(GraphError::InvalidParams(format!(
            "{model} produced a largest component of only {} nodes",
            lcc.node_count()
        )));
    }
    Ok(lcc)
}

fn small_world<R: Rng + ?Sized>(n: usize, k: usize, beta: f64, rng: &mut R) -> Result<Graph, GraphError> {
    let key = |u: usize, v: usize| if u < v { (u, v) } else { (v, u) };
    let mut edges: HashSet<(usize, usize)> = HashSet::with_capacity(n * k / 2);
    let mut ordered = Vec::with_capacity(n * k / 2);
    for u in 0..n {
        for j in 1..=k / 2 {
            let e = key(u, (u + j) % n);
            edges.insert(e);
            ordered.push((u, (u + j) % n));
        }
    }
    if beta > 0.0 {
        for &(u, v) in &ordered {
            if rng.gen::<f64>() >= beta {
                continue;
            }
            // a node adjacent to everything cannot be rewired
            let current = key(u, v);
            for _ in 0..(4 * n) {
                let w = rng.gen_range(0..n);
                if w != u && !edges.contains(&key(u, w)) {
                    edges.remove(&current);
                    edges.insert(key(u, w));
                    break;
                }
            }
        }
    }
    let mut list: Vec<_> = edges.into_iter().collect();
    list.sort_unstable();
    Graph::from_edges(n, list)
}

fn preferential_attachment<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<Graph, GraphError> {
    let mut edges = Vec::with_capacity(n * m);
    // endpoint multiset: picking uniformly from it is degree-proportional
    let mut endpoints: Vec<usize> = Vec::with_capacity(2 * n * m);
    let core = m + 1;
    for u in 0..core {
        for v in u + 1..core {
            edges.push((u, v));
            endpoints.push(u);
            endpoints.push(v);
        }
    }
    let mut chosen = Vec::with_capacity(m);
    for u in core..n {
        chosen.clear();
        while chosen.len() < m {
            let t = endpoints[rng.gen_range(0..endpoints.len())];
            if !chosen.contains(&t) {
                chosen.push(t);
            }
        }
        for &t in &chosen {
            edges.push((u, t));
            endpoints.push(u);
            endpoints.push(t);
        }
    }
    Graph::from_edges(n, edges)
}

fn erdos_renyi<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<Graph, GraphError> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if p >= 1.0 || rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges)
}
