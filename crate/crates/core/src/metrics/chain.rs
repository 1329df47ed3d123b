use std::collections::VecDeque;

use super::{transmission_potential, MetricsError, ProbabilityVector, VectorKind};
use crate::graph::Graph;
use crate::par::{fill_indexed, Execution};

/// Off-diagonal transition rule of a walk on an undirected graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkVariant {
    /// `P(i→j) = 1/dᵢ`.
    Standard,
    /// `P(i→j) = min(1/dᵢ, 1/dⱼ)`, residual mass kept as a self-loop.
    Metropolis,
}

/// Sparse row-stochastic matrix, stored by rows and by columns.
#[derive(Debug, Clone)]
pub struct TransitionMatrix {
    variant: WalkVariant,
    lazy: bool,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    col_ptr: Vec<usize>,
    rows: Vec<usize>,
    col_vals: Vec<f64>,
}

impl TransitionMatrix {
    pub fn standard(g: &Graph) -> Self {
        Self::build(g, WalkVariant::Standard)
    }

    pub fn metropolis(g: &Graph) -> Self {
        Self::build(g, WalkVariant::Metropolis)
    }

    pub fn new(g: &Graph, variant: WalkVariant) -> Self {
        Self::build(g, variant)
    }

    fn build(g: &Graph, variant: WalkVariant) -> Self {
        let n = g.node_count();
        let mut triples: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
        for i in 0..n {
            let d = g.degree(i);
            let mut row = Vec::with_capacity(d + 1);
            if d == 0 {
                row.push((i, 1.0));
                triples.push(row);
                continue;
            }
            let mut off = 0.0;
            for &j in g.neighbors(i) {
                let p = match variant {
                    WalkVariant::Standard => 1.0 / d as f64,
                    WalkVariant::Metropolis => 1.0 / d.max(g.degree(j)) as f64,
                };
                off += p;
                row.push((j, p));
            }
            if variant == WalkVariant::Metropolis {
                let stay = 1.0 - off;
                if stay > 0.0 {
                    row.push((i, stay));
                }
            }
            row.sort_unstable_by_key(|&(j, _)| j);
            triples.push(row);
        }
        Self::from_rows(variant, false, triples)
    }

    fn from_rows(variant: WalkVariant, lazy: bool, rows_in: Vec<Vec<(usize, f64)>>) -> Self {
        let n = rows_in.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut col_count = vec![0usize; n];
        row_ptr.push(0);
        for row in &rows_in {
            for &(j, p) in row {
                cols.push(j);
                vals.push(p);
                col_count[j] += 1;
            }
            row_ptr.push(cols.len());
        }
        let mut col_ptr = Vec::with_capacity(n + 1);
        col_ptr.push(0);
        for c in &col_count {
            col_ptr.push(col_ptr.last().unwrap() + c);
        }
        let mut fill = col_ptr.clone();
        let mut rows = vec![0; cols.len()];
        let mut col_vals = vec![0.0; cols.len()];
        for i in 0..n {
            for k in row_ptr[i]..row_ptr[i + 1] {
                let j = cols[k];
                rows[fill[j]] = i;
                col_vals[fill[j]] = vals[k];
                fill[j] += 1;
            }
        }
        Self {
            variant,
            lazy,
            row_ptr,
            cols,
            vals,
            col_ptr,
            rows,
            col_vals,
        }
    }

    /// `½I + ½P`.
    pub fn lazy(&self) -> Self {
        if self.lazy {
            return self.clone();
        }
        let n = self.states();
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let mut row: Vec<(usize, f64)> = self.row(i).map(|(j, p)| (j, 0.5 * p)).collect();
            match row.iter_mut().find(|(j, _)| *j == i) {
                Some(entry) => entry.1 += 0.5,
                None => {
                    row.push((i, 0.5));
                    row.sort_unstable_by_key(|&(j, _)| j);
                }
            }
            rows.push(row);
        }
        Self::from_rows(self.variant, true, rows)
    }

    pub fn states(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn variant(&self) -> WalkVariant {
        self.variant
    }

    pub fn is_lazy(&self) -> bool {
        self.lazy
    }

    /// Non-zero entries `(j, P[i][j])` of row `i`, ascending `j`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |k| (self.cols[k], self.vals[k]))
    }

    /// Non-zero entries `(i, P[i][j])` of column `j`, ascending `i`.
    pub fn column(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.col_ptr[j]..self.col_ptr[j + 1]).map(move |k| (self.rows[k], self.col_vals[k]))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let slice = &self.cols[self.row_ptr[i]..self.row_ptr[i + 1]];
        match slice.binary_search(&j) {
            Ok(k) => self.vals[self.row_ptr[i] + k],
            Err(_) => 0.0,
        }
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.row(i).map(|(_, p)| p).sum()
    }

    /// One step `out = q P`, computed column by column in a fixed order.
    pub fn left_multiply(&self, q: &[f64], out: &mut [f64], exec: Execution) {
        fill_indexed(out, exec, |j| self.column(j).map(|(i, p)| q[i] * p).sum());
    }

    /// Whether every state reaches every other through non-zero entries.
    pub fn is_irreducible(&self) -> bool {
        let n = self.states();
        if n == 0 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = queue.pop_front() {
            for (j, p) in self.row(i) {
                if p > 0.0 && !seen[j] {
                    seen[j] = true;
                    count += 1;
                    queue.push_back(j);
                }
            }
        }
        count == n
    }
}

/// `q(t) = q(0) Pᵗ`.
pub fn power_iterate(q0: &ProbabilityVector, p: &TransitionMatrix, t: usize) -> Result<ProbabilityVector, MetricsError> {
    let n = p.states();
    if q0.len() != n {
        return Err(MetricsError::DimensionMismatch {
            vector: q0.len(),
            matrix: n,
        });
    }
    let mut cur = q0.entries().to_vec();
    let mut next = vec![0.0; n];
    for _ in 0..t {
        p.left_multiply(&cur, &mut next, Execution::Ambient);
        std::mem::swap(&mut cur, &mut next);
    }
    ProbabilityVector::new(cur, VectorKind::WalkState)
}

#[derive(Debug, Clone, Copy)]
pub struct StationaryOptions {
    /// Stop once successive lazy iterates differ by at most this (L∞).
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Largest `‖πP − π‖∞` accepted when the iteration cap is hit.
    pub accept_residual: f64,
}

impl Default for StationaryOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-14,
            max_iterations: 2_000_000,
            accept_residual: 1e-10,
        }
    }
}

/// Stationary law of `p`, by power iteration on the lazy chain from the
/// uniform vector. The lazy chain has the same stationary law and converges
/// on bipartite graphs too.
pub fn stationary_distribution(p: &TransitionMatrix) -> Result<ProbabilityVector, MetricsError> {
    stationary_distribution_with(p, StationaryOptions::default())
}

pub fn stationary_distribution_with(
    p: &TransitionMatrix,
    opts: StationaryOptions,
) -> Result<ProbabilityVector, MetricsError> {
    let n = p.states();
    if !p.is_irreducible() {
        return Err(MetricsError::Disconnected);
    }
    let lazy = p.lazy();
    let mut cur = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    let mut iterations = 0;
    while iterations < opts.max_iterations {
        lazy.left_multiply(&cur, &mut next, Execution::Ambient);
        iterations += 1;
        let delta = cur
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        std::mem::swap(&mut cur, &mut next);
        if delta <= opts.tolerance {
            break;
        }
    }
    let mass: f64 = cur.iter().sum();
    cur.iter_mut().for_each(|x| *x /= mass);
    p.left_multiply(&cur, &mut next, Execution::Ambient);
    let residual = cur
        .iter()
        .zip(&next)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if residual > opts.accept_residual {
        return Err(MetricsError::NonConvergence { residual, iterations });
    }
    ProbabilityVector::new(cur, VectorKind::Stationary)
}

/// Stationary law from detailed balance (`πⱼ = πᵢ Pᵢⱼ / Pⱼᵢ` along a BFS
/// tree). Exact up to rounding for reversible chains, which covers every
/// walk built from an undirected graph; falls back to
/// [`stationary_distribution`] otherwise.
pub fn reversible_stationary(p: &TransitionMatrix) -> Result<ProbabilityVector, MetricsError> {
    let n = p.states();
    if !p.is_irreducible() {
        return Err(MetricsError::Disconnected);
    }
    let mut pi = vec![0.0; n];
    pi[0] = 1.0;
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut queue = VecDeque::from([0]);
    while let Some(i) = queue.pop_front() {
        for (j, pij) in p.row(i) {
            if !seen[j] && pij > 0.0 {
                let pji = p.get(j, i);
                if pji <= 0.0 {
                    return stationary_distribution(p);
                }
                pi[j] = pi[i] * pij / pji;
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    let mass: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|x| *x /= mass);
    let mut next = vec![0.0; n];
    p.left_multiply(&pi, &mut next, Execution::Ambient);
    let residual = pi.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    if residual > 1e-12 {
        return stationary_distribution(p);
    }
    ProbabilityVector::new(pi, VectorKind::Stationary)
}

/// `Δ = maxᵢ |qᵢ − πᵢ| / πᵢ`.
pub fn relative_pointwise_distance(q: &ProbabilityVector, pi: &ProbabilityVector) -> Result<f64, MetricsError> {
    if q.len() != pi.len() {
        return Err(MetricsError::DimensionMismatch {
            vector: q.len(),
            matrix: pi.len(),
        });
    }
    let mut worst: f64 = 0.0;
    for (index, (&qi, &pii)) in q.entries().iter().zip(pi.entries()).enumerate() {
        if pii <= 0.0 {
            return Err(MetricsError::ZeroStationaryMass { index });
        }
        worst = worst.max((qi - pii).abs() / pii);
    }
    Ok(worst)
}

/// Potential of the stationary law of the standard walk on `g`.
/// Requires a connected graph.
pub fn network_max_potential(g: &Graph) -> Result<f64, MetricsError> {
    let pi = reversible_stationary(&TransitionMatrix::standard(g))?;
    transmission_potential(pi.entries(), g.node_count())
}
