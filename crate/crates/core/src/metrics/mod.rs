//! Information-theoretic and spectral measures of spreading.

mod bounds;
mod chain;
mod potential;
mod spectral;

use thiserror::Error;

pub use bounds::{chain_containment_probability, full_visibility_bound};
pub use chain::{
    network_max_potential, power_iterate, relative_pointwise_distance, reversible_stationary, stationary_distribution,
    stationary_distribution_with, StationaryOptions, TransitionMatrix, WalkVariant,
};
pub use potential::{
    bernoulli_potential, infection_probabilities, transmission_potential, uniform_support_potential,
    PotentialMode, PotentialSeries,
};
pub use spectral::{eigenvalue_gap, eigenvalue_gap_with, SpectralGap};

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("population size {0} too small for a normalised potential (need at least 2)")]
    PopulationTooSmall(usize),
    #[error("entry {index} = {value} is not a probability")]
    InvalidEntry { index: usize, value: f64 },
    #[error("entries sum to {sum}, expected {expected}")]
    BadMass { sum: f64, expected: &'static str },
    #[error("dimension mismatch: vector has {vector} entries, matrix has {matrix} states")]
    DimensionMismatch { vector: usize, matrix: usize },
    #[error("stationary mass of state {index} is zero")]
    ZeroStationaryMass { index: usize },
    #[error("power iteration did not converge: residual {residual:e} after {iterations} iterations")]
    NonConvergence { residual: f64, iterations: usize },
    #[error("chain is not irreducible (underlying graph disconnected)")]
    Disconnected,
    #[error("no trials supplied")]
    NoTrials,
    #[error("parameter {name} = {value} outside its domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },
}

/// What a probability vector describes; decides which mass invariant applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VectorKind {
    /// Per-node likelihood of infection; no constraint on the total.
    InfectionLikelihood,
    /// Walk state `q(t)`; sums to one.
    WalkState,
    /// Stationary law `π`; sums to one.
    Stationary,
}

const ENTRY_SLACK: f64 = 1e-12;
const MASS_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector {
    entries: Vec<f64>,
    kind: VectorKind,
}

impl ProbabilityVector {
    pub fn new(entries: Vec<f64>, kind: VectorKind) -> Result<Self, MetricsError> {
        for (index, &value) in entries.iter().enumerate() {
            if !(-ENTRY_SLACK..=1.0 + ENTRY_SLACK).contains(&value) {
                return Err(MetricsError::InvalidEntry { index, value });
            }
        }
        if kind != VectorKind::InfectionLikelihood {
            let sum: f64 = entries.iter().sum();
            if (sum - 1.0).abs() > MASS_SLACK {
                return Err(MetricsError::BadMass {
                    sum,
                    expected: "1 ± 1e-9",
                });
            }
        }
        Ok(Self { entries, kind })
    }

    pub fn point_mass(n: usize, at: usize) -> Self {
        let mut entries = vec![0.0; n];
        entries[at] = 1.0;
        Self {
            entries,
            kind: VectorKind::WalkState,
        }
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            entries: vec![1.0 / n as f64; n],
            kind: VectorKind::WalkState,
        }
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<f64> {
        self.entries
    }

    pub fn kind(&self) -> VectorKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.entries.iter().sum()
    }
}
