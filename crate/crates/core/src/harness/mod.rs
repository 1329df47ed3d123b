//! Experiment orchestration: configuration, V × Q × strategy sweeps,
//! CSV/SVG output, graph analysis and the multi-agency demo.

mod analyze;
mod config;
mod csv;
mod plot;
pub mod stats;
mod sweep;

use std::path::PathBuf;

use thiserror::Error;

use crate::graph::GraphError;
use crate::interventions::InterventionError;
use crate::metrics::MetricsError;
use crate::mpc::MpcError;
use crate::sim::SimError;

pub use analyze::{analyze_graph, mpc_demo, AnalysisReport};
pub use config::{load_graph, parse_key_values, ExperimentConfig, GraphSource, DEFAULT_BUDGETS, DEFAULT_VISIBILITIES};
pub use csv::{emit_csv, parse_csv, SweepRow, CSV_HEADER};
pub use plot::{emit_plot, write_plots};
pub use sweep::{run_sweep, run_sweep_with, CellKey, CellResult, SweepResult};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("graph: {0}")]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Mpc(#[from] MpcError),
    #[error("output: {0}")]
    Write(#[from] std::io::Error),
}

impl From<InterventionError> for HarnessError {
    fn from(e: InterventionError) -> Self {
        HarnessError::Sim(SimError::Intervention(e))
    }
}

impl HarnessError {
    /// 1 validation, 2 I/O, 3 numeric or protocol failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Validation(_) => 1,
            HarnessError::Io { .. } | HarnessError::Write(_) => 2,
            HarnessError::Graph(GraphError::InvalidParams(_)) => 1,
            HarnessError::Graph(_) => 2,
            HarnessError::Mpc(MpcError::Headroom { .. } | MpcError::TooManySteps(_) | MpcError::KeyBits(_)) => 1,
            HarnessError::Mpc(MpcError::TooFewParties { .. } | MpcError::Encoding(_)) => 1,
            HarnessError::Sim(SimError::TooManySeeds { .. } | SimError::NoSeeds | SimError::InvalidFraction(_)) => 1,
            HarnessError::Sim(SimError::Intervention(InterventionError::InvalidBudget(_) | InterventionError::UnknownStrategy(_))) => 1,
            HarnessError::Sim(_) | HarnessError::Metrics(_) | HarnessError::Mpc(_) => 3,
        }
    }
}
