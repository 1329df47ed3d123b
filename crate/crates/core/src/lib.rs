//! Epidemic spreading on proximity graphs.
//!
//! The crate is organised around the pieces of an intervention study:
//!
//! * [`graph`] loads SNAP edge lists, builds synthetic stand-ins and samples
//!   the responder's partial view of the contact graph.
//! * [`sim`] runs round-based random-walk spreading with permanent isolation.
//! * [`metrics`] holds the entropy-based transmission potential together with
//!   the Markov-chain quantities (stationary law, mixing distance, spectral gap).
//! * [`interventions`] plans isolations for the null response, contact
//!   tracing, super-spreader and super-link strategies.
//! * [`mpc`] simulates several health agencies computing walks over their
//!   joint graph without sharing it (PSI, label assignment, secure sums and
//!   Paillier-encrypted matrix-vector products).
//! * [`harness`] drives parameter sweeps and writes CSV/SVG output.
//!
//! Trial-level Monte Carlo work runs on rayon when the `parallel` feature is
//! enabled (the default); without it every parallel entry point falls back
//! to a sequential loop with identical results.

pub mod graph;
pub mod harness;
pub mod interventions;
pub mod metrics;
pub mod mpc;
pub mod par;
pub mod rng;
pub mod sim;

pub use graph::{Graph, GraphError, VisibilityView};
pub use interventions::{InterventionPlan, Strategy};
pub use sim::{EpidemicState, TrialResult};

/// `⌈fraction · n⌉`, robust to the representation error of decimal fractions
/// such as `0.1` (so `0.1 · 1000` yields 100, not 101).
pub fn ceil_fraction(fraction: f64, n: usize) -> usize {
    let raw = fraction * n as f64;
    let nearest = raw.round();
    let v = if (raw - nearest).abs() <= 1e-9 * raw.abs().max(1.0) {
        nearest
    } else {
        raw.ceil()
    };
    (v.max(0.0) as usize).min(n)
}
