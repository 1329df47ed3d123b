use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::HarnessError;
use crate::graph::{generate_synthetic, largest_connected_component, load_edge_list_file, Graph, LoadOptions, SyntheticModel};
use crate::interventions::Strategy;
use crate::metrics::PotentialMode;
use crate::rng::mix64;
use crate::sim::{DrawRule, SeedSpec};

pub const DEFAULT_VISIBILITIES: [f64; 4] = [0.10, 0.35, 0.60, 0.85];
pub const DEFAULT_BUDGETS: [f64; 5] = [0.05, 0.15, 0.25, 0.35, 0.45];

#[derive(Debug, Clone, PartialEq)]
pub enum GraphSource {
    /// SNAP-style edge list.
    File(PathBuf),
    Synthetic(SyntheticModel),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub graph: GraphSource,
    pub strategies: Vec<Strategy>,
    pub visibility: Vec<f64>,
    pub budget: Vec<f64>,
    pub rounds: u32,
    pub trials: usize,
    pub seed: u64,
    pub seeds: SeedSpec,
    pub metric_mode: PotentialMode,
    pub draw: DrawRule,
    /// 0 = rayon default, 1 = sequential.
    pub workers: usize,
    /// Restrict edge-list loading to the largest connected component.
    pub largest_component: bool,
    pub out: Option<PathBuf>,
    /// Directory for one SVG per strategy.
    pub plot: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Desk-scale defaults on the given graph.
    pub fn new(graph: GraphSource) -> Self {
        Self {
            graph,
            strategies: Strategy::ALL.to_vec(),
            visibility: DEFAULT_VISIBILITIES.to_vec(),
            budget: DEFAULT_BUDGETS.to_vec(),
            rounds: 20,
            trials: 1000,
            seed: 1,
            seeds: SeedSpec::Fraction(0.01),
            metric_mode: PotentialMode::default(),
            draw: DrawRule::default(),
            workers: 0,
            largest_component: false,
            out: None,
            plot: None,
        }
    }

    /// Build from `key = value` pairs, reporting every problem at once.
    pub fn from_pairs(pairs: &BTreeMap<String, String>) -> Result<Self, HarnessError> {
        let mut errors = Vec::new();
        let graph = match (pairs.get("graph"), pairs.get("synthetic")) {
            (Some(_), Some(_)) => {
                errors.push("give either graph or synthetic, not both".to_string());
                None
            }
            (Some(path), None) => Some(GraphSource::File(PathBuf::from(path))),
            (None, Some(spec)) => match spec.parse::<SyntheticModel>() {
                Ok(m) => Some(GraphSource::Synthetic(m)),
                Err(e) => {
                    errors.push(format!("synthetic: {e}"));
                    None
                }
            },
            (None, None) => {
                errors.push("a graph source is required (graph = FILE or synthetic = SPEC)".to_string());
                None
            }
        };
        let mut cfg = Self::new(graph.clone().unwrap_or(GraphSource::File(PathBuf::new())));

        for (key, value) in pairs {
            let value = value.trim();
            let mut bad = |msg: String| errors.push(format!("{key}: {msg}"));
            match key.as_str() {
                "graph" | "synthetic" => {}
                "strategy" | "strategies" => {
                    let parsed: Result<Vec<Strategy>, _> = value.split(',').map(|s| s.trim().parse()).collect();
                    match parsed {
                        Ok(v) if !v.is_empty() => cfg.strategies = v,
                        Ok(_) => bad("empty list".into()),
                        Err(e) => bad(e.to_string()),
                    }
                }
                "visibility" | "budget" => match parse_list(value) {
                    Ok(v) if v.is_empty() => bad("empty list".into()),
                    Ok(v) => {
                        if let Some(x) = v.iter().find(|x| !(0.0..=1.0).contains(*x)) {
                            bad(format!("{x} outside [0, 1]"));
                        }
                        if key == "visibility" {
                            cfg.visibility = v;
                        } else {
                            cfg.budget = v;
                        }
                    }
                    Err(e) => bad(e),
                },
                "rounds" => match value.parse::<u32>() {
                    Ok(0) => bad("must be at least 1".into()),
                    Ok(r) => cfg.rounds = r,
                    Err(_) => bad(format!("not a positive integer: {value:?}")),
                },
                "trials" => match value.parse::<usize>() {
                    Ok(0) => bad("must be at least 1".into()),
                    Ok(t) => cfg.trials = t,
                    Err(_) => bad(format!("not a positive integer: {value:?}")),
                },
                "seed" => match value.parse::<u64>() {
                    Ok(s) => cfg.seed = s,
                    Err(_) => bad(format!("not an unsigned integer: {value:?}")),
                },
                "seed-count" => match value.parse::<usize>() {
                    Ok(0) => bad("must be at least 1".into()),
                    Ok(c) => cfg.seeds = SeedSpec::Count(c),
                    Err(_) => bad(format!("not a positive integer: {value:?}")),
                },
                "seed-fraction" => match value.parse::<f64>() {
                    Ok(f) if f > 0.0 && f <= 1.0 => cfg.seeds = SeedSpec::Fraction(f),
                    _ => bad(format!("expected a fraction in (0, 1], got {value:?}")),
                },
                "metric-mode" => match value.parse::<PotentialMode>() {
                    Ok(m) => cfg.metric_mode = m,
                    Err(e) => bad(e),
                },
                "draw-susceptible-only" => match parse_bool(value) {
                    Some(true) => cfg.draw = DrawRule::SusceptibleOnly,
                    Some(false) => cfg.draw = DrawRule::AllNeighbors,
                    None => bad(format!("expected true/false, got {value:?}")),
                },
                "largest-component" => match parse_bool(value) {
                    Some(b) => cfg.largest_component = b,
                    None => bad(format!("expected true/false, got {value:?}")),
                },
                "workers" => match value.parse::<usize>() {
                    Ok(w) => cfg.workers = w,
                    Err(_) => bad(format!("not an unsigned integer: {value:?}")),
                },
                "out" => cfg.out = Some(PathBuf::from(value)),
                "plot" => cfg.plot = Some(PathBuf::from(value)),
                other => bad(format!("unknown key {other:?}")),
            }
        }
        if pairs.contains_key("seed-count") && pairs.contains_key("seed-fraction") {
            errors.push("give either seed-count or seed-fraction, not both".to_string());
        }
        if errors.is_empty() {
            Ok(cfg)
        } else {
            Err(HarnessError::Validation(errors))
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let mut errors = Vec::new();
        for (name, list) in [("visibility", &self.visibility), ("budget", &self.budget)] {
            if list.is_empty() {
                errors.push(format!("{name}: empty list"));
            }
            for x in list.iter().filter(|x| !(0.0..=1.0).contains(*x)) {
                errors.push(format!("{name}: {x} outside [0, 1]"));
            }
        }
        if self.rounds == 0 {
            errors.push("rounds: must be at least 1".into());
        }
        if self.trials == 0 {
            errors.push("trials: must be at least 1".into());
        }
        if self.strategies.is_empty() {
            errors.push("strategy: empty list".into());
        }
        if let SeedSpec::Fraction(f) = self.seeds {
            if !(f > 0.0 && f <= 1.0) {
                errors.push(format!("seed-fraction: {f} outside (0, 1]"));
            }
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(HarnessError::Validation(errors))
        }
    }
}

fn parse_bool(s: &str) -> Option<bool> {
    match s {
        "true" | "yes" | "1" | "on" => Some(true),
        "false" | "no" | "0" | "off" => Some(false),
        _ => None,
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| format!("not a number: {t:?}")))
        .collect()
}

/// Parse a flat `key = value` file. `#` starts a comment; blank lines are
/// skipped. Later keys override earlier ones.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>, HarnessError> {
    let mut out = BTreeMap::new();
    let mut errors = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match line.split_once('=') {
            Some((k, v)) if !k.trim().is_empty() => {
                out.insert(k.trim().to_string(), v.trim().to_string());
            }
            _ => errors.push(format!("line {}: expected key = value, got {raw:?}", i + 1)),
        }
    }
    if errors.is_empty() {
        Ok(out)
    } else {
        Err(HarnessError::Validation(errors))
    }
}

/// Load or generate the configured graph. Synthetic graphs are seeded from
/// the master seed so a config fully determines the run.
pub fn load_graph(source: &GraphSource, seed: u64, largest_component: bool) -> Result<Graph, HarnessError> {
    match source {
        GraphSource::File(path) => {
            let g = load_file(path)?;
            Ok(if largest_component { largest_connected_component(&g) } else { g })
        }
        GraphSource::Synthetic(model) => {
            let mut rng = ChaCha8Rng::seed_from_u64(mix64(seed ^ 0x0067_7261_7068));
            Ok(generate_synthetic(*model, &mut rng)?)
        }
    }
}

fn load_file(path: &Path) -> Result<Graph, HarnessError> {
    load_edge_list_file(path, LoadOptions::default()).map_err(|e| match e {
        crate::graph::GraphError::Io(source) => HarnessError::Io {
            path: path.to_path_buf(),
            source,
        },
        other => HarnessError::Graph(other),
    })
}
