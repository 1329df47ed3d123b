use super::{ExperimentConfig, HarnessError};
use crate::graph::{sample_visibility, Graph};
use crate::interventions::Strategy;
use crate::metrics::{bernoulli_potential, uniform_support_potential, PotentialMode, PotentialSeries};
use crate::par::{map_indexed, Execution};
use crate::rng::TrialRng;
use crate::sim::{run_trial, TrialParams, NEVER};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellKey {
    pub strategy: Strategy,
    pub visibility: f64,
    pub budget: f64,
}

/// Aggregate of all trials of one (strategy, V, Q) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub key: CellKey,
    /// Potential per round `0..=rounds`.
    pub series: PotentialSeries,
    pub mean_infected_fraction: Vec<f64>,
    /// Per-trial potential `log₂|I| / log₂ N` after the last round.
    pub final_potentials: Vec<f64>,
    /// Per-trial round after which spreading had stopped.
    pub terminated: Vec<Option<u32>>,
    /// Index cases and their direct secondary infections, summed over trials.
    pub index_cases: u64,
    pub secondary_infections: u64,
    /// Largest isolated count seen in any round of any trial.
    pub max_isolated: usize,
    pub budget_cap: usize,
}

impl CellResult {
    /// Fraction of trials in which spreading had stopped by round `r`.
    pub fn stopped_by(&self, r: u32) -> f64 {
        let hits = self.terminated.iter().filter(|t| t.is_some_and(|x| x <= r)).count();
        hits as f64 / self.terminated.len() as f64
    }

    pub fn r0(&self) -> Option<f64> {
        (self.index_cases > 0).then(|| self.secondary_infections as f64 / self.index_cases as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub cells: Vec<CellResult>,
    pub trials: usize,
    pub seed: u64,
    pub rounds: u32,
    pub population: usize,
    pub metric_mode: PotentialMode,
}

impl SweepResult {
    pub fn cell(&self, strategy: Strategy, visibility: f64, budget: f64) -> Option<&CellResult> {
        self.cells.iter().find(|c| {
            c.key.strategy == strategy && (c.key.visibility - visibility).abs() < 1e-12 && (c.key.budget - budget).abs() < 1e-12
        })
    }
}

struct TrialSummary {
    potentials: Vec<f64>,
    infected_fraction: Vec<f64>,
    infection_round: Option<Vec<u32>>,
    terminated: Option<u32>,
    index_cases: u64,
    secondary: u64,
    max_isolated: usize,
    budget_cap: usize,
}

const CHUNK: usize = 256;

/// Run every (strategy, V, Q) cell with the configured worker count.
pub fn run_sweep(g: &Graph, cfg: &ExperimentConfig) -> Result<SweepResult, HarnessError> {
    let exec = match cfg.workers {
        0 => Execution::Ambient,
        w => Execution::from_workers(w),
    };
    run_sweep_with(g, cfg, exec)
}

/// Trial `t` of every cell uses the generators of `(seed, t)`, so cells
/// share seeding and spreading randomness (common random numbers) and the
/// result does not depend on how trials are scheduled. Trials run in
/// chunks through [`map_indexed`]; reduction is sequential in trial order.
pub fn run_sweep_with(g: &Graph, cfg: &ExperimentConfig, exec: Execution) -> Result<SweepResult, HarnessError> {
    cfg.validate()?;
    let n = g.node_count();
    let rounds = cfg.rounds as usize;
    let mut cells = Vec::new();
    for &strategy in &cfg.strategies {
        for &visibility in &cfg.visibility {
            for &budget in &cfg.budget {
                let key = CellKey {
                    strategy,
                    visibility,
                    budget,
                };
                cells.push(run_cell(g, cfg, key, exec, n, rounds)?);
            }
        }
    }
    Ok(SweepResult {
        cells,
        trials: cfg.trials,
        seed: cfg.seed,
        rounds: cfg.rounds,
        population: n,
        metric_mode: cfg.metric_mode,
    })
}

fn run_cell(
    g: &Graph,
    cfg: &ExperimentConfig,
    key: CellKey,
    exec: Execution,
    n: usize,
    rounds: usize,
) -> Result<CellResult, HarnessError> {
    let params = TrialParams {
        rounds: cfg.rounds,
        seeds: cfg.seeds,
        draw: cfg.draw,
        budget: key.budget,
    };
    let keep_rounds = cfg.metric_mode == PotentialMode::Bernoulli;
    let one_trial = |t: usize| -> Result<TrialSummary, HarnessError> {
        let mut rng = TrialRng::new(cfg.seed, t as u64);
        let view = sample_visibility(g, key.visibility, &mut rng.visibility);
        let r = run_trial(g, key.strategy, &view, &params, &mut rng)?;
        Ok(TrialSummary {
            potentials: r.infected_count.iter().map(|&c| uniform_support_potential(c, n)).collect(),
            infected_fraction: r.infected_fraction.clone(),
            terminated: r.terminated,
            index_cases: r.index_case_secondary_counts.len() as u64,
            secondary: r.index_case_secondary_counts.iter().map(|&c| c as u64).sum(),
            max_isolated: r.isolated_count.iter().copied().max().unwrap_or(0),
            budget_cap: r.budget_cap,
            infection_round: keep_rounds.then_some(r.infection_round),
        })
    };

    let mut per_trial = Vec::with_capacity(cfg.trials);
    let mut fraction_sum = vec![0.0; rounds + 1];
    let mut terminated = Vec::with_capacity(cfg.trials);
    let (mut index_cases, mut secondary, mut max_isolated, mut budget_cap) = (0u64, 0u64, 0usize, 0usize);
    // newly[r][u]: trials in which u got infected in round r
    let mut newly = if keep_rounds { vec![vec![0u32; n]; rounds + 1] } else { Vec::new() };

    let mut start = 0;
    while start < cfg.trials {
        let len = CHUNK.min(cfg.trials - start);
        let batch = map_indexed(len, exec, |i| one_trial(start + i));
        for s in batch {
            let s = s?;
            for (acc, x) in fraction_sum.iter_mut().zip(&s.infected_fraction) {
                *acc += x;
            }
            if let Some(ir) = &s.infection_round {
                for (u, &r) in ir.iter().enumerate() {
                    if r != NEVER {
                        newly[r as usize][u] += 1;
                    }
                }
            }
            terminated.push(s.terminated);
            index_cases += s.index_cases;
            secondary += s.secondary;
            max_isolated = max_isolated.max(s.max_isolated);
            budget_cap = s.budget_cap;
            per_trial.push(s.potentials);
        }
        start += len;
    }

    let trials = cfg.trials as f64;
    let series = match cfg.metric_mode {
        PotentialMode::Distribution => PotentialSeries::from_trials(&per_trial)?,
        PotentialMode::Bernoulli => {
            let mut cumulative = vec![0u32; n];
            let mut values = Vec::with_capacity(rounds + 1);
            for row in &newly {
                for (c, &x) in cumulative.iter_mut().zip(row) {
                    *c += x;
                }
                let marginals: Vec<f64> = cumulative.iter().map(|&c| c as f64 / trials).collect();
                values.push(bernoulli_potential(&marginals)?);
            }
            PotentialSeries::constant(values, cfg.trials)
        }
    };
    Ok(CellResult {
        key,
        series,
        mean_infected_fraction: fraction_sum.into_iter().map(|s| s / trials).collect(),
        final_potentials: per_trial.iter().map(|p| *p.last().unwrap_or(&0.0)).collect(),
        terminated,
        index_cases,
        secondary_infections: secondary,
        max_isolated,
        budget_cap,
    })
}
