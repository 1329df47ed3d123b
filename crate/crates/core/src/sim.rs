//! Round-based random-walk spreading with permanent isolation.
//!
//! A round is synchronous: every infected, non-isolated node (ascending id)
//! draws one non-isolated neighbour uniformly at random, and susceptible
//! targets turn infected at the end of the round. The attack rate is 100%.

use rand::seq::index;
use rand::Rng;
use thiserror::Error;

use crate::ceil_fraction;
use crate::graph::{Graph, VisibilityView};
use crate::interventions::{plan_contact_tracing, plan_upfront, InterventionError, InterventionPlan, Schedule, Strategy};
use crate::rng::TrialRng;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("{seeds} seeds requested but the population is {population}")]
    TooManySeeds { seeds: usize, population: usize },
    #[error("at least one seed is required")]
    NoSeeds,
    #[error("seed fraction {0} outside (0, 1]")]
    InvalidFraction(f64),
    #[error("a trial needs at least one round")]
    NoRounds,
    #[error("no trial results supplied")]
    NoTrials,
    #[error("no index cases in the supplied trials")]
    NoIndexCases,
    #[error(transparent)]
    Intervention(#[from] InterventionError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeStatus {
    Susceptible,
    Infected,
    IsolatedSusceptible,
    IsolatedInfected,
}

impl NodeStatus {
    pub fn is_infected(self) -> bool {
        matches!(self, NodeStatus::Infected | NodeStatus::IsolatedInfected)
    }

    pub fn is_isolated(self) -> bool {
        matches!(self, NodeStatus::IsolatedSusceptible | NodeStatus::IsolatedInfected)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransmissionEvent {
    pub source: usize,
    pub target: usize,
    pub round: u32,
}

/// How many individuals start infected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeedSpec {
    Count(usize),
    /// `⌈fraction · N⌉` seeds.
    Fraction(f64),
}

impl SeedSpec {
    pub fn resolve(self, population: usize) -> Result<usize, SimError> {
        let seeds = match self {
            SeedSpec::Count(c) => c,
            SeedSpec::Fraction(f) => {
                if !(f > 0.0 && f <= 1.0) {
                    return Err(SimError::InvalidFraction(f));
                }
                ceil_fraction(f, population)
            }
        };
        if seeds == 0 {
            return Err(SimError::NoSeeds);
        }
        if seeds > population {
            return Err(SimError::TooManySeeds { seeds, population });
        }
        Ok(seeds)
    }
}

/// Which neighbours an infected node may draw its contact from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DrawRule {
    /// Any non-isolated neighbour; draws landing on infected nodes are wasted.
    #[default]
    AllNeighbors,
    /// Only susceptible, non-isolated neighbours.
    SusceptibleOnly,
}

pub const NEVER: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct EpidemicState {
    status: Vec<NodeStatus>,
    round: u32,
    events: Vec<TransmissionEvent>,
    infection_round: Vec<u32>,
    index_cases: Vec<usize>,
    infected: usize,
    isolated: usize,
}

impl EpidemicState {
    /// Everyone susceptible, with `seeds` infected at round 0.
    pub fn with_seeds(population: usize, seeds: &[usize]) -> Self {
        let mut state = Self {
            status: vec![NodeStatus::Susceptible; population],
            round: 0,
            events: Vec::new(),
            infection_round: vec![NEVER; population],
            index_cases: Vec::with_capacity(seeds.len()),
            infected: 0,
            isolated: 0,
        };
        let mut sorted = seeds.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        for u in sorted {
            state.status[u] = NodeStatus::Infected;
            state.infection_round[u] = 0;
            state.index_cases.push(u);
            state.infected += 1;
        }
        state
    }

    pub fn population(&self) -> usize {
        self.status.len()
    }

    pub fn status(&self, u: usize) -> NodeStatus {
        self.status[u]
    }

    pub fn statuses(&self) -> &[NodeStatus] {
        &self.status
    }

    pub fn round(&self) -> u32 {
        self.round
    }

    pub fn events(&self) -> &[TransmissionEvent] {
        &self.events
    }

    pub fn infection_round(&self) -> &[u32] {
        &self.infection_round
    }

    /// Seeds, ascending.
    pub fn index_cases(&self) -> &[usize] {
        &self.index_cases
    }

    pub fn infected_count(&self) -> usize {
        self.infected
    }

    pub fn isolated_count(&self) -> usize {
        self.isolated
    }

    pub fn infected_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.status.len()).filter(move |&u| self.status[u].is_infected())
    }

    /// Isolate `u`; returns whether it was newly isolated.
    pub fn isolate(&mut self, u: usize) -> bool {
        let next = match self.status[u] {
            NodeStatus::Susceptible => NodeStatus::IsolatedSusceptible,
            NodeStatus::Infected => NodeStatus::IsolatedInfected,
            _ => return false,
        };
        self.status[u] = next;
        self.isolated += 1;
        true
    }

    /// Whether some infected, non-isolated node still has a susceptible,
    /// non-isolated neighbour.
    pub fn can_spread(&self, g: &Graph) -> bool {
        (0..self.status.len()).any(|u| {
            self.status[u] == NodeStatus::Infected
                && g.neighbors(u).iter().any(|&v| self.status[v] == NodeStatus::Susceptible)
        })
    }
}

/// Infect `⌈fraction·N⌉` (or `count`) distinct nodes chosen uniformly.
pub fn seed_infection<R: Rng + ?Sized>(g: &Graph, spec: SeedSpec, rng: &mut R) -> Result<EpidemicState, SimError> {
    let n = g.node_count();
    let k = spec.resolve(n)?;
    let seeds = if k == n {
        (0..n).collect()
    } else {
        index::sample(rng, n, k).into_vec()
    };
    Ok(EpidemicState::with_seeds(n, &seeds))
}

/// One synchronous spreading round. Returns the number of new infections.
pub fn spread_round<R: Rng + ?Sized>(g: &Graph, s: &mut EpidemicState, rule: DrawRule, rng: &mut R) -> usize {
    s.round += 1;
    let round = s.round;
    let mut pending: Vec<usize> = Vec::new();
    let mut candidates: Vec<usize> = Vec::new();
    let mut claimed = vec![false; 0];
    for u in 0..s.status.len() {
        if s.status[u] != NodeStatus::Infected {
            continue;
        }
        let nbrs = g.neighbors(u);
        let target = match rule {
            DrawRule::AllNeighbors if s.isolated == 0 => {
                if nbrs.is_empty() {
                    continue;
                }
                nbrs[rng.gen_range(0..nbrs.len())]
            }
            DrawRule::AllNeighbors => {
                candidates.clear();
                candidates.extend(nbrs.iter().copied().filter(|&v| !s.status[v].is_isolated()));
                if candidates.is_empty() {
                    continue;
                }
                candidates[rng.gen_range(0..candidates.len())]
            }
            DrawRule::SusceptibleOnly => {
                candidates.clear();
                candidates.extend(nbrs.iter().copied().filter(|&v| s.status[v] == NodeStatus::Susceptible));
                if candidates.is_empty() {
                    continue;
                }
                candidates[rng.gen_range(0..candidates.len())]
            }
        };
        if s.status[target] != NodeStatus::Susceptible {
            continue;
        }
        if claimed.is_empty() {
            claimed = vec![false; s.status.len()];
        }
        if claimed[target] {
            continue;
        }
        claimed[target] = true;
        pending.push(target);
        s.events.push(TransmissionEvent { source: u, target, round });
    }
    for &v in &pending {
        s.status[v] = NodeStatus::Infected;
        s.infection_round[v] = round;
    }
    s.infected += pending.len();
    pending.len()
}

/// Per-trial inputs besides graph, strategy and view.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialParams {
    pub rounds: u32,
    pub seeds: SeedSpec,
    pub draw: DrawRule,
    /// Isolation budget `Q` as a fraction of the population.
    pub budget: f64,
}

impl Default for TrialParams {
    fn default() -> Self {
        Self {
            rounds: 20,
            seeds: SeedSpec::Fraction(0.01),
            draw: DrawRule::AllNeighbors,
            budget: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    /// Round each node got infected (`0` for seeds, [`NEVER`] otherwise).
    pub infection_round: Vec<u32>,
    /// Infected count after rounds `0..=rounds`.
    pub infected_count: Vec<usize>,
    /// Infected fraction after rounds `0..=rounds`.
    pub infected_fraction: Vec<f64>,
    /// New infections in rounds `1..=rounds` (index `r − 1`).
    pub new_infections: Vec<usize>,
    /// Isolated count after the intervention phase of rounds `0..=rounds`.
    pub isolated_count: Vec<usize>,
    /// Direct secondary infections of each index case, seeds ascending.
    pub index_case_secondary_counts: Vec<u32>,
    pub events: Vec<TransmissionEvent>,
    /// First round after which no further spread was possible.
    pub terminated: Option<u32>,
    pub budget_cap: usize,
}

impl TrialResult {
    pub fn rounds(&self) -> usize {
        self.new_infections.len()
    }

    pub fn final_infected_fraction(&self) -> f64 {
        *self.infected_fraction.last().unwrap_or(&0.0)
    }
}

fn apply_plan(state: &mut EpidemicState, plan: &InterventionPlan, applied: &mut usize) {
    for &u in &plan.isolated()[*applied..] {
        state.isolate(u);
    }
    *applied = plan.isolated().len();
}

fn visible_infected(state: &EpidemicState, view: &VisibilityView) -> Vec<usize> {
    view.adopters()
        .iter()
        .copied()
        .filter(|&u| state.status(u).is_infected())
        .collect()
}

/// Seed, plan and spread for `params.rounds` rounds.
///
/// Up-front strategies plan once before the first spreading phase. Contact
/// tracing intervenes right after seeding and again after every spreading
/// phase. Spreading always runs on the full graph; the view only limits what
/// the responder can act upon. Once no spread is possible the remaining
/// rounds are recorded without consuming randomness.
pub fn run_trial(
    g: &Graph,
    strategy: Strategy,
    view: &VisibilityView,
    params: &TrialParams,
    rng: &mut TrialRng,
) -> Result<TrialResult, SimError> {
    if params.rounds == 0 {
        return Err(SimError::NoRounds);
    }
    let n = g.node_count();
    let mut state = seed_infection(g, params.seeds, &mut rng.seeding)?;
    let mut plan = plan_upfront(strategy, view, params.budget, &mut rng.planning)?;
    let mut applied = 0;
    if plan.schedule() == Schedule::PerRound {
        plan_contact_tracing(view, &visible_infected(&state, view), &mut plan);
    }
    apply_plan(&mut state, &plan, &mut applied);

    let rounds = params.rounds as usize;
    let mut infected_count = Vec::with_capacity(rounds + 1);
    let mut isolated_count = Vec::with_capacity(rounds + 1);
    let mut new_infections = Vec::with_capacity(rounds);
    infected_count.push(state.infected_count());
    isolated_count.push(state.isolated_count());
    let mut terminated = if state.can_spread(g) { None } else { Some(0) };

    for r in 1..=params.rounds {
        let fresh = if terminated.is_some() {
            state.round += 1;
            0
        } else {
            spread_round(g, &mut state, params.draw, &mut rng.spreading)
        };
        if plan.schedule() == Schedule::PerRound && terminated.is_none() {
            plan_contact_tracing(view, &visible_infected(&state, view), &mut plan);
            apply_plan(&mut state, &plan, &mut applied);
        }
        new_infections.push(fresh);
        infected_count.push(state.infected_count());
        isolated_count.push(state.isolated_count());
        if terminated.is_none() && !state.can_spread(g) {
            terminated = Some(r);
        }
    }

    let mut secondary = vec![0u32; state.index_cases.len()];
    for e in &state.events {
        if let Ok(i) = state.index_cases.binary_search(&e.source) {
            secondary[i] += 1;
        }
    }
    Ok(TrialResult {
        infected_fraction: infected_count.iter().map(|&c| c as f64 / n as f64).collect(),
        infected_count,
        new_infections,
        isolated_count,
        index_case_secondary_counts: secondary,
        infection_round: state.infection_round,
        events: state.events,
        terminated,
        budget_cap: plan.budget_cap(),
    })
}

/// Mean number of direct secondary infections per index case.
pub fn measure_r0(results: &[TrialResult]) -> Result<f64, SimError> {
    if results.is_empty() {
        return Err(SimError::NoTrials);
    }
    let mut cases = 0u64;
    let mut secondary = 0u64;
    for r in results {
        cases += r.index_case_secondary_counts.len() as u64;
        secondary += r.index_case_secondary_counts.iter().map(|&c| c as u64).sum::<u64>();
    }
    if cases == 0 {
        return Err(SimError::NoIndexCases);
    }
    Ok(secondary as f64 / cases as f64)
}

/// Rebuild the final infected set from seeds and the event log.
pub fn replay_events(population: usize, seeds: &[usize], events: &[TransmissionEvent]) -> Vec<bool> {
    let mut infected = vec![false; population];
    for &s in seeds {
        infected[s] = true;
    }
    for e in events {
        infected[e.target] = true;
    }
    infected
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn path3() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap()
    }

    fn star4() -> Graph {
        Graph::from_edges(5, (1..5).map(|l| (0, l))).unwrap()
    }

    #[test]
    fn seeding_counts() {
        let g = Graph::from_edges(200, (0..199).map(|u| (u, u + 1))).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = seed_infection(&g, SeedSpec::Count(1), &mut rng).unwrap();
        assert_eq!(s.infected_count(), 1);
        let s = seed_infection(&g, SeedSpec::Fraction(0.01), &mut rng).unwrap();
        assert_eq!(s.infected_count(), 2);
        let s = seed_infection(&g, SeedSpec::Fraction(1.0), &mut rng).unwrap();
        assert_eq!(s.infected_count(), 200);
        assert_eq!(
            seed_infection(&g, SeedSpec::Count(201), &mut rng),
            Err(SimError::TooManySeeds { seeds: 201, population: 200 })
        );
        assert_eq!(SeedSpec::Fraction(0.01).resolve(58228), Ok(583));
    }

    #[test]
    fn path_infects_middle_first() {
        let g = path3();
        let mut s = EpidemicState::with_seeds(3, &[0]);
        let fresh = spread_round(&g, &mut s, DrawRule::AllNeighbors, &mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(fresh, 1);
        assert_eq!(s.status(1), NodeStatus::Infected);
        assert_eq!(s.status(2), NodeStatus::Susceptible);
        assert_eq!(s.events(), &[TransmissionEvent { source: 0, target: 1, round: 1 }]);
    }

    #[test]
    fn isolated_index_case_is_inert() {
        let g = star4();
        let mut s = EpidemicState::with_seeds(5, &[0]);
        s.isolate(0);
        let before = s.clone();
        assert_eq!(spread_round(&g, &mut s, DrawRule::AllNeighbors, &mut ChaCha8Rng::seed_from_u64(3)), 0);
        assert_eq!(s.statuses(), before.statuses());
        assert_eq!(s.round(), 1);
        assert!(!s.can_spread(&g));
    }

    #[test]
    fn synchronous_update() {
        // 0 infects 1 in round 1; 1 must not transmit until round 2
        let g = path3();
        let mut s = EpidemicState::with_seeds(3, &[0]);
        spread_round(&g, &mut s, DrawRule::AllNeighbors, &mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(s.infected_count(), 2);
        assert_eq!(s.infection_round(), &[0, 1, NEVER]);
    }

    #[test]
    fn susceptible_only_never_wastes_draws() {
        let g = star4();
        let mut s = EpidemicState::with_seeds(5, &[0]);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..4 {
            assert_eq!(spread_round(&g, &mut s, DrawRule::SusceptibleOnly, &mut rng), 1);
        }
        assert_eq!(s.infected_count(), 5);
    }

    #[test]
    fn complete_graph_null_trial() {
        let k10 = Graph::from_edges(10, (0..10).flat_map(|u| (u + 1..10).map(move |v| (u, v)))).unwrap();
        let view = VisibilityView::full(&k10);
        let params = TrialParams {
            rounds: 20,
            seeds: SeedSpec::Count(1),
            ..TrialParams::default()
        };
        let r = run_trial(&k10, Strategy::Null, &view, &params, &mut TrialRng::new(7, 0)).unwrap();
        assert_eq!(r.final_infected_fraction(), 1.0);
        assert_eq!(r.infected_fraction.len(), 21);
        assert!(r.terminated.is_some());
    }

    #[test]
    fn r0_examples() {
        let g = path3();
        let view = VisibilityView::full(&g);
        let params = TrialParams {
            rounds: 5,
            seeds: SeedSpec::Count(1),
            ..TrialParams::default()
        };
        let mut results = Vec::new();
        for t in 0..50 {
            let r = run_trial(&g, Strategy::Null, &view, &params, &mut TrialRng::new(3, t)).unwrap();
            if r.infection_round[0] == 0 {
                results.push(r);
            }
        }
        assert!(!results.is_empty());
        assert_eq!(measure_r0(&results).unwrap(), 1.0);
        assert_eq!(measure_r0(&[]), Err(SimError::NoTrials));
    }
}
