//! Isolation planning for the responder strategies.
//!
//! Every plan is budgeted in nodes (`⌈Q·N⌉`) and only ever names adopters:
//! the responder cannot act on individuals it does not see.

mod partition;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use thiserror::Error;

use crate::ceil_fraction;
use crate::graph::VisibilityView;

pub use partition::{best_sweep_cut, partition_visible, PartitionAssignment, PartitionOptions, ScoredEdge};

#[derive(Debug, Error, PartialEq)]
pub enum InterventionError {
    #[error("the responder sees no adopters")]
    EmptyView,
    #[error("isolation budget {0} outside [0, 1]")]
    InvalidBudget(f64),
    #[error("unknown strategy {0:?} (expected null|ct|spreader-central|spreader-walk|superlink)")]
    UnknownStrategy(String),
    #[error("visible subgraph needs at least 2 nodes to partition, got {0}")]
    TooSmallToPartition(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpreaderMode {
    /// Rank by visible degree.
    Centralized,
    /// Rank by visit frequency of random walks on the visible graph.
    RandomWalk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    Null,
    ContactTracing,
    SuperSpreader(SpreaderMode),
    SuperLink,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [
        Strategy::Null,
        Strategy::ContactTracing,
        Strategy::SuperSpreader(SpreaderMode::Centralized),
        Strategy::SuperSpreader(SpreaderMode::RandomWalk),
        Strategy::SuperLink,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Strategy::Null => "null",
            Strategy::ContactTracing => "ct",
            Strategy::SuperSpreader(SpreaderMode::Centralized) => "spreader-central",
            Strategy::SuperSpreader(SpreaderMode::RandomWalk) => "spreader-walk",
            Strategy::SuperLink => "superlink",
        }
    }

    pub fn schedule(self) -> Schedule {
        match self {
            Strategy::ContactTracing => Schedule::PerRound,
            _ => Schedule::Upfront,
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Strategy {
    type Err = InterventionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.id() == s.trim())
            .ok_or_else(|| InterventionError::UnknownStrategy(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schedule {
    Upfront,
    PerRound,
}

/// Why a node was isolated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reason {
    Traced,
    SuperSpreader,
    SuperLinkEndpoint,
}

/// Budget-accounted, append-only set of isolated nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct InterventionPlan {
    isolated: Vec<usize>,
    reasons: Vec<Reason>,
    member: Vec<bool>,
    schedule: Schedule,
    budget_cap: usize,
    saturated: bool,
}

impl InterventionPlan {
    pub fn new(population: usize, budget_cap: usize, schedule: Schedule) -> Self {
        Self {
            isolated: Vec::new(),
            reasons: Vec::new(),
            member: vec![false; population],
            schedule,
            budget_cap: budget_cap.min(population),
            saturated: false,
        }
    }

    /// Add `u` unless already present. Returns false (and marks the plan
    /// saturated) when the budget is exhausted.
    pub fn try_add(&mut self, u: usize, reason: Reason) -> bool {
        if self.member[u] {
            return true;
        }
        if self.isolated.len() >= self.budget_cap {
            self.saturated = true;
            return false;
        }
        self.member[u] = true;
        self.isolated.push(u);
        self.reasons.push(reason);
        true
    }

    /// Isolated nodes in the order they were added.
    pub fn isolated(&self) -> &[usize] {
        &self.isolated
    }

    pub fn reasons(&self) -> &[Reason] {
        &self.reasons
    }

    pub fn contains(&self, u: usize) -> bool {
        self.member[u]
    }

    pub fn len(&self) -> usize {
        self.isolated.len()
    }

    pub fn is_empty(&self) -> bool {
        self.isolated.is_empty()
    }

    pub fn remaining(&self) -> usize {
        self.budget_cap - self.isolated.len()
    }

    pub fn budget_cap(&self) -> usize {
        self.budget_cap
    }

    pub fn schedule(&self) -> Schedule {
        self.schedule
    }

    /// Whether some addition was refused for lack of budget.
    pub fn is_saturated(&self) -> bool {
        self.saturated
    }
}

fn check_budget(budget: f64) -> Result<(), InterventionError> {
    if (0.0..=1.0).contains(&budget) {
        Ok(())
    } else {
        Err(InterventionError::InvalidBudget(budget))
    }
}

/// The responder does nothing.
pub fn plan_null(view: &VisibilityView, budget: f64) -> InterventionPlan {
    InterventionPlan::new(view.population(), ceil_fraction(budget, view.population()), Schedule::Upfront)
}

/// Isolate visible infected nodes (ascending) and then their visible
/// neighbours (ascending), stopping at the budget cap.
pub fn plan_contact_tracing(view: &VisibilityView, visible_infected: &[usize], plan: &mut InterventionPlan) {
    let mut infected: Vec<usize> = visible_infected.iter().copied().filter(|&u| view.is_adopter(u)).collect();
    infected.sort_unstable();
    infected.dedup();
    for &u in &infected {
        if !plan.try_add(u, Reason::Traced) {
            return;
        }
    }
    let mut contacts: Vec<usize> = infected
        .iter()
        .flat_map(|&u| view.visible_neighbors(u))
        .filter(|&v| !plan.contains(v))
        .collect();
    contacts.sort_unstable();
    contacts.dedup();
    for v in contacts {
        if !plan.try_add(v, Reason::Traced) {
            return;
        }
    }
}

/// Walk length `⌈(ln n / ln d̄)²⌉` for degree estimation on the visible
/// graph; `n` when the mean degree is at most one.
pub fn default_walk_length(nodes: usize, mean_degree: f64) -> usize {
    if nodes <= 1 {
        return 1;
    }
    if mean_degree <= 1.0 + 1e-12 {
        return nodes;
    }
    let l = (nodes as f64).ln() / mean_degree.ln();
    ((l * l).ceil() as usize).max(1)
}

/// Visit counts of random walks on the visible graph, indexed by local id.
///
/// `total_steps` steps are spent on walks of `walk_length` steps, each
/// starting at a uniformly chosen visible node.
pub fn walk_visit_counts<R: Rng + ?Sized>(
    view: &VisibilityView,
    walk_length: usize,
    total_steps: usize,
    rng: &mut R,
) -> Vec<u64> {
    let h = view.visible_graph();
    let n = h.node_count();
    let mut visits = vec![0u64; n];
    if n == 0 || walk_length == 0 {
        return visits;
    }
    let walks = total_steps.div_ceil(walk_length);
    for _ in 0..walks {
        let mut at = rng.gen_range(0..n);
        for _ in 0..walk_length {
            let nbrs = h.neighbors(at);
            if !nbrs.is_empty() {
                at = nbrs[rng.gen_range(0..nbrs.len())];
            }
            visits[at] += 1;
        }
    }
    visits
}

/// Isolate the `⌈Q·N⌉` highest-ranked visible nodes.
///
/// Centralised mode ranks by visible degree. Random-walk mode ranks by the
/// visit counts of walks totalling `100·|V_visible|` steps, with length
/// `walk_length` or [`default_walk_length`]. Ties go to the lower id.
pub fn plan_super_spreader<R: Rng + ?Sized>(
    view: &VisibilityView,
    budget: f64,
    mode: SpreaderMode,
    walk_length: Option<usize>,
    rng: &mut R,
) -> Result<InterventionPlan, InterventionError> {
    check_budget(budget)?;
    if view.adopters().is_empty() {
        return Err(InterventionError::EmptyView);
    }
    let h = view.visible_graph();
    let n = h.node_count();
    let score: Vec<u64> = match mode {
        SpreaderMode::Centralized => (0..n).map(|l| h.degree(l) as u64).collect(),
        SpreaderMode::RandomWalk => {
            let len = walk_length.unwrap_or_else(|| default_walk_length(n, h.mean_degree()));
            walk_visit_counts(view, len, 100 * n, rng)
        }
    };
    // local ids are ordered like global ids, so ascending local = ascending global
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| score[b].cmp(&score[a]).then(a.cmp(&b)));
    let mut plan = plan_null(view, budget);
    for l in order {
        if !plan.try_add(view.to_global(l), Reason::SuperSpreader) {
            break;
        }
    }
    Ok(plan)
}

/// Isolate the endpoints of super-links: visible edges crossing
/// low-conductance cuts, by walk-crossing score. When the cut edges are
/// exhausted the remaining visible edges follow in score order. Of each
/// edge the endpoint with the higher visible degree goes first (ties to the
/// lower id).
pub fn plan_super_link<R: Rng + ?Sized>(
    view: &VisibilityView,
    budget: f64,
    options: &PartitionOptions,
    rng: &mut R,
) -> Result<InterventionPlan, InterventionError> {
    check_budget(budget)?;
    if view.adopters().is_empty() {
        return Err(InterventionError::EmptyView);
    }
    let mut plan = plan_null(view, budget);
    if view.adopters().len() < 2 || plan.budget_cap() == 0 {
        return Ok(plan);
    }
    let parts = partition_visible(view, options, rng)?;
    let by_score = |a: &ScoredEdge, b: &ScoredEdge| b.score.total_cmp(&a.score).then((a.u, a.v).cmp(&(b.u, b.v)));
    let mut cut = parts.cut_edges.clone();
    cut.sort_by(by_score);
    let mut rest: Vec<ScoredEdge> = parts
        .edge_scores
        .iter()
        .filter(|e| parts.cluster_of(view, e.u) == parts.cluster_of(view, e.v))
        .copied()
        .collect();
    rest.sort_by(by_score);
    for e in cut.iter().chain(&rest) {
        let (du, dv) = (view.visible_degree(e.u), view.visible_degree(e.v));
        let (first, second) = if du > dv || (du == dv && e.u < e.v) { (e.u, e.v) } else { (e.v, e.u) };
        if !plan.try_add(first, Reason::SuperLinkEndpoint) || !plan.try_add(second, Reason::SuperLinkEndpoint) {
            break;
        }
    }
    Ok(plan)
}

/// Initial plan for a trial. Up-front strategies plan completely here;
/// contact tracing starts empty and grows round by round. A view without
/// adopters yields an empty plan, since the responder can act on no one.
pub fn plan_upfront<R: Rng + ?Sized>(
    strategy: Strategy,
    view: &VisibilityView,
    budget: f64,
    rng: &mut R,
) -> Result<InterventionPlan, InterventionError> {
    check_budget(budget)?;
    let n = view.population();
    let cap = ceil_fraction(budget, n);
    if view.adopters().is_empty() {
        return Ok(InterventionPlan::new(n, cap, strategy.schedule()));
    }
    match strategy {
        Strategy::Null => Ok(plan_null(view, budget)),
        Strategy::ContactTracing => Ok(InterventionPlan::new(n, cap, Schedule::PerRound)),
        Strategy::SuperSpreader(mode) => plan_super_spreader(view, budget, mode, None, rng),
        Strategy::SuperLink => plan_super_link(view, budget, &PartitionOptions::default(), rng),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn star4() -> Graph {
        Graph::from_edges(5, (1..5).map(|l| (0, l))).unwrap()
    }

    #[test]
    fn strategy_ids_round_trip() {
        for s in Strategy::ALL {
            assert_eq!(s.id().parse::<Strategy>().unwrap(), s);
        }
        assert!("vaccinate".parse::<Strategy>().is_err());
    }

    #[test]
    fn null_plan_is_empty() {
        let g = star4();
        let plan = plan_null(&VisibilityView::full(&g), 0.45);
        assert!(plan.is_empty());
        assert_eq!(plan.budget_cap(), 3);
    }

    #[test]
    fn contact_tracing_star() {
        let g = star4();
        let view = VisibilityView::full(&g);
        let mut plan = InterventionPlan::new(5, 5, Schedule::PerRound);
        plan_contact_tracing(&view, &[0], &mut plan);
        assert_eq!(plan.isolated(), &[0, 1, 2, 3, 4]);
        assert!(!plan.is_saturated());
    }

    #[test]
    fn contact_tracing_ignores_invisible_infected() {
        let g = star4();
        let view = VisibilityView::from_adopters(&g, &[1, 2], 0.4);
        let mut plan = InterventionPlan::new(5, 5, Schedule::PerRound);
        plan_contact_tracing(&view, &[0], &mut plan);
        assert!(plan.is_empty());
    }

    #[test]
    fn contact_tracing_budget_order() {
        let g = Graph::from_edges(13, [(5, 6), (9, 10), (12, 11)]).unwrap();
        let view = VisibilityView::full(&g);
        let mut plan = InterventionPlan::new(13, 2, Schedule::PerRound);
        plan_contact_tracing(&view, &[12, 5, 9], &mut plan);
        assert_eq!(plan.isolated(), &[5, 9]);
        assert!(plan.is_saturated());
    }

    #[test]
    fn spreader_picks_hub() {
        let g = star4();
        let view = VisibilityView::full(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let plan = plan_super_spreader(&view, 0.2, SpreaderMode::Centralized, None, &mut rng).unwrap();
        assert_eq!(plan.isolated(), &[0]);
        let plan = plan_super_spreader(&view, 0.2, SpreaderMode::RandomWalk, None, &mut rng).unwrap();
        assert_eq!(plan.isolated(), &[0]);
    }

    #[test]
    fn spreader_ties_go_to_low_ids() {
        let ring = Graph::from_edges(10, (0..10).map(|u| (u, (u + 1) % 10))).unwrap();
        let view = VisibilityView::full(&ring);
        let plan =
            plan_super_spreader(&view, 0.3, SpreaderMode::Centralized, None, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(plan.isolated(), &[0, 1, 2]);
    }

    #[test]
    fn walk_length_default() {
        assert_eq!(default_walk_length(5, 1.6), 12);
        assert_eq!(default_walk_length(100, 1.0), 100);
        assert_eq!(default_walk_length(1000, 10.0), 9);
    }
}
