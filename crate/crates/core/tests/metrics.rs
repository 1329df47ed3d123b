use contagion::graph::{degree_distribution, generate_synthetic, Graph, SyntheticModel};
use contagion::metrics::{
    eigenvalue_gap, full_visibility_bound, infection_probabilities, network_max_potential, power_iterate,
    relative_pointwise_distance, stationary_distribution, transmission_potential, ProbabilityVector, TransitionMatrix,
    VectorKind,
};
use contagion::rng::TrialRng;
use contagion::sim::{run_trial, SeedSpec, TrialParams};
use contagion::{Strategy, VisibilityView};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn complete(n: usize) -> Graph {
    Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).unwrap()
}

fn clique_pair(size: usize) -> Graph {
    let mut edges = Vec::new();
    for base in [0, size] {
        for u in 0..size {
            for v in u + 1..size {
                edges.push((base + u, base + v));
            }
        }
    }
    edges.push((size - 1, size));
    Graph::from_edges(2 * size, edges).unwrap()
}

/// Second largest eigenvalue magnitude of a reversible chain, from a dense
/// symmetric eigensolve of `D^{1/2} P D^{-1/2}`.
fn dense_lambda2(p: &TransitionMatrix, pi: &[f64]) -> f64 {
    let n = p.states();
    let s = DMatrix::from_fn(n, n, |i, j| pi[i].sqrt() * p.get(i, j) / pi[j].sqrt());
    let s = (&s + s.transpose()) * 0.5;
    let mut mags: Vec<f64> = s.symmetric_eigen().eigenvalues.iter().map(|x| x.abs()).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    mags[1]
}

fn lazy_gap_with_oracle(g: &Graph) -> (f64, f64) {
    let p = TransitionMatrix::standard(g).lazy();
    let pi: Vec<f64> = degree_distribution(g).unwrap().probabilities;
    let oracle = dense_lambda2(&p, &pi);
    let got = eigenvalue_gap(&p).unwrap();
    assert!(
        (got.lambda2 - oracle).abs() <= 10.0 * got.tolerance,
        "power iteration {} vs dense {}",
        got.lambda2,
        oracle
    );
    (got.gap, 1.0 - oracle)
}

#[test]
fn potential_examples() {
    assert!((transmission_potential(&vec![1.0 / 1024.0; 1024], 1024).unwrap() - 1.0).abs() < 1e-12);
    let mut point = vec![0.0; 50];
    point[7] = 1.0;
    assert_eq!(transmission_potential(&point, 50).unwrap(), 0.0);
    assert!((transmission_potential(&[0.5, 0.5, 0.0, 0.0], 4).unwrap() - 0.5).abs() < 1e-12);
    assert!(transmission_potential(&[1.0], 1).is_err());
}

#[test]
fn infection_probabilities_on_a_path() {
    let path = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
    let view = VisibilityView::full(&path);
    let params = TrialParams {
        rounds: 1,
        seeds: SeedSpec::Count(1),
        ..TrialParams::default()
    };
    // keep the trials whose single seed is node 0; their only event is 0 → 1
    let trials: Vec<_> = (0..200)
        .map(|t| run_trial(&path, Strategy::Null, &view, &params, &mut TrialRng::new(3, t)).unwrap())
        .filter(|r| r.infection_round[0] == 0)
        .collect();
    assert!(!trials.is_empty());
    let p = infection_probabilities(&trials, 1).unwrap();
    assert_eq!(p.entries(), &[1.0, 1.0, 0.0]);
    assert_eq!(p.kind(), VectorKind::InfectionLikelihood);
}

#[test]
fn power_iteration_examples() {
    let k4 = complete(4);
    let q = power_iterate(&ProbabilityVector::point_mass(4, 0), &TransitionMatrix::standard(&k4), 1).unwrap();
    for (x, y) in q.entries().iter().zip([0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]) {
        assert!((x - y).abs() < 1e-15);
    }
    let c4 = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
    let q0 = ProbabilityVector::point_mass(4, 0);
    let p = TransitionMatrix::standard(&c4);
    assert_eq!(power_iterate(&q0, &p, 0).unwrap(), q0);
    // hand product: e₀P = (0, ½, 0, ½), then (½, 0, ½, 0)
    assert_eq!(power_iterate(&q0, &p, 2).unwrap().entries(), &[0.5, 0.0, 0.5, 0.0]);
}

#[test]
fn stationary_examples() {
    let k4 = complete(4);
    let pi = stationary_distribution(&TransitionMatrix::metropolis(&k4)).unwrap();
    assert!(pi.entries().iter().all(|x| (x - 0.25).abs() < 1e-10));
    let star = Graph::from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
    let pi = stationary_distribution(&TransitionMatrix::standard(&star).lazy()).unwrap();
    for (x, y) in pi.entries().iter().zip([0.5, 0.125, 0.125, 0.125, 0.125]) {
        assert!((x - y).abs() < 1e-10);
    }
    assert!((network_max_potential(&star).unwrap() - 2.0 / 5f64.log2()).abs() < 1e-12);
    assert!((network_max_potential(&complete(7)).unwrap() - 1.0).abs() < 1e-12);
    let disconnected = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
    assert!(stationary_distribution(&TransitionMatrix::standard(&disconnected)).is_err());
}

#[test]
fn relative_distance_examples() {
    let n = 5;
    let pi = ProbabilityVector::uniform(n);
    assert_eq!(relative_pointwise_distance(&pi, &pi).unwrap(), 0.0);
    let one_step = power_iterate(&ProbabilityVector::point_mass(n, 0), &TransitionMatrix::standard(&complete(n)), 1).unwrap();
    assert!((relative_pointwise_distance(&one_step, &pi).unwrap() - 1.0).abs() < 1e-12);
    let point = ProbabilityVector::point_mass(n, 2);
    assert!((relative_pointwise_distance(&point, &pi).unwrap() - (n as f64 - 1.0)).abs() < 1e-12);
    let bad = ProbabilityVector::new(vec![1.0, 0.0], VectorKind::Stationary).unwrap();
    assert!(relative_pointwise_distance(&ProbabilityVector::uniform(2), &bad).is_err());
}

#[test]
fn distance_decreases_after_burn_in() {
    let g = generate_synthetic(SyntheticModel::SmallWorld { n: 60, k: 4, beta: 0.2 }, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
    let p = TransitionMatrix::standard(&g).lazy();
    let pi = ProbabilityVector::new(degree_distribution(&g).unwrap().probabilities, VectorKind::Stationary).unwrap();
    let mut q = ProbabilityVector::point_mass(60, 0);
    let mut deltas = Vec::new();
    for _ in 0..300 {
        deltas.push(relative_pointwise_distance(&q, &pi).unwrap());
        q = power_iterate(&q, &p, 1).unwrap();
    }
    for t in 50..290 {
        assert!(deltas[t + 10] <= deltas[t] + 1e-9, "t={t}");
    }
}

#[test]
fn bounds_examples() {
    assert_eq!(full_visibility_bound(0.3, 0.2, 0).unwrap(), 1.0 + 0.7 * 0.2 / 10.0);
    let direct = (1.0 + 0.5 * 0.1 / 10.0) * (-(100.0) * 0.25 * 0.1 / 20.0f64).exp();
    assert!((full_visibility_bound(0.5, 0.1, 100).unwrap() - direct).abs() < 1e-15);
    let mut prev = f64::INFINITY;
    for t in 0..200 {
        let b = full_visibility_bound(0.4, 0.05, t).unwrap();
        assert!(b < prev);
        prev = b;
    }
    assert!(full_visibility_bound(1.5, 0.1, 1).is_err());
    assert!(full_visibility_bound(0.5, 0.0, 1).is_err());
}

#[test]
fn gap_matches_dense_eigensolve() {
    let (gap, oracle) = lazy_gap_with_oracle(&complete(4));
    assert!((gap - oracle).abs() < 1e-7);
    // lazy K_n: λ₂ = (1 − 1/(n−1)) / 2
    assert!((gap - (1.0 - (1.0 - 1.0 / 3.0) / 2.0)).abs() < 1e-7);

    let (bridged, _) = lazy_gap_with_oracle(&clique_pair(5));
    let (single, _) = lazy_gap_with_oracle(&complete(5));
    assert!(bridged < single);
}

#[test]
fn rewiring_widens_the_gap() {
    let ring = generate_synthetic(SyntheticModel::SmallWorld { n: 50, k: 4, beta: 0.0 }, &mut ChaCha8Rng::seed_from_u64(8)).unwrap();
    let rewired = generate_synthetic(SyntheticModel::SmallWorld { n: 50, k: 4, beta: 0.3 }, &mut ChaCha8Rng::seed_from_u64(8)).unwrap();
    let (ring_gap, _) = lazy_gap_with_oracle(&ring);
    let (rewired_gap, _) = lazy_gap_with_oracle(&rewired);
    assert!(rewired_gap > ring_gap, "{rewired_gap} vs {ring_gap}");
}

#[test]
fn stationary_equals_degree_distribution() {
    for seed in 0..5 {
        let g = generate_synthetic(SyntheticModel::PreferentialAttachment { n: 120, m: 2 }, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let pi = stationary_distribution(&TransitionMatrix::standard(&g)).unwrap();
        let d = degree_distribution(&g).unwrap();
        let err = pi.entries().iter().zip(&d.probabilities).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-8, "seed {seed}: {err}");
    }
}

proptest! {
    #[test]
    fn potential_stays_in_unit_interval(raw in proptest::collection::vec(0.0f64..1.0, 2..60)) {
        let total: f64 = raw.iter().sum();
        let n = raw.len();
        let normalised: Vec<f64> = raw.iter().map(|x| x / total.max(1e-300)).collect();
        let v = transmission_potential(&normalised, n).unwrap();
        prop_assert!((0.0..=1.0).contains(&v));
    }

    #[test]
    fn power_iteration_preserves_mass(seed in any::<u64>(), t in 0usize..50, start in 0usize..30) {
        let g = generate_synthetic(SyntheticModel::ErdosRenyi { n: 30, p: 0.2 }, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let n = g.node_count();
        let q = power_iterate(&ProbabilityVector::point_mass(n, start % n), &TransitionMatrix::metropolis(&g), t).unwrap();
        prop_assert!((q.sum() - 1.0).abs() < 1e-9);
    }
}
