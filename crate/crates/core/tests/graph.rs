use contagion::graph::{
    degree_distribution, generate_synthetic, largest_connected_component, load_edge_list, sample_visibility, Graph,
    GraphError, LoadOptions, SyntheticModel,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{DiscreteCDF, Poisson};

fn load(text: &str) -> Result<Graph, GraphError> {
    load_edge_list(text.as_bytes(), LoadOptions::default())
}

#[test]
fn loader_dedups_and_compacts() {
    let g = load("# header\n0 1\n1 0\n\n").unwrap();
    assert_eq!((g.node_count(), g.edge_count()), (2, 1));

    let g = load("10 30\n30 20\n").unwrap();
    assert_eq!(g.original_ids(), &[10, 20, 30]);
    assert!(g.has_edge(0, 2) && g.has_edge(1, 2));
}

#[test]
fn loader_self_loops_and_errors() {
    let g = load("0 0\n").unwrap();
    assert_eq!(g.edge_count(), 0);
    let strict = load_edge_list("0 1\n0 0\n".as_bytes(), LoadOptions { strict_self_loops: true });
    assert!(matches!(strict, Err(GraphError::SelfLoop { line: 2, .. })));
    assert!(matches!(load("0 1\nx 2\n"), Err(GraphError::Parse { line: 2, .. })));
    assert!(matches!(load("0 1 2\n"), Err(GraphError::Parse { line: 1, .. })));
    assert!(matches!(load("# nothing\n"), Err(GraphError::Empty)));
}

#[test]
fn degree_distribution_examples() {
    let star = Graph::from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
    let d = degree_distribution(&star).unwrap();
    assert_eq!(d.probabilities, vec![0.5, 0.125, 0.125, 0.125, 0.125]);
    let k4 = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
    assert_eq!(degree_distribution(&k4).unwrap().probabilities, vec![0.25; 4]);
    assert!(degree_distribution(&Graph::from_edges(3, []).unwrap()).is_err());
}

#[test]
fn largest_component_rules() {
    // K5 ∪ K3
    let mut edges = Vec::new();
    for u in 0..5 {
        for v in u + 1..5 {
            edges.push((u, v));
        }
    }
    edges.extend([(5, 6), (6, 7), (5, 7)]);
    let g = Graph::from_edges(8, edges).unwrap();
    let lcc = largest_connected_component(&g);
    assert_eq!((lcc.node_count(), lcc.edge_count()), (5, 10));

    // tie: two triangles, the one holding the smallest original id wins
    let g = load("7 8\n8 9\n7 9\n3 4\n4 5\n3 5\n").unwrap();
    let lcc = largest_connected_component(&g);
    assert_eq!(lcc.original_ids(), &[3, 4, 5]);
}

#[test]
fn synthetic_degenerate_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let k100 = generate_synthetic(SyntheticModel::ErdosRenyi { n: 100, p: 1.0 }, &mut rng).unwrap();
    assert!((0..100).all(|u| k100.degree(u) == 99));
    let ring = generate_synthetic(SyntheticModel::SmallWorld { n: 1000, k: 10, beta: 0.0 }, &mut rng).unwrap();
    assert!((0..1000).all(|u| ring.degree(u) == 10));
    assert!(generate_synthetic(SyntheticModel::SmallWorld { n: 10, k: 3, beta: 0.1 }, &mut rng).is_err());
}

/// Two-sample-free KS test of the preferential-attachment degree sample
/// against the Poisson law with the same mean: the heavy tail must reject.
#[test]
fn preferential_attachment_is_not_poisson() {
    let g = generate_synthetic(
        SyntheticModel::PreferentialAttachment { n: 1000, m: 5 },
        &mut ChaCha8Rng::seed_from_u64(11),
    )
    .unwrap();
    let mut degrees: Vec<u64> = (0..g.node_count()).map(|u| g.degree(u) as u64).collect();
    degrees.sort_unstable();
    let n = degrees.len() as f64;
    let fit = Poisson::new(g.mean_degree()).unwrap();
    let mut d_stat: f64 = 0.0;
    for (i, &d) in degrees.iter().enumerate() {
        if i + 1 < degrees.len() && degrees[i + 1] == d {
            continue;
        }
        let empirical = (i + 1) as f64 / n;
        let below = degrees.partition_point(|&x| x < d) as f64 / n;
        let f = fit.cdf(d);
        let f_below = if d == 0 { 0.0 } else { fit.cdf(d - 1) };
        d_stat = d_stat.max((empirical - f).abs()).max((below - f_below).abs());
    }
    // asymptotic critical value at α = 0.01
    let critical = 1.628 / n.sqrt();
    assert!(d_stat > critical, "KS statistic {d_stat} below {critical}");
    // the tail: Poisson(10) essentially never exceeds 40, BA does
    assert!(g.max_degree() > 40);

    let er = generate_synthetic(SyntheticModel::ErdosRenyi { n: 1000, p: 0.01 }, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
    assert!(er.max_degree() < 30);
}

/// Expected visible edges on C4 at v = 0.5: each of the C(4,2) adopter
/// pairs is equally likely and covers an edge in 4 of 6 cases.
#[test]
fn visible_edges_match_hypergeometric_oracle() {
    let c4 = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
    let mut pairs = 0;
    let mut covered = 0;
    for a in 0..4 {
        for b in a + 1..4 {
            pairs += 1;
            covered += usize::from(c4.has_edge(a, b));
        }
    }
    let oracle = covered as f64 / pairs as f64;
    assert!((oracle - 2.0 / 3.0).abs() < 1e-12);

    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let draws = 100_000;
    let mut total = 0usize;
    for _ in 0..draws {
        let view = sample_visibility(&c4, 0.5, &mut rng);
        assert_eq!(view.adopters().len(), 2);
        total += view.visible_edge_count();
    }
    let mean = total as f64 / draws as f64;
    // binomial sd of the mean ≈ 0.0015
    assert!((mean - oracle).abs() < 0.01, "{mean} vs {oracle}");
}

#[test]
fn visibility_extremes_and_reproducibility() {
    let g = generate_synthetic(SyntheticModel::SmallWorld { n: 50, k: 4, beta: 0.2 }, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    let full = sample_visibility(&g, 1.0, &mut ChaCha8Rng::seed_from_u64(2));
    assert_eq!(full.adopters().len(), 50);
    assert_eq!(full.visible_edge_count(), g.edge_count());
    let none = sample_visibility(&g, 0.0, &mut ChaCha8Rng::seed_from_u64(2));
    assert_eq!(none.adopters().len(), 0);
    assert_eq!(none.visible_edge_count(), 0);
    let a = sample_visibility(&g, 0.35, &mut ChaCha8Rng::seed_from_u64(9));
    let b = sample_visibility(&g, 0.35, &mut ChaCha8Rng::seed_from_u64(9));
    assert_eq!(a.adopters(), b.adopters());
    assert_eq!(a.adopters().len(), 18);
}

fn arbitrary_graph() -> impl Strategy<Value = Graph> {
    (3usize..40).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..120).prop_map(move |e| {
            Graph::from_edges(n, e.into_iter().filter(|(u, v)| u != v)).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn handshake_and_symmetry(g in arbitrary_graph()) {
        let degree_sum: usize = (0..g.node_count()).map(|u| g.degree(u)).sum();
        prop_assert_eq!(degree_sum, 2 * g.edge_count());
        for u in 0..g.node_count() {
            prop_assert!(g.neighbors(u).windows(2).all(|w| w[0] < w[1]));
            for &v in g.neighbors(u) {
                prop_assert!(v != u);
                prop_assert!(g.has_edge(v, u));
            }
        }
    }

    #[test]
    fn views_are_induced(g in arbitrary_graph(), v in 0.0f64..=1.0, seed in any::<u64>()) {
        let view = sample_visibility(&g, v, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(view.adopters().len(), contagion::ceil_fraction(v, g.node_count()));
        for (a, b) in view.visible_edges() {
            prop_assert!(g.has_edge(a, b));
            prop_assert!(view.is_adopter(a) && view.is_adopter(b));
        }
        let induced = g.edges().filter(|&(a, b)| view.is_adopter(a) && view.is_adopter(b)).count();
        prop_assert_eq!(induced, view.visible_edge_count());
    }
}
