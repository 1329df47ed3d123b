use contagion::graph::{sample_visibility, Graph, SyntheticModel};
use contagion::harness::{
    analyze_graph, emit_csv, emit_plot, load_graph, parse_csv, run_sweep, run_sweep_with, ExperimentConfig,
    GraphSource, SweepRow, CSV_HEADER, DEFAULT_BUDGETS, DEFAULT_VISIBILITIES,
};
use contagion::interventions::Strategy;
use contagion::metrics::uniform_support_potential;
use contagion::par::Execution;
use contagion::rng::TrialRng;
use contagion::sim::{run_trial, SeedSpec, TrialParams};

fn config(trials: usize) -> (Graph, ExperimentConfig) {
    let model = SyntheticModel::SmallWorld { n: 300, k: 6, beta: 0.1 };
    let mut cfg = ExperimentConfig::new(GraphSource::Synthetic(model));
    cfg.trials = trials;
    cfg.rounds = 6;
    cfg.seeds = SeedSpec::Count(3);
    let g = load_graph(&cfg.graph, cfg.seed, false).unwrap();
    (g, cfg)
}

fn csv_of(r: &contagion::harness::SweepResult) -> String {
    let mut out = Vec::new();
    emit_csv(r, &mut out).unwrap();
    String::from_utf8(out).unwrap()
}

#[test]
fn csv_shape_and_round_trip() {
    let (g, mut cfg) = config(20);
    cfg.strategies = vec![Strategy::ContactTracing];
    cfg.visibility = vec![0.35];
    cfg.budget = vec![0.25];
    cfg.rounds = 3;
    let r = run_sweep(&g, &cfg).unwrap();
    let text = csv_of(&r);
    assert_eq!(text.lines().next(), Some(CSV_HEADER));
    assert_eq!(text.lines().count(), 4);

    let parsed = parse_csv(&text).unwrap();
    let expected: Vec<SweepRow> = r.rows().iter().map(SweepRow::rounded).collect();
    assert_eq!(parsed, expected);
    for row in &parsed {
        assert!(row.min_potential <= row.mean_potential && row.mean_potential <= row.max_potential);
    }

    let mut empty = r.clone();
    empty.cells.clear();
    assert_eq!(csv_of(&empty), format!("{CSV_HEADER}\n"));
}

#[test]
fn worker_count_does_not_change_bytes() {
    let (g, mut cfg) = config(64);
    cfg.visibility = vec![0.35, 0.85];
    cfg.budget = vec![0.15, 0.45];
    let one = csv_of(&run_sweep_with(&g, &cfg, Execution::Sequential).unwrap());
    let many = csv_of(&run_sweep_with(&g, &cfg, Execution::Parallel(8)).unwrap());
    assert_eq!(one, many);
}

#[test]
fn sharded_sweep_equals_monolithic() {
    let (g, mut cfg) = config(30);
    cfg.visibility = vec![0.1, 0.6];
    cfg.budget = vec![0.25];
    let whole = csv_of(&run_sweep(&g, &cfg).unwrap());
    let mut lines: Vec<String> = Vec::new();
    for v in [0.1, 0.6] {
        let mut shard = cfg.clone();
        shard.visibility = vec![v];
        lines.extend(csv_of(&run_sweep(&g, &shard).unwrap()).lines().skip(1).map(String::from));
    }
    // rows sort by strategy, then V
    lines.sort_by(|a, b| {
        let key = |s: &str| {
            let f: Vec<&str> = s.split(',').collect();
            (f[0].to_string(), f[1].to_string(), f[2].to_string(), f[3].parse::<u32>().unwrap())
        };
        key(a).cmp(&key(b))
    });
    let merged = format!("{CSV_HEADER}\n{}\n", lines.join("\n"));
    assert_eq!(merged, whole);
}

#[test]
fn one_trial_sweep_is_run_trial() {
    let (g, mut cfg) = config(1);
    cfg.strategies = vec![Strategy::SuperSpreader(contagion::interventions::SpreaderMode::Centralized)];
    cfg.visibility = vec![0.6];
    cfg.budget = vec![0.15];
    let r = run_sweep(&g, &cfg).unwrap();
    let mut rng = TrialRng::new(cfg.seed, 0);
    let view = sample_visibility(&g, 0.6, &mut rng.visibility);
    let params = TrialParams {
        rounds: cfg.rounds,
        seeds: cfg.seeds,
        draw: cfg.draw,
        budget: 0.15,
    };
    let t = run_trial(&g, cfg.strategies[0], &view, &params, &mut rng).unwrap();
    let n = g.node_count();
    let expected: Vec<f64> = t.infected_count.iter().map(|&c| uniform_support_potential(c, n)).collect();
    let cell = &r.cells[0];
    assert_eq!(cell.series.mean, expected);
    assert_eq!(cell.series.min, expected);
    assert_eq!(cell.series.max, expected);
    assert_eq!(cell.mean_infected_fraction, t.infected_fraction);
}

/// Exact law of the infected count on K_n under the null response: each of
/// the k infected hits one of the n − 1 others, and a draw adds a new case
/// with probability (n − k − j)/(n − 1) when j have already been added.
fn complete_graph_oracle(n: usize, seeds: usize, rounds: usize) -> Vec<f64> {
    let mut dist = vec![0.0; n + 1];
    dist[seeds] = 1.0;
    let mut expected = vec![uniform_support_potential(seeds, n)];
    for _ in 0..rounds {
        let mut next = vec![0.0; n + 1];
        for (k, &pk) in dist.iter().enumerate() {
            if pk == 0.0 {
                continue;
            }
            let mut added = vec![0.0; n - k + 1];
            added[0] = 1.0;
            for _ in 0..k {
                let mut step = vec![0.0; n - k + 1];
                for (j, &pj) in added.iter().enumerate() {
                    let fresh = (n - k - j) as f64 / (n - 1) as f64;
                    step[j] += pj * (1.0 - fresh);
                    if j < n - k {
                        step[j + 1] += pj * fresh;
                    }
                }
                added = step;
            }
            for (j, &pj) in added.iter().enumerate() {
                next[k + j] += pk * pj;
            }
        }
        dist = next;
        expected.push(dist.iter().enumerate().map(|(k, &p)| p * uniform_support_potential(k, n)).sum());
    }
    expected
}

#[test]
fn complete_graph_null_matches_exact_chain() {
    let n = 20;
    let edges: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let path = std::env::temp_dir().join(format!("k20-{}.txt", std::process::id()));
    std::fs::write(&path, edges.iter().map(|(u, v)| format!("{u} {v}\n")).collect::<String>()).unwrap();
    let mut cfg = ExperimentConfig::new(GraphSource::File(path.clone()));
    cfg.strategies = vec![Strategy::Null];
    cfg.visibility = vec![0.5];
    cfg.budget = vec![0.25];
    cfg.trials = 4000;
    cfg.rounds = 12;
    let g = load_graph(&cfg.graph, cfg.seed, false).unwrap();
    std::fs::remove_file(&path).ok();
    let r = run_sweep(&g, &cfg).unwrap();
    let oracle = complete_graph_oracle(n, 1, 12);
    let mean = &r.cells[0].series.mean;
    for t in 0..=12 {
        assert!((mean[t] - oracle[t]).abs() < 0.01, "round {t}: {} vs {}", mean[t], oracle[t]);
    }
    assert!(oracle[12] > 0.999);
}

#[test]
fn complete_graph_null_plateau_within_five_rounds() {
    // exact chain, one seed on K20; plateau is potential 1 (everyone infected)
    let oracle = complete_graph_oracle(20, 1, 20);
    let plateau = oracle[20];
    println!("K20 null: round 5 = {:.4}, round 6 = {:.4}, plateau = {:.6}", oracle[5], oracle[6], plateau);
    assert!(oracle[5] >= 0.9 * plateau, "round 5 reaches {:.4} of plateau", oracle[5] / plateau);
}

#[test]
fn svg_grid_layout() {
    let (g, mut cfg) = config(5);
    cfg.strategies = vec![Strategy::Null, Strategy::SuperLink];
    cfg.visibility = DEFAULT_VISIBILITIES.to_vec();
    cfg.budget = DEFAULT_BUDGETS.to_vec();
    cfg.rounds = 4;
    let r = run_sweep(&g, &cfg).unwrap();
    let mut out = Vec::new();
    emit_plot(&r, Strategy::SuperLink, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let doc = roxmltree::Document::parse(&text).expect("well-formed SVG");
    let panels: Vec<_> = doc.descendants().filter(|n| n.attribute("class") == Some("panel")).collect();
    assert_eq!(panels.len(), 20);

    let rect_of = |p: &roxmltree::Node| {
        let rect = p.children().find(|c| c.has_tag_name("rect")).unwrap();
        let num = |a: &str| rect.attribute(a).unwrap().parse::<f64>().unwrap();
        (num("x"), num("y"), num("height"))
    };
    for p in &panels {
        let v: f64 = p.attribute("data-visibility").unwrap().parse().unwrap();
        let q: f64 = p.attribute("data-budget").unwrap().parse().unwrap();
        let row = DEFAULT_VISIBILITIES.iter().position(|&x| (x - v).abs() < 1e-9).unwrap();
        let col = DEFAULT_BUDGETS.iter().position(|&x| (x - q).abs() < 1e-9).unwrap();
        let (x, y, h) = rect_of(p);
        for other in &panels {
            let v2: f64 = other.attribute("data-visibility").unwrap().parse().unwrap();
            let q2: f64 = other.attribute("data-budget").unwrap().parse().unwrap();
            let (x2, y2, _) = rect_of(other);
            let row2 = DEFAULT_VISIBILITIES.iter().position(|&x| (x - v2).abs() < 1e-9).unwrap();
            let col2 = DEFAULT_BUDGETS.iter().position(|&x| (x - q2).abs() < 1e-9).unwrap();
            assert_eq!(row.cmp(&row2), y.partial_cmp(&y2).unwrap());
            assert_eq!(col.cmp(&col2), x.partial_cmp(&x2).unwrap());
        }
        // every plotted value lies inside the [0, 1] axis of its panel
        for shape in p.children().filter(|c| c.has_tag_name("polyline") || c.has_tag_name("polygon")) {
            for pt in shape.attribute("points").unwrap().split_whitespace() {
                let py: f64 = pt.split(',').nth(1).unwrap().parse().unwrap();
                assert!(py >= y - 1e-9 && py <= y + h + 1e-9);
            }
        }
    }

    let mut single = r.clone();
    single.cells.retain(|c| c.key.strategy == Strategy::Null && c.key.visibility == 0.1 && c.key.budget == 0.05);
    let mut out = Vec::new();
    emit_plot(&single, Strategy::Null, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let doc = roxmltree::Document::parse(&text).unwrap();
    assert_eq!(doc.descendants().filter(|n| n.attribute("class") == Some("panel")).count(), 1);
    assert!(emit_plot(&single, Strategy::SuperLink, Vec::new()).is_err());
}

#[test]
fn analysis_examples() {
    let k4 = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
    let r = analyze_graph(&k4).unwrap();
    assert_eq!((r.nodes, r.edges), (4, 6));
    assert!((r.max_potential - 1.0).abs() < 1e-12);
    let star = Graph::from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
    assert!((analyze_graph(&star).unwrap().max_potential - 0.8613).abs() < 1e-4);
    let split = Graph::from_edges(7, [(0, 1), (1, 2), (0, 2), (3, 4), (5, 6)]).unwrap();
    let r = analyze_graph(&split).unwrap();
    assert_eq!(r.components, 3);
    assert!((r.largest_component_share - 3.0 / 7.0).abs() < 1e-12);
    assert!(r.to_string().contains("max potential"));
}
