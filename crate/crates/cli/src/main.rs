use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use contagion::harness::{
    analyze_graph, emit_csv, emit_plot, load_graph, mpc_demo, parse_key_values, run_sweep, write_plots,
    ExperimentConfig, GraphSource, HarnessError,
};
use contagion::mpc::{KeyBits, MpcConfig};

#[derive(Parser)]
#[command(name = "contagion", version, about = "Epidemic intervention sweeps on contact graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one strategy over a visibility × budget grid.
    Simulate(SimulateArgs),
    /// Run a sweep described by a key = value config file.
    Sweep(SweepArgs),
    /// Print size, stationary-entropy and spectral-gap statistics of a graph.
    Analyze(AnalyzeArgs),
    /// Run the multi-agency encrypted-walk protocol on a graph.
    MpcDemo(MpcArgs),
}

/// Flags shared by `simulate` and `sweep`; anything given overrides the config.
#[derive(Args, Default)]
struct Overrides {
    /// SNAP-style edge list.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Synthetic graph, e.g. `small-world:n=2000,k=10,beta=0.1`.
    #[arg(long)]
    synthetic: Option<String>,
    /// Strategy id(s): null, ct, spreader-central, spreader-walk, superlink.
    #[arg(long)]
    strategy: Option<String>,
    /// Visibility fraction(s), comma separated.
    #[arg(long)]
    visibility: Option<String>,
    /// Isolation budget fraction(s), comma separated.
    #[arg(long)]
    budget: Option<String>,
    #[arg(long)]
    rounds: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Explicit number of initial infections.
    #[arg(long)]
    seed_count: Option<String>,
    /// Fraction of the population initially infected (default 0.01).
    #[arg(long)]
    seed_fraction: Option<String>,
    /// distribution | bernoulli
    #[arg(long)]
    metric_mode: Option<String>,
    /// Infected nodes draw only among susceptible neighbours.
    #[arg(long)]
    draw_susceptible_only: bool,
    /// Restrict a loaded graph to its largest connected component.
    #[arg(long)]
    largest_component: bool,
    /// Worker threads (1 = sequential, 0 = all cores).
    #[arg(long)]
    workers: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    plot: Option<PathBuf>,
}

impl Overrides {
    fn apply(&self, pairs: &mut BTreeMap<String, String>) {
        if self.graph.is_some() {
            pairs.remove("synthetic");
        }
        if self.synthetic.is_some() {
            pairs.remove("graph");
        }
        if self.seed_count.is_some() {
            pairs.remove("seed-fraction");
        }
        if self.seed_fraction.is_some() {
            pairs.remove("seed-count");
        }
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        let flags = [
            ("graph", path(&self.graph)),
            ("synthetic", self.synthetic.clone()),
            ("strategy", self.strategy.clone()),
            ("visibility", self.visibility.clone()),
            ("budget", self.budget.clone()),
            ("rounds", self.rounds.clone()),
            ("trials", self.trials.clone()),
            ("seed", self.seed.clone()),
            ("seed-count", self.seed_count.clone()),
            ("seed-fraction", self.seed_fraction.clone()),
            ("metric-mode", self.metric_mode.clone()),
            ("workers", self.workers.clone()),
            ("out", path(&self.out)),
            ("plot", path(&self.plot)),
            ("draw-susceptible-only", self.draw_susceptible_only.then(|| "true".into())),
            ("largest-component", self.largest_component.then(|| "true".into())),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                pairs.insert(k.to_string(), v);
            }
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    flags: Overrides,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    flags: Overrides,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long)]
    synthetic: Option<String>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct MpcArgs {
    #[arg(long, default_value_t = 3)]
    parties: usize,
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long)]
    synthetic: Option<String>,
    #[arg(long, default_value_t = 10)]
    steps: u32,
    #[arg(long, default_value_t = 1024)]
    key_bits: u32,
    #[arg(long, default_value_t = 16)]
    fixed_bits: u32,
    /// Chance that an encounter is recorded by a second agency.
    #[arg(long, default_value_t = 0.2)]
    overlap: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write the full message transcript as CSV.
    #[arg(long)]
    transcript: Option<PathBuf>,
}

fn create(path: &Path) -> Result<BufWriter<File>, HarnessError> {
    File::create(path).map(BufWriter::new).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn graph_source(graph: &Option<PathBuf>, synthetic: &Option<String>) -> Result<GraphSource, HarnessError> {
    let mut pairs = BTreeMap::new();
    if let Some(g) = graph {
        pairs.insert("graph".to_string(), g.display().to_string());
    }
    if let Some(s) = synthetic {
        pairs.insert("synthetic".to_string(), s.clone());
    }
    Ok(ExperimentConfig::from_pairs(&pairs)?.graph)
}

fn run_experiment(pairs: BTreeMap<String, String>, single_plot: bool) -> Result<(), HarnessError> {
    let cfg = ExperimentConfig::from_pairs(&pairs)?;
    let g = load_graph(&cfg.graph, cfg.seed, cfg.largest_component)?;
    eprintln!(
        "graph: {} nodes, {} edges; {} cells x {} trials",
        g.node_count(),
        g.edge_count(),
        cfg.strategies.len() * cfg.visibility.len() * cfg.budget.len(),
        cfg.trials
    );
    let result = run_sweep(&g, &cfg)?;
    match &cfg.out {
        Some(path) => emit_csv(&result, create(path)?)?,
        None => emit_csv(&result, io::stdout().lock())?,
    }
    if let Some(plot) = &cfg.plot {
        if single_plot && cfg.strategies.len() == 1 {
            emit_plot(&result, cfg.strategies[0], create(plot)?)?;
        } else {
            for p in write_plots(&result, plot)? {
                eprintln!("wrote {}", p.display());
            }
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Simulate(a) => {
            let mut pairs = BTreeMap::new();
            a.flags.apply(&mut pairs);
            run_experiment(pairs, true)
        }
        Command::Sweep(a) => {
            let text = std::fs::read_to_string(&a.config).map_err(|source| HarnessError::Io {
                path: a.config.clone(),
                source,
            })?;
            let mut pairs = parse_key_values(&text)?;
            a.flags.apply(&mut pairs);
            run_experiment(pairs, false)
        }
        Command::Analyze(a) => {
            let source = graph_source(&a.graph, &a.synthetic)?;
            let g = load_graph(&source, a.seed, false)?;
            print!("{}", analyze_graph(&g)?);
            Ok(())
        }
        Command::MpcDemo(a) => {
            let source = graph_source(&a.graph, &a.synthetic)?;
            let g = load_graph(&source, a.seed, false)?;
            let cfg = MpcConfig {
                parties: a.parties,
                steps: a.steps,
                key_bits: KeyBits::new(a.key_bits)?,
                fixed_bits: a.fixed_bits,
                overlap: a.overlap,
                seed: a.seed,
            };
            let (_, bus, text) = mpc_demo(&g, &cfg)?;
            print!("{text}");
            if let Some(path) = &a.transcript {
                bus.dump(create(path)?)?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors; here 2 means I/O, so remap to 1.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
