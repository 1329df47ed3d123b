use std::fmt;

use super::HarnessError;
use crate::graph::{largest_connected_component, Graph};
use crate::metrics::{eigenvalue_gap_with, network_max_potential, SpectralGap, TransitionMatrix};
use crate::mpc::{run_pipeline, Bus, MpcConfig, MpcReport};

// Large sparse graphs mix slowly; past this the gap is reported as unconverged.
const GAP_ITERATIONS: usize = 20_000;

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub nodes: usize,
    pub edges: usize,
    pub mean_degree: f64,
    pub components: usize,
    pub largest_component_nodes: usize,
    pub largest_component_share: f64,
    /// Entropy of the stationary law of the standard walk on the largest component.
    pub max_potential: f64,
    /// Lazy-chain gap on the largest component, or why it is missing.
    pub gap: Result<SpectralGap, String>,
}

/// Size and chain statistics; the chain quantities need a connected graph
/// and are taken on the largest component.
pub fn analyze_graph(g: &Graph) -> Result<AnalysisReport, HarnessError> {
    let n = g.node_count();
    let components = g.components();
    let lcc = largest_connected_component(g);
    let max_potential = network_max_potential(&lcc)?;
    let gap = if lcc.node_count() < 2 {
        Err("fewer than two nodes".to_string())
    } else {
        eigenvalue_gap_with(&TransitionMatrix::standard(&lcc).lazy(), GAP_ITERATIONS).map_err(|e| e.to_string())
    };
    Ok(AnalysisReport {
        nodes: n,
        edges: g.edge_count(),
        mean_degree: g.mean_degree(),
        components: components.len(),
        largest_component_nodes: lcc.node_count(),
        largest_component_share: if n == 0 { 0.0 } else { lcc.node_count() as f64 / n as f64 },
        max_potential,
        gap,
    })
}

impl fmt::Display for AnalysisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "nodes                 {}", self.nodes)?;
        writeln!(f, "edges                 {}", self.edges)?;
        writeln!(f, "mean degree           {:.4}", self.mean_degree)?;
        writeln!(f, "components            {}", self.components)?;
        writeln!(
            f,
            "largest component     {} ({:.4} of nodes)",
            self.largest_component_nodes, self.largest_component_share
        )?;
        writeln!(f, "max potential         {:.6}", self.max_potential)?;
        match &self.gap {
            Ok(g) => writeln!(
                f,
                "eigenvalue gap (lazy) {:.6} (lambda2 {:.6}, tol {:.0e}, {} iterations)",
                g.gap, g.lambda2, g.tolerance, g.iterations
            ),
            Err(e) => writeln!(f, "eigenvalue gap (lazy) unavailable: {e}"),
        }
    }
}

/// Run the multi-agency pipeline and render its report with transcript stats.
pub fn mpc_demo(g: &Graph, cfg: &MpcConfig) -> Result<(MpcReport, Bus, String), HarnessError> {
    let (report, bus) = run_pipeline(g, cfg)?;
    let mut text = String::new();
    use std::fmt::Write as _;
    let _ = writeln!(text, "parties               {}", report.parties);
    let _ = writeln!(text, "individuals           {}", report.individuals);
    let _ = writeln!(text, "joint edges           {}", report.joint_edges);
    for (i, j, size) in &report.psi_sizes {
        let _ = writeln!(text, "psi agency-{i} x agency-{j} {size}");
    }
    let _ = writeln!(text, "duplicates dropped    {}", report.duplicates_dropped);
    let _ = writeln!(text, "union matches input   {}", report.union_matches);
    let _ = writeln!(text, "degree sums match     {}", report.degrees_match);
    let _ = writeln!(text, "steps                 {}", cfg.steps);
    let _ = writeln!(text, "fixed-point bits      {}", cfg.fixed_bits);
    let _ = writeln!(text, "key bits              {}", cfg.key_bits.bits());
    let _ = writeln!(text, "bit exact             {}", report.bit_exact);
    let _ = writeln!(text, "max deviation fixed   {:.3e}", report.max_deviation_fixed);
    let _ = writeln!(text, "max deviation float   {:.3e}", report.max_deviation_float);
    let _ = writeln!(text, "error bound           {:.3e}", report.error_bound);
    let _ = writeln!(text, "messages              {}", report.messages);
    let _ = writeln!(text, "bytes                 {}", report.bytes);
    let mut kinds: std::collections::BTreeMap<&str, (usize, usize)> = Default::default();
    for m in bus.messages() {
        let e = kinds.entry(m.kind).or_default();
        e.0 += 1;
        e.1 += m.payload.len();
    }
    for (kind, (count, bytes)) in kinds {
        let _ = writeln!(text, "  {kind:<22}{count:>6} msgs {bytes:>10} bytes");
    }
    Ok((report, bus, text))
}
