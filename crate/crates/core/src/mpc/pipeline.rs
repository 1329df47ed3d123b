use std::collections::BTreeSet;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::labels::{assign_labels, dedup_edges, AgencyShare};
use super::paillier::{keygen_joint, KeyBits};
use super::shares::shared_degree_sums;
use super::walk::{distributed_walk, plaintext_fixed_walk, TransitionPart};
use super::{fixed_decode, fixed_encode, AgencyId, Bus, FixedPointParams, MpcError};
use crate::graph::Graph;
use crate::metrics::{power_iterate, ProbabilityVector, TransitionMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct MpcConfig {
    pub parties: usize,
    pub steps: u32,
    pub key_bits: KeyBits,
    pub fixed_bits: u32,
    /// Probability that an encounter is also recorded by a second agency.
    pub overlap: f64,
    pub seed: u64,
}

impl Default for MpcConfig {
    fn default() -> Self {
        Self {
            parties: 3,
            steps: 10,
            key_bits: KeyBits::new(1024).expect("supported size"),
            fixed_bits: 16,
            overlap: 0.2,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MpcReport {
    pub parties: usize,
    pub individuals: u64,
    pub joint_edges: usize,
    /// Sizes of the pairwise intersections found by PSI, `(i, j, size)`.
    pub psi_sizes: Vec<(usize, usize, usize)>,
    pub duplicates_dropped: usize,
    /// Label-space union graph equals the input graph.
    pub union_matches: bool,
    /// Securely summed degrees equal the union graph's degrees.
    pub degrees_match: bool,
    /// Decrypted integers equal the plaintext fixed-point pipeline.
    pub bit_exact: bool,
    pub max_deviation_fixed: f64,
    pub max_deviation_float: f64,
    pub error_bound: f64,
    pub messages: usize,
    pub bytes: usize,
}

/// Distribute the edges of `g` (in original ids) over `parties` agencies:
/// each edge goes to a uniformly chosen agency and, with probability
/// `overlap`, to a second one as well.
pub fn split_graph<R: Rng + ?Sized>(g: &Graph, parties: usize, overlap: f64, rng: &mut R) -> Vec<AgencyShare> {
    let mut per: Vec<Vec<(u64, u64)>> = vec![Vec::new(); parties];
    for (u, v) in g.edges() {
        let e = (g.original_id(u), g.original_id(v));
        let first = rng.gen_range(0..parties);
        per[first].push(e);
        if parties > 1 && rng.gen::<f64>() < overlap {
            let second = (first + rng.gen_range(1..parties)) % parties;
            per[second].push(e);
        }
    }
    per.into_iter()
        .enumerate()
        .map(|(i, edges)| AgencyShare::new(AgencyId(i), edges))
        .collect()
}

/// Fixed-point transition entries an agency contributes for its edges.
fn transition_part(edges: &[(u64, u64)], degree: &[u64], c: u32) -> TransitionPart {
    let one = 1u64 << c;
    let mut part = Vec::with_capacity(2 * edges.len());
    for &(a, b) in edges {
        let (a, b) = (a as usize, b as usize);
        part.push((b, a, one / degree[a]));
        part.push((a, b, one / degree[b]));
    }
    part.sort_unstable();
    part
}

/// PSI → labels → dedup → degree sums → key generation → encrypted walk →
/// joint decryption, checked against plaintext oracles.
pub fn run_pipeline(g: &Graph, cfg: &MpcConfig) -> Result<(MpcReport, Bus), MpcError> {
    let m = cfg.parties;
    if m == 0 {
        return Err(MpcError::TooFewParties { got: 0, need: 1 });
    }
    // pre-flight against the smallest modulus of the requested size
    let floor = BigUint::from(1u32) << (cfg.key_bits.bits() - 1);
    FixedPointParams::new(cfg.fixed_bits, cfg.steps, floor)?;

    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let agencies = split_graph(g, m, cfg.overlap, &mut rng);
    let mut bus = Bus::new(m);

    let labels = assign_labels(&mut bus, &agencies, &mut rng)?;
    let kept = dedup_edges(&mut bus, &agencies, &labels, &mut rng)?;
    let size = labels.size;
    if size < 2 {
        return Err(MpcError::Protocol("joint graph has fewer than two individuals".into()));
    }

    let mut local = vec![vec![0u64; size as usize]; m];
    for (i, edges) in kept.iter().enumerate() {
        for &(a, b) in edges {
            local[i][a as usize] += 1;
            local[i][b as usize] += 1;
        }
    }
    let degree = shared_degree_sums(&mut bus, &local, size, &mut rng)?;

    let joint = labels.joint();
    let union: BTreeSet<(u64, u64)> = kept.iter().flatten().copied().collect();
    let relabelled: BTreeSet<(u64, u64)> = g
        .edges()
        .map(|(u, v)| {
            let (a, b) = (joint[&g.original_id(u)], joint[&g.original_id(v)]);
            (a.min(b), a.max(b))
        })
        .collect();
    let union_matches = union == relabelled && kept.iter().map(Vec::len).sum::<usize>() == union.len();
    let mut plain_degree = vec![0u64; size as usize];
    for &(a, b) in &union {
        plain_degree[a as usize] += 1;
        plain_degree[b as usize] += 1;
    }
    let degrees_match = plain_degree == degree;
    if degree.contains(&0) {
        return Err(MpcError::Protocol("an individual ended up with no encounters".into()));
    }

    let (pk, shares) = keygen_joint(m, cfg.key_bits, &mut rng)?;
    let params = FixedPointParams::new(cfg.fixed_bits, cfg.steps, pk.n().clone())?;
    let parts: Vec<TransitionPart> = kept.iter().map(|e| transition_part(e, &degree, cfg.fixed_bits)).collect();

    // agency 1 supplies the initial load: a point mass on label 0, which it issued
    let mut v0 = vec![0.0; size as usize];
    v0[0] = 1.0;
    let out = distributed_walk(&mut bus, &pk, &shares, &v0, &parts, &params, &mut rng)?;

    let encoded: Vec<u64> = v0.iter().map(|&x| fixed_encode(x, cfg.fixed_bits)).collect::<Result<_, _>>()?;
    let plain = plaintext_fixed_walk(&encoded, &parts, cfg.steps);
    let bit_exact = plain == out.values;
    let plain_decoded: Vec<f64> = plain.iter().map(|v| fixed_decode(v, cfg.steps + 1, cfg.fixed_bits)).collect();

    let label_graph = Graph::from_edges(size as usize, union.iter().map(|&(a, b)| (a as usize, b as usize)))
        .map_err(|e| MpcError::Protocol(e.to_string()))?;
    let exact = power_iterate(
        &ProbabilityVector::point_mass(size as usize, 0),
        &TransitionMatrix::standard(&label_graph),
        cfg.steps as usize,
    )
    .map_err(|e| MpcError::Protocol(e.to_string()))?;
    let max_dev = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);

    let report = MpcReport {
        parties: m,
        individuals: size,
        joint_edges: union.len(),
        psi_sizes: labels.common.iter().map(|(&(i, j), v)| (i, j, v.len())).collect(),
        duplicates_dropped: agencies.iter().map(|a| a.edges.len()).sum::<usize>() - kept.iter().map(Vec::len).sum::<usize>(),
        union_matches,
        degrees_match,
        bit_exact,
        max_deviation_fixed: max_dev(&out.decoded, &plain_decoded),
        max_deviation_float: max_dev(&out.decoded, exact.entries()),
        error_bound: out.error_bound,
        messages: bus.messages().len(),
        bytes: bus.total_bytes(),
    };
    Ok((report, bus))
}
