use super::{reversible_stationary, MetricsError, TransitionMatrix};
use crate::par::{fill_indexed, Execution};
use crate::rng::mix64;

/// Second eigenvalue magnitude of a reversible chain and the gap `1 − λ₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralGap {
    pub lambda2: f64,
    pub gap: f64,
    /// Declared accuracy of `lambda2`.
    pub tolerance: f64,
    pub iterations: usize,
    /// Final `‖S²x − μx‖₂` of the iterate.
    pub residual: f64,
}

const TOLERANCE: f64 = 1e-8;
const RESIDUAL_TARGET: f64 = 1e-9;
const MAX_ITERATIONS: usize = 500_000;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(x: &mut [f64]) -> f64 {
    let norm = dot(x, x).sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
    norm
}

fn deflate(x: &mut [f64], u: &[f64]) {
    let c = dot(x, u);
    x.iter_mut().zip(u).for_each(|(v, ui)| *v -= c * ui);
}

/// `1 − λ₂` where `λ₂` is the second largest eigenvalue magnitude of `p`.
///
/// The chain is symmetrised as `S = D^{1/2} P D^{-1/2}` with `D = diag(π)`,
/// and `S²` is power-iterated orthogonally to `√π`. The Rayleigh quotient
/// `μ` of `S²` gives `λ₂ = √μ`. Bipartite chains therefore report a zero
/// gap; pass `p.lazy()` for the lazy chain.
pub fn eigenvalue_gap(p: &TransitionMatrix) -> Result<SpectralGap, MetricsError> {
    eigenvalue_gap_with(p, MAX_ITERATIONS)
}

/// [`eigenvalue_gap`] with an explicit iteration cap.
pub fn eigenvalue_gap_with(p: &TransitionMatrix, max_iterations: usize) -> Result<SpectralGap, MetricsError> {
    let n = p.states();
    if n < 2 {
        return Err(MetricsError::PopulationTooSmall(n));
    }
    let pi = reversible_stationary(p)?.into_entries();
    let sqrt_pi: Vec<f64> = pi.iter().map(|x| x.sqrt()).collect();
    let apply = |x: &[f64], out: &mut [f64]| {
        fill_indexed(out, Execution::Ambient, |i| {
            sqrt_pi[i] * p.row(i).map(|(j, pij)| pij * x[j] / sqrt_pi[j]).sum::<f64>()
        });
    };

    let mut x: Vec<f64> = (0..n)
        .map(|i| (mix64(i as u64 ^ 0x5eed) >> 11) as f64 / (1u64 << 53) as f64 - 0.5)
        .collect();
    deflate(&mut x, &sqrt_pi);
    normalize(&mut x);
    let mut y = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for iteration in 1..=max_iterations {
        apply(&x, &mut y);
        apply(&y, &mut z);
        deflate(&mut z, &sqrt_pi);
        let mu = dot(&x, &z);
        residual = x
            .iter()
            .zip(&z)
            .map(|(xi, zi)| (zi - mu * xi).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual <= RESIDUAL_TARGET || mu <= 0.0 {
            let lambda2 = mu.max(0.0).sqrt();
            return Ok(SpectralGap {
                lambda2,
                gap: 1.0 - lambda2,
                tolerance: TOLERANCE,
                iterations: iteration,
                residual,
            });
        }
        if normalize(&mut z) == 0.0 {
            break;
        }
        std::mem::swap(&mut x, &mut z);
    }
    Err(MetricsError::NonConvergence {
        residual,
        iterations: max_iterations,
    })
}
