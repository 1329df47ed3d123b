use std::fmt;
use std::str::FromStr;

use super::{MetricsError, ProbabilityVector, VectorKind};
use crate::sim::TrialResult;

fn plogp(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        p * p.log2()
    }
}

/// Normalised entropy `−Σ pᵢ log₂ pᵢ / log₂ N` of a (sub-)probability vector.
///
/// Entries must lie in `[0, 1]` and their total must not exceed one; for
/// such inputs the result lies in `[0, 1]`, reaching 1 exactly for the
/// uniform law over all `N` individuals.
pub fn transmission_potential(beta: &[f64], n: usize) -> Result<f64, MetricsError> {
    if n < 2 {
        return Err(MetricsError::PopulationTooSmall(n));
    }
    let mut sum = 0.0;
    let mut h = 0.0;
    for (index, &value) in beta.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) {
            return Err(MetricsError::InvalidEntry { index, value });
        }
        sum += value;
        h -= plogp(value);
    }
    if sum > 1.0 + 1e-9 {
        return Err(MetricsError::BadMass {
            sum,
            expected: "at most 1",
        });
    }
    Ok((h / (n as f64).log2()).clamp(0.0, 1.0))
}

/// Potential of the uniform law over `k` of `n` individuals: `log₂ k / log₂ n`.
pub fn uniform_support_potential(k: usize, n: usize) -> f64 {
    if k <= 1 || n < 2 {
        0.0
    } else {
        ((k as f64).log2() / (n as f64).log2()).min(1.0)
    }
}

/// Mean binary entropy (bits) of per-node infection likelihoods.
pub fn bernoulli_potential(p: &[f64]) -> Result<f64, MetricsError> {
    if p.is_empty() {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for (index, &value) in p.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) {
            return Err(MetricsError::InvalidEntry { index, value });
        }
        total -= plogp(value) + plogp(1.0 - value);
    }
    Ok((total / p.len() as f64).clamp(0.0, 1.0))
}

/// Which vector the harness feeds to the potential each round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PotentialMode {
    /// Per trial: the infection indicator normalised to a distribution over
    /// the infected set, so the potential is `log₂|I(t)| / log₂ N`.
    #[default]
    Distribution,
    /// Across trials: Monte Carlo marginals `Pr[node infected by t]`,
    /// summarised by their mean binary entropy.
    Bernoulli,
}

impl fmt::Display for PotentialMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PotentialMode::Distribution => "distribution",
            PotentialMode::Bernoulli => "bernoulli",
        })
    }
}

impl FromStr for PotentialMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "distribution" => Ok(PotentialMode::Distribution),
            "bernoulli" => Ok(PotentialMode::Bernoulli),
            other => Err(format!("unknown metric mode {other:?} (expected distribution|bernoulli)")),
        }
    }
}

/// Fraction of trials in which each node was infected by round `t`.
pub fn infection_probabilities(trials: &[TrialResult], t: usize) -> Result<ProbabilityVector, MetricsError> {
    let first = trials.first().ok_or(MetricsError::NoTrials)?;
    let n = first.infection_round.len();
    let mut counts = vec![0u64; n];
    for trial in trials {
        for (c, &r) in counts.iter_mut().zip(&trial.infection_round) {
            if (r as usize) <= t {
                *c += 1;
            }
        }
    }
    let total = trials.len() as f64;
    ProbabilityVector::new(
        counts.into_iter().map(|c| c as f64 / total).collect(),
        VectorKind::InfectionLikelihood,
    )
}

/// Per-round min/mean/max of the potential across trials.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSeries {
    pub mean: Vec<f64>,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    pub trials: usize,
}

impl PotentialSeries {
    /// Summarise per-trial series (all of equal length), reducing in trial order.
    pub fn from_trials<S: AsRef<[f64]>>(series: &[S]) -> Result<Self, MetricsError> {
        let first = series.first().ok_or(MetricsError::NoTrials)?.as_ref();
        let rounds = first.len();
        let mut sum = vec![0.0; rounds];
        let mut min = vec![f64::INFINITY; rounds];
        let mut max = vec![f64::NEG_INFINITY; rounds];
        for s in series {
            for (r, &v) in s.as_ref().iter().enumerate().take(rounds) {
                sum[r] += v;
                min[r] = min[r].min(v);
                max[r] = max[r].max(v);
            }
        }
        let trials = series.len();
        let mean = sum
            .iter()
            .zip(min.iter().zip(&max))
            .map(|(&s, (&lo, &hi))| (s / trials as f64).clamp(lo, hi))
            .collect();
        Ok(Self { mean, min, max, trials })
    }

    /// A series with one value per round (min = mean = max).
    pub fn constant(values: Vec<f64>, trials: usize) -> Self {
        Self {
            min: values.clone(),
            max: values.clone(),
            mean: values,
            trials,
        }
    }

    pub fn rounds(&self) -> usize {
        self.mean.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn potential_extremes() {
        let n = 1024;
        let uniform = vec![1.0 / n as f64; n];
        assert!((transmission_potential(&uniform, n).unwrap() - 1.0).abs() < 1e-12);
        let mut point = vec![0.0; n];
        point[17] = 1.0;
        assert_eq!(transmission_potential(&point, n).unwrap(), 0.0);
        let half = [0.5, 0.5, 0.0, 0.0];
        assert!((transmission_potential(&half, 4).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn potential_domain_errors() {
        assert_eq!(transmission_potential(&[1.0], 1), Err(MetricsError::PopulationTooSmall(1)));
        assert!(matches!(
            transmission_potential(&[0.5, 1.5], 2),
            Err(MetricsError::InvalidEntry { index: 1, .. })
        ));
        assert!(matches!(
            transmission_potential(&[0.9, 0.9], 2),
            Err(MetricsError::BadMass { .. })
        ));
    }

    #[test]
    fn uniform_support_matches_general_form() {
        for (k, n) in [(1, 10), (2, 10), (7, 100), (100, 100)] {
            let mut beta = vec![0.0; n];
            beta[..k].iter_mut().for_each(|b| *b = 1.0 / k as f64);
            let general = transmission_potential(&beta, n).unwrap();
            assert!((general - uniform_support_potential(k, n)).abs() < 1e-12);
        }
    }

    #[test]
    fn bernoulli_entropy() {
        assert_eq!(bernoulli_potential(&[0.0, 1.0]).unwrap(), 0.0);
        assert!((bernoulli_potential(&[0.5, 0.5]).unwrap() - 1.0).abs() < 1e-15);
        assert!((bernoulli_potential(&[0.5, 0.0]).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn series_bounds_hold() {
        let s = PotentialSeries::from_trials(&[vec![0.1, 0.5], vec![0.3, 0.4], vec![0.2, 0.9]]).unwrap();
        assert_eq!(s.min, vec![0.1, 0.4]);
        assert_eq!(s.max, vec![0.3, 0.9]);
        assert!((s.mean[0] - 0.2).abs() < 1e-15);
        assert!(PotentialSeries::from_trials::<Vec<f64>>(&[]).is_err());
    }
}
