use std::io::Write;

use super::{HarnessError, SweepResult};

pub const CSV_HEADER: &str =
    "strategy,visibility,budget,round,mean_potential,min_potential,max_potential,mean_infected_fraction,trials,seed";

/// One CSV data row.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub strategy: String,
    pub visibility: f64,
    pub budget: f64,
    pub round: u32,
    pub mean_potential: f64,
    pub min_potential: f64,
    pub max_potential: f64,
    pub mean_infected_fraction: f64,
    pub trials: usize,
    pub seed: u64,
}

fn round6(x: f64) -> f64 {
    format!("{x:.6}").parse().expect("formatted float")
}

impl SweepRow {
    /// The row as it reads back after a 6-decimal round trip.
    pub fn rounded(&self) -> Self {
        Self {
            visibility: round6(self.visibility),
            budget: round6(self.budget),
            mean_potential: round6(self.mean_potential),
            min_potential: round6(self.min_potential),
            max_potential: round6(self.max_potential),
            mean_infected_fraction: round6(self.mean_infected_fraction),
            ..self.clone()
        }
    }
}

impl SweepResult {
    /// Rows for rounds `1..=rounds`, sorted by (strategy, V, Q, round).
    pub fn rows(&self) -> Vec<SweepRow> {
        let mut rows = Vec::new();
        for cell in &self.cells {
            for r in 1..cell.series.rounds() {
                rows.push(SweepRow {
                    strategy: cell.key.strategy.id().to_string(),
                    visibility: cell.key.visibility,
                    budget: cell.key.budget,
                    round: r as u32,
                    mean_potential: cell.series.mean[r],
                    min_potential: cell.series.min[r],
                    max_potential: cell.series.max[r],
                    mean_infected_fraction: cell.mean_infected_fraction[r],
                    trials: self.trials,
                    seed: self.seed,
                });
            }
        }
        rows.sort_by(|a, b| {
            a.strategy
                .cmp(&b.strategy)
                .then(a.visibility.total_cmp(&b.visibility))
                .then(a.budget.total_cmp(&b.budget))
                .then(a.round.cmp(&b.round))
        });
        rows
    }
}

pub fn emit_csv<W: Write>(r: &SweepResult, mut sink: W) -> Result<(), HarnessError> {
    writeln!(sink, "{CSV_HEADER}")?;
    for row in r.rows() {
        writeln!(
            sink,
            "{},{:.6},{:.6},{},{:.6},{:.6},{:.6},{:.6},{},{}",
            row.strategy,
            row.visibility,
            row.budget,
            row.round,
            row.mean_potential,
            row.min_potential,
            row.max_potential,
            row.mean_infected_fraction,
            row.trials,
            row.seed
        )?;
    }
    sink.flush()?;
    Ok(())
}

pub fn parse_csv(text: &str) -> Result<Vec<SweepRow>, HarnessError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => return Err(HarnessError::Validation(vec![format!("unexpected CSV header {other:?}")])),
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        let bad = || HarnessError::Validation(vec![format!("CSV line {}: malformed row {line:?}", i + 2)]);
        if f.len() != 10 {
            return Err(bad());
        }
        let real = |s: &str| s.parse::<f64>().map_err(|_| bad());
        rows.push(SweepRow {
            strategy: f[0].to_string(),
            visibility: real(f[1])?,
            budget: real(f[2])?,
            round: f[3].parse().map_err(|_| bad())?,
            mean_potential: real(f[4])?,
            min_potential: real(f[5])?,
            max_potential: real(f[6])?,
            mean_infected_fraction: real(f[7])?,
            trials: f[8].parse().map_err(|_| bad())?,
            seed: f[9].parse().map_err(|_| bad())?,
        });
    }
    Ok(rows)
}
