//! Aggregation of runs and the CSV files.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::format::{round6, sig6};
use crate::{HarnessError, RunRecord};

/// One line of `runs.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub problem: String,
    pub variant: String,
    pub seed: u64,
    pub steps: usize,
    #[serde(rename = "return")]
    pub discounted_return: f64,
    pub success: bool,
    pub depleted: bool,
}

impl RunRow {
    /// The row as written, with the return rounded to six digits.
    pub fn from_record(r: &RunRecord) -> Self {
        Self {
            problem: r.problem.to_string(),
            variant: r.variant.to_string(),
            seed: r.seed,
            steps: r.steps(),
            discounted_return: round6(r.discounted_return),
            success: r.success,
            depleted: r.depleted,
        }
    }
}

/// One line of `summary.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub problem: String,
    pub variant: String,
    pub n: usize,
    pub mean: f64,
    pub ci95: f64,
    pub success_rate: f64,
}

impl SummaryRow {
    /// Whether the two confidence intervals are disjoint with `self` above.
    pub fn dominates(&self, other: &SummaryRow) -> bool {
        self.mean - self.ci95 > other.mean + other.ci95
    }
}

/// Mean, half-width `1.96 s / √n` of the 95% interval and success rate.
pub fn summarize_values(returns: &[f64], successes: &[bool]) -> Result<(f64, f64, f64), HarnessError> {
    let n = returns.len();
    if n < 2 {
        return Err(HarnessError::Config(format!("summary needs at least 2 runs, got {n}")));
    }
    let nf = n as f64;
    let mean = returns.iter().sum::<f64>() / nf;
    let var = returns.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (nf - 1.0);
    let ci95 = 1.96 * var.sqrt() / nf.sqrt();
    let rate = successes.iter().filter(|&&s| s).count() as f64 / successes.len() as f64;
    Ok((mean, ci95, rate))
}

/// One summary per `(problem, variant)`, in order of first appearance.
pub fn summarize(rows: &[RunRow]) -> Result<Vec<SummaryRow>, HarnessError> {
    let mut order: Vec<(String, String)> = Vec::new();
    let mut groups: BTreeMap<(String, String), Vec<&RunRow>> = BTreeMap::new();
    for r in rows {
        let key = (r.problem.clone(), r.variant.clone());
        let g = groups.entry(key.clone()).or_default();
        if g.is_empty() {
            order.push(key);
        }
        g.push(r);
    }
    order
        .into_iter()
        .map(|key| {
            let g = &groups[&key];
            let returns: Vec<f64> = g.iter().map(|r| r.discounted_return).collect();
            let successes: Vec<bool> = g.iter().map(|r| r.success).collect();
            let (mean, ci95, success_rate) = summarize_values(&returns, &successes)?;
            Ok(SummaryRow {
                problem: key.0,
                variant: key.1,
                n: g.len(),
                mean,
                ci95,
                success_rate,
            })
        })
        .collect()
}

pub fn write_runs<W: Write>(rows: &[RunRow], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["problem", "variant", "seed", "steps", "return", "success", "depleted"])?;
    for r in rows {
        w.write_record([
            r.problem.clone(),
            r.variant.clone(),
            r.seed.to_string(),
            r.steps.to_string(),
            sig6(r.discounted_return),
            r.success.to_string(),
            r.depleted.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_runs<R: Read>(input: R) -> Result<Vec<RunRow>, HarnessError> {
    let mut r = csv::Reader::from_reader(input);
    let expected = ["problem", "variant", "seed", "steps", "return", "success", "depleted"];
    if r.headers()?.iter().ne(expected) {
        return Err(HarnessError::Config(format!("runs file must have the columns {}", expected.join(","))));
    }
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

pub fn write_summary<W: Write>(rows: &[SummaryRow], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["problem", "variant", "n", "mean", "ci95", "success_rate"])?;
    for r in rows {
        w.write_record([
            r.problem.clone(),
            r.variant.clone(),
            r.n.to_string(),
            sig6(r.mean),
            sig6(r.ci95),
            sig6(r.success_rate),
        ])?;
    }
    w.flush()?;
    Ok(())
}
