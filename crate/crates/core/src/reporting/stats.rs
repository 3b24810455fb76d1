//! Per-method statistics over run bests and method comparisons.
//!
//! Conventions: the median of an even count is the lower of the two middle
//! values; `std` is the sample standard deviation (`n - 1`), reported as 0
//! for a single run.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tuner::RunResult;

/// Describes how the per-run seeds of the compared methods relate.
pub const SEED_PROTOCOL: &str = "paired seeds: run r of every method uses run_seed(seed, r)";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub method: String,
    pub runs: usize,
    pub iterations: usize,
    /// Best kept loss of every run with a nonempty kept history, in run order.
    pub per_run_best: Vec<f64>,
    pub median: Option<f64>,
    pub mean: Option<f64>,
    pub std: Option<f64>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub pruned_fraction: f64,
    pub empty_runs: usize,
}

/// Lower-middle median of unsorted values.
pub fn lower_median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Some(v[(v.len() - 1) / 2])
}

pub fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    Some(values.iter().sum::<f64>() / values.len() as f64)
}

pub fn sample_std(values: &[f64]) -> Option<f64> {
    let m = mean(values)?;
    if values.len() == 1 {
        return Some(0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    Some((ss / (values.len() - 1) as f64).sqrt())
}

/// Results are taken in run-index order, so the input order does not matter.
pub fn summarize(results: &[RunResult], method: &str) -> Result<SummaryStats> {
    if results.is_empty() {
        return Err(Error::invalid("cannot summarise zero runs"));
    }
    let iterations = results[0].all_entries.len();
    if results.iter().any(|r| r.all_entries.len() != iterations) {
        return Err(Error::invalid("runs have different evaluation budgets"));
    }
    let mut ordered: Vec<&RunResult> = results.iter().collect();
    ordered.sort_by_key(|r| r.run_index);

    let per_run_best: Vec<f64> = ordered.iter().filter_map(|r| r.best_loss()).collect();
    let total: usize = ordered.iter().map(|r| r.all_entries.len()).sum();
    let pruned: usize = ordered
        .iter()
        .map(|r| r.all_entries.len() - r.pruned_len())
        .sum();
    let pruned_fraction = if total == 0 {
        0.0
    } else {
        pruned as f64 / total as f64
    };
    Ok(SummaryStats {
        method: method.to_string(),
        runs: results.len(),
        iterations,
        median: lower_median(&per_run_best),
        mean: mean(&per_run_best),
        std: sample_std(&per_run_best),
        min: per_run_best.iter().copied().reduce(f64::min),
        max: per_run_best.iter().copied().reduce(f64::max),
        empty_runs: results.len() - per_run_best.len(),
        pruned_fraction,
        per_run_best,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub bo: SummaryStats,
    pub rs: SummaryStats,
    pub grad: Option<SummaryStats>,
    /// BO minus RS; absent when either side has no kept runs.
    pub median_delta: Option<f64>,
    pub mean_delta: Option<f64>,
    pub std_delta: Option<f64>,
    pub seed_protocol: String,
}

fn delta(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    Some(a? - b?)
}

pub fn compare(
    bo: SummaryStats,
    rs: SummaryStats,
    grad: Option<SummaryStats>,
) -> Result<ComparisonReport> {
    for other in std::iter::once(&rs).chain(grad.as_ref()) {
        if other.runs != bo.runs || other.iterations != bo.iterations {
            return Err(Error::invalid(format!(
                "budget mismatch: {} has {} runs x {} iterations, {} has {} x {}",
                bo.method, bo.runs, bo.iterations, other.method, other.runs, other.iterations
            )));
        }
    }
    Ok(ComparisonReport {
        median_delta: delta(bo.median, rs.median),
        mean_delta: delta(bo.mean, rs.mean),
        std_delta: delta(bo.std, rs.std),
        seed_protocol: SEED_PROTOCOL.to_string(),
        bo,
        rs,
        grad,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stats(method: &str, best: &[f64]) -> SummaryStats {
        SummaryStats {
            method: method.into(),
            runs: best.len(),
            iterations: 10,
            per_run_best: best.to_vec(),
            median: lower_median(best),
            mean: mean(best),
            std: sample_std(best),
            min: best.iter().copied().reduce(f64::min),
            max: best.iter().copied().reduce(f64::max),
            pruned_fraction: 0.0,
            empty_runs: 0,
        }
    }

    #[test]
    fn single_value() {
        let s = stats("bo", &[0.2]);
        assert_eq!(s.median, Some(0.2));
        assert_eq!(s.mean, Some(0.2));
        assert_eq!(s.min, Some(0.2));
        assert_eq!(s.max, Some(0.2));
        assert_eq!(s.std, Some(0.0));
    }

    #[test]
    fn even_count_uses_lower_middle() {
        assert_eq!(lower_median(&[0.3, 0.1]), Some(0.1));
        assert!((mean(&[0.1, 0.3]).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(lower_median(&[4.0, 1.0, 3.0, 2.0]), Some(2.0));
    }

    #[test]
    fn identical_stats_give_zero_deltas() {
        let s = stats("bo", &[0.1, 0.4, 0.2]);
        let r = compare(
            s.clone(),
            SummaryStats {
                method: "rs".into(),
                ..s
            },
            None,
        )
        .unwrap();
        assert_eq!(r.median_delta, Some(0.0));
        assert_eq!(r.mean_delta, Some(0.0));
        assert_eq!(r.std_delta, Some(0.0));
    }

    #[test]
    fn median_delta() {
        let r = compare(stats("bo", &[0.2]), stats("rs", &[0.3]), None).unwrap();
        assert!((r.median_delta.unwrap() + 0.1).abs() < 1e-15);
    }

    #[test]
    fn budget_mismatch_is_rejected() {
        let mut rs = stats("rs", &[0.3]);
        rs.iterations = 11;
        assert!(matches!(
            compare(stats("bo", &[0.2]), rs, None),
            Err(Error::InvalidArgument(_))
        ));
        let grad = stats("grad", &[0.3, 0.4]);
        assert!(compare(stats("bo", &[0.2]), stats("rs", &[0.3]), Some(grad)).is_err());
    }

    #[test]
    fn empty_runs_have_absent_scalars() {
        let s = stats("bo", &[]);
        assert!(s.median.is_none() && s.std.is_none() && s.min.is_none());
        let r = compare(s.clone(), stats("rs", &[]), None).unwrap();
        assert!(r.median_delta.is_none());
        assert!(summarize(&[], "bo").is_err());
    }
}
