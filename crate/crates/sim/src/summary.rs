//! Aggregate statistics over replay records.

use serde::Serialize;

use crate::error::{Result, SimError};
use crate::replay::ReplayRecord;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CdfPoint {
    pub value: f64,
    pub fraction: f64,
}

/// Empirical CDF: sorted values paired with the share of samples `<=` each.
pub fn cdf(values: &[f64]) -> Vec<CdfPoint> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &value)| CdfPoint {
            value,
            fraction: (i + 1) as f64 / n,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub events: usize,
    pub failed: usize,
    pub participated: usize,
    pub bottom: usize,
    /// Events carrying an observed JIT position.
    pub with_real: usize,
    pub total_optimized: f64,
    /// Sums over the events with an observed position only.
    pub total_real: Option<f64>,
    pub total_optimized_matched: Option<f64>,
    /// `(sum optimized - sum real) / |sum real|` over those events.
    pub uplift: Option<f64>,
    pub mean_impact_share: Option<f64>,
    pub profit_cdf: Vec<CdfPoint>,
    pub real_profit_cdf: Vec<CdfPoint>,
    pub impact_share_cdf: Vec<CdfPoint>,
}

pub fn summarize(records: &[ReplayRecord]) -> Result<Summary> {
    let ok: Vec<_> = records.iter().filter_map(|r| r.metrics.as_ref()).collect();
    if ok.is_empty() {
        return Err(SimError::EmptyInput);
    }
    let optimized: Vec<f64> = ok.iter().map(|m| m.optimized_utility).collect();
    let pairs: Vec<(f64, f64)> = ok
        .iter()
        .filter_map(|m| m.real.as_ref().map(|r| (r.utility, m.optimized_utility)))
        .collect();
    let shares: Vec<f64> = ok.iter().filter_map(|m| m.impact_share).collect();
    let participated = ok.iter().filter(|m| !m.strategy.is_bottom()).count();

    let (total_real, total_matched) = if pairs.is_empty() {
        (None, None)
    } else {
        (
            Some(pairs.iter().map(|p| p.0).sum::<f64>()),
            Some(pairs.iter().map(|p| p.1).sum::<f64>()),
        )
    };
    let uplift = match (total_real, total_matched) {
        (Some(real), Some(opt)) if real != 0.0 => Some((opt - real) / real.abs()),
        _ => None,
    };
    let real: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    Ok(Summary {
        events: records.len(),
        failed: records.len() - ok.len(),
        participated,
        bottom: ok.len() - participated,
        with_real: pairs.len(),
        total_optimized: optimized.iter().sum(),
        total_real,
        total_optimized_matched: total_matched,
        uplift,
        mean_impact_share: (!shares.is_empty())
            .then(|| shares.iter().sum::<f64>() / shares.len() as f64),
        profit_cdf: cdf(&optimized),
        real_profit_cdf: cdf(&real),
        impact_share_cdf: cdf(&shares),
    })
}
