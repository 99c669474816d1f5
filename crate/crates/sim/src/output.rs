//! Result files. Floats are written with 12 significant digits.

use std::fs;
use std::path::Path;

use clmm_jit_core::Strategy;
use serde::Serialize;
use serde_json::Value;

use crate::error::{Result, SimError};
use crate::replay::ReplayRecord;
use crate::sweep::SweepPoint;

pub const SIGNIFICANT_DIGITS: usize = 12;

/// `x` rounded to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .unwrap_or(x)
}

pub fn fmt_float(x: f64) -> String {
    format!("{}", round_sig(x))
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

/// Rounds every float inside a JSON document in place.
pub fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n
                .as_f64()
                .and_then(|x| serde_json::Number::from_f64(round_sig(x)))
            {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("output serializes");
    round_json(&mut v);
    serde_json::to_string_pretty(&v).expect("json value serializes")
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, to_json(value) + "\n").map_err(|e| SimError::io(path, e))
}

pub const RECORD_COLUMNS: [&str; 30] = [
    "event_id",
    "direction",
    "archetype",
    "q",
    "q_star",
    "q_prime",
    "budget",
    "strategy",
    "liquidity",
    "lower_tick",
    "upper_tick",
    "real_jit_utility",
    "real_fee_jit",
    "real_impact",
    "observed_in_search_space",
    "optimized_utility",
    "fee_jit",
    "impact",
    "impact_gain",
    "impact_share",
    "passive_fees",
    "passive_fees_baseline",
    "trader_out",
    "trader_out_baseline",
    "ideal_out",
    "slippage",
    "slippage_baseline",
    "slippage_income",
    "conservation_residual",
    "error",
];

fn record_row(r: &ReplayRecord) -> Vec<String> {
    let mut row = vec![r.event_id.clone(), r.direction.as_str().to_owned()];
    let Some(m) = &r.metrics else {
        row.resize(RECORD_COLUMNS.len() - 1, String::new());
        row.push(r.error.clone().unwrap_or_default());
        return row;
    };
    let archetype = m
        .archetype
        .map(|a| to_json(&a).trim_matches('"').to_owned())
        .unwrap_or_default();
    let (strategy, l, lo, hi) = match m.strategy {
        Strategy::Participate {
            liquidity, range, ..
        } => (
            "PARTICIPATE",
            fmt_float(liquidity),
            range.lower.to_string(),
            range.upper.to_string(),
        ),
        Strategy::Bottom => ("BOTTOM", String::new(), String::new(), String::new()),
    };
    row.extend([
        archetype,
        fmt_float(m.q),
        fmt_float(m.q_star),
        fmt_float(m.q_prime),
        fmt_float(m.budget),
    ]);
    row.extend([strategy.to_owned(), l, lo, hi]);
    let real = m.real.as_ref();
    row.extend([
        fmt_opt(real.map(|x| x.utility)),
        fmt_opt(real.map(|x| x.fee_jit)),
        fmt_opt(real.map(|x| x.impact)),
        real.map(|x| x.in_search_space.to_string())
            .unwrap_or_default(),
    ]);
    row.extend([m.optimized_utility, m.fee_jit, m.impact, m.impact_gain].map(fmt_float));
    row.push(fmt_opt(m.impact_share));
    row.extend(
        [
            m.passive_fees,
            m.passive_fees_baseline,
            m.trader_out,
            m.trader_out_baseline,
            m.ideal_out,
            m.slippage,
            m.slippage_baseline,
            m.slippage_income,
            m.conservation_residual,
        ]
        .map(fmt_float),
    );
    row.push(String::new());
    row
}

pub fn write_records_csv(path: &Path, records: &[ReplayRecord]) -> Result<()> {
    let csv_err = |source| SimError::Csv {
        path: path.into(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(RECORD_COLUMNS).map_err(csv_err)?;
    for r in records {
        w.write_record(record_row(r)).map_err(csv_err)?;
    }
    w.flush().map_err(|e| SimError::io(path, e))
}

pub const SWEEP_COLUMNS: [&str; 5] = [
    "budget_multiplier",
    "passive_fee_pct",
    "trader_slippage_pct",
    "trader_slippage_income_pct",
    "events",
];

pub fn write_sweep_csv(path: &Path, points: &[SweepPoint]) -> Result<()> {
    let csv_err = |source| SimError::Csv {
        path: path.into(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(SWEEP_COLUMNS).map_err(csv_err)?;
    for p in points {
        w.write_record([
            fmt_float(p.budget_multiplier),
            fmt_float(p.passive_fee_pct),
            fmt_float(p.trader_slippage_pct),
            fmt_float(p.trader_slippage_income_pct),
            p.events.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| SimError::io(path, e))
}
