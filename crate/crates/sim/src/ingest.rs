//! `swaps.csv` ingestion and the matching writer.
//!
//! Columns: `event_id, direction, amount_in, p_x_usd, p_y_usd, fee_rate,
//! pool_id, jit_L, jit_lower_tick, jit_upper_tick, budget_usd`. The last
//! four may be empty. Each row references `pools/<pool_id>.json`; the row's
//! `fee_rate` overrides the snapshot's.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use clmm_jit_core::{Direction, GridPosition, MarketPrices, PoolState, SwapParams, TickRange};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::snapshot::{load_pool, save_pool};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwapRow {
    pub event_id: String,
    pub direction: String,
    pub amount_in: f64,
    pub p_x_usd: f64,
    pub p_y_usd: f64,
    pub fee_rate: f64,
    pub pool_id: String,
    #[serde(rename = "jit_L")]
    pub jit_l: Option<f64>,
    pub jit_lower_tick: Option<usize>,
    pub jit_upper_tick: Option<usize>,
    pub budget_usd: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwapEvent {
    pub event_id: String,
    pub direction: Direction,
    pub amount_in: f64,
    pub prices: MarketPrices,
    pub fee_rate: f64,
    pub pool_id: String,
    /// Snapshot with the event's fee rate applied.
    pub pool: PoolState,
    /// JIT position seen around the swap on chain, if any.
    pub observed_jit: Option<GridPosition>,
    pub budget: Option<f64>,
}

impl SwapEvent {
    pub fn params(&self) -> SwapParams {
        SwapParams {
            pool: self.pool.clone(),
            amount_in: self.amount_in,
            direction: self.direction,
            prices: self.prices,
        }
    }

    pub fn to_row(&self) -> SwapRow {
        let jit = self.observed_jit;
        SwapRow {
            event_id: self.event_id.clone(),
            direction: self.direction.as_str().to_owned(),
            amount_in: self.amount_in,
            p_x_usd: self.prices.px,
            p_y_usd: self.prices.py,
            fee_rate: self.fee_rate,
            pool_id: self.pool_id.clone(),
            jit_l: jit.map(|j| j.liquidity),
            jit_lower_tick: jit.map(|j| j.range.lower),
            jit_upper_tick: jit.map(|j| j.range.upper),
            budget_usd: self.budget,
        }
    }
}

pub fn pool_path(pools_dir: &Path, pool_id: &str) -> PathBuf {
    pools_dir.join(format!("{pool_id}.json"))
}

fn valid_pool_id(id: &str) -> bool {
    !id.is_empty()
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
        && id != "."
        && id != ".."
}

fn check_row(row: &SwapRow, pool: &PoolState) -> std::result::Result<SwapEvent, String> {
    if row.event_id.trim().is_empty() {
        return Err("event_id is empty".into());
    }
    let direction: Direction = row
        .direction
        .parse()
        .map_err(|e: clmm_jit_core::Error| e.to_string())?;
    if !(row.amount_in > 0.0 && row.amount_in.is_finite()) {
        return Err(format!("amount_in must be positive, got {}", row.amount_in));
    }
    let prices = MarketPrices::new(row.p_x_usd, row.p_y_usd).map_err(|e| e.to_string())?;
    let pool = pool
        .with_fee_rate(row.fee_rate)
        .map_err(|e| e.to_string())?;
    let observed_jit = match (row.jit_l, row.jit_lower_tick, row.jit_upper_tick) {
        (None, None, None) => None,
        (Some(l), Some(lower), Some(upper)) => {
            if !(l > 0.0 && l.is_finite()) {
                return Err(format!("jit_L must be positive, got {l}"));
            }
            let range = TickRange::new(lower, upper).map_err(|e| e.to_string())?;
            range.check(pool.grid()).map_err(|e| e.to_string())?;
            Some(GridPosition {
                liquidity: l,
                range,
            })
        }
        _ => return Err("jit_L, jit_lower_tick and jit_upper_tick must be given together".into()),
    };
    if let Some(b) = row.budget_usd {
        if !(b > 0.0 && b.is_finite()) {
            return Err(format!("budget_usd must be positive, got {b}"));
        }
    }
    Ok(SwapEvent {
        event_id: row.event_id.clone(),
        direction,
        amount_in: row.amount_in,
        prices,
        fee_rate: row.fee_rate,
        pool_id: row.pool_id.clone(),
        pool,
        observed_jit,
        budget: row.budget_usd,
    })
}

/// Reads `swaps_path` and the snapshots it references from `pools_dir`.
/// Errors name the offending line of the CSV file.
pub fn ingest(swaps_path: &Path, pools_dir: &Path) -> Result<Vec<SwapEvent>> {
    let csv_err = |source| SimError::Csv {
        path: swaps_path.into(),
        source,
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(swaps_path)
        .map_err(csv_err)?;
    let headers = reader.headers().map_err(csv_err)?.clone();
    let mut pools: HashMap<String, PoolState> = HashMap::new();
    let mut ids = HashSet::new();
    let mut events = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        let row_no = record.position().map_or(0, |p| p.line());
        let fail = |message: String| SimError::Row {
            path: swaps_path.into(),
            row: row_no,
            message,
        };
        let row: SwapRow = record
            .deserialize(Some(&headers))
            .map_err(|e| fail(e.to_string()))?;
        if !valid_pool_id(&row.pool_id) {
            return Err(fail(format!("invalid pool_id {:?}", row.pool_id)));
        }
        if !pools.contains_key(&row.pool_id) {
            let path = pool_path(pools_dir, &row.pool_id);
            if !path.is_file() {
                return Err(SimError::MissingPool {
                    pool_id: row.pool_id.clone(),
                    path,
                });
            }
            pools.insert(row.pool_id.clone(), load_pool(&path)?);
        }
        let event = check_row(&row, &pools[&row.pool_id]).map_err(fail)?;
        if !ids.insert(event.event_id.clone()) {
            return Err(fail(format!("duplicate event_id {:?}", event.event_id)));
        }
        events.push(event);
    }
    Ok(events)
}

/// Writes `swaps.csv` plus one snapshot per distinct pool id under
/// `dir/pools`. Floats keep full precision so the corpus reads back
/// unchanged.
pub fn write_corpus(dir: &Path, events: &[SwapEvent]) -> Result<(PathBuf, PathBuf)> {
    let pools_dir = dir.join("pools");
    fs::create_dir_all(&pools_dir).map_err(|e| SimError::io(&pools_dir, e))?;
    let swaps = dir.join("swaps.csv");
    let csv_err = |source| SimError::Csv {
        path: swaps.clone(),
        source,
    };
    let mut writer = csv::Writer::from_path(&swaps).map_err(csv_err)?;
    let mut written = HashSet::new();
    for event in events {
        writer.serialize(event.to_row()).map_err(csv_err)?;
        if written.insert(event.pool_id.clone()) {
            save_pool(&event.pool, &pool_path(&pools_dir, &event.pool_id))?;
        }
    }
    writer.flush().map_err(|e| SimError::io(&swaps, e))?;
    Ok((swaps, pools_dir))
}
