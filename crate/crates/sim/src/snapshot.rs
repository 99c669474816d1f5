//! `pool.json` snapshots: grid parameters, fee, current price and the
//! non-zero passive liquidity per atomic interval.

use std::fs;
use std::path::Path;

use clmm_jit_core::{PoolState, TickGrid};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiquidityEntry {
    pub m: usize,
    #[serde(rename = "P")]
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoolSnapshot {
    pub tau: u32,
    pub iota: i64,
    pub tick_count: usize,
    pub fee_rate: f64,
    pub current_price: f64,
    /// Intervals left out hold no liquidity.
    #[serde(default)]
    pub liquidity: Vec<LiquidityEntry>,
}

impl PoolSnapshot {
    pub fn to_pool(&self) -> clmm_jit_core::Result<PoolState> {
        let grid = TickGrid::new(self.tau, self.iota, self.tick_count)?;
        let mut liquidity = vec![0.0; grid.interval_count()];
        let mut seen = vec![false; grid.interval_count()];
        for e in &self.liquidity {
            if e.m >= grid.interval_count() {
                return Err(clmm_jit_core::Error::TickOutOfRange {
                    index: e.m,
                    tick_count: self.tick_count,
                });
            }
            if seen[e.m] {
                return Err(clmm_jit_core::Error::InvalidPool(
                    "duplicate liquidity entry",
                ));
            }
            seen[e.m] = true;
            liquidity[e.m] = e.p;
        }
        PoolState::new(grid, liquidity, self.current_price, self.fee_rate)
    }

    pub fn from_pool(pool: &PoolState) -> Self {
        let grid = pool.grid();
        PoolSnapshot {
            tau: grid.spacing(),
            iota: grid.offset(),
            tick_count: grid.tick_count(),
            fee_rate: pool.fee_rate(),
            current_price: pool.price(),
            liquidity: pool
                .liquidity()
                .iter()
                .enumerate()
                .filter(|(_, p)| **p != 0.0)
                .map(|(m, &p)| LiquidityEntry { m, p })
                .collect(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| SimError::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| SimError::Json {
            path: path.into(),
            source,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("snapshot serializes");
        fs::write(path, text + "\n").map_err(|e| SimError::io(path, e))
    }
}

/// Reads and validates a snapshot file.
pub fn load_pool(path: &Path) -> Result<PoolState> {
    PoolSnapshot::load(path)?
        .to_pool()
        .map_err(|e| SimError::Snapshot {
            path: path.into(),
            message: e.to_string(),
        })
}

pub fn save_pool(pool: &PoolState, path: &Path) -> Result<()> {
    PoolSnapshot::from_pool(pool).save(path)
}
