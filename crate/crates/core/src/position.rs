use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tick::{TickGrid, TickRange};

/// A liquidity position `(L, a, b)` with its range given as prices.
///
/// `lower` may be `0` and `upper` may be `+inf`, which is the full-range
/// (constant product) position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub liquidity: f64,
    pub lower: f64,
    pub upper: f64,
}

impl Position {
    pub fn new(liquidity: f64, lower: f64, upper: f64) -> Result<Self> {
        if !(liquidity >= 0.0 && liquidity.is_finite()) {
            return Err(Error::InvalidPosition(
                "liquidity must be finite and non-negative",
            ));
        }
        if !(lower >= 0.0 && lower.is_finite()) {
            return Err(Error::InvalidPosition(
                "lower price must be finite and non-negative",
            ));
        }
        if !(upper > lower) {
            return Err(Error::InvalidPosition(
                "upper price must exceed lower price",
            ));
        }
        Ok(Position {
            liquidity,
            lower,
            upper,
        })
    }

    pub fn full_range(liquidity: f64) -> Result<Self> {
        Position::new(liquidity, 0.0, f64::INFINITY)
    }

    /// The price `q` projected onto `[lower, upper]`.
    #[inline]
    pub fn clamp(&self, q: f64) -> f64 {
        q.max(self.lower).min(self.upper)
    }

    /// Token holdings `(x, y)` at pool price `q`.
    pub fn amounts(&self, q: f64) -> (f64, f64) {
        position_amounts(self, q)
    }

    /// True when the range contains the atomic interval `(lo, hi]`.
    pub fn covers(&self, lo: f64, hi: f64) -> bool {
        self.lower <= lo && hi <= self.upper
    }
}

/// Holdings of a position at pool price `q`:
/// `x = L (1/sqrt(q^) - 1/sqrt(b))`, `y = L (sqrt(q^) - sqrt(a))` with `q^`
/// the price clamped into `[a, b]`.
pub fn position_amounts(pos: &Position, q: f64) -> (f64, f64) {
    let s = libm::sqrt(pos.clamp(q));
    let inv_upper = if pos.upper.is_infinite() {
        0.0
    } else {
        1.0 / libm::sqrt(pos.upper)
    };
    let x = pos.liquidity * (1.0 / s - inv_upper);
    let y = pos.liquidity * (s - libm::sqrt(pos.lower));
    (x, y)
}

/// A position whose range is expressed in tick indices of some grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPosition {
    pub liquidity: f64,
    pub range: TickRange,
}

impl GridPosition {
    pub fn new(liquidity: f64, range: TickRange) -> Result<Self> {
        if !(liquidity >= 0.0 && liquidity.is_finite()) {
            return Err(Error::InvalidPosition(
                "liquidity must be finite and non-negative",
            ));
        }
        Ok(GridPosition { liquidity, range })
    }

    /// Liquidity contributed to atomic interval `m`.
    #[inline]
    pub fn liquidity_in(&self, m: usize) -> f64 {
        if self.range.covers(m) {
            self.liquidity
        } else {
            0.0
        }
    }

    pub fn to_position(&self, grid: &TickGrid) -> Position {
        let (lower, upper) = self.range.prices(grid);
        Position {
            liquidity: self.liquidity,
            lower,
            upper,
        }
    }

    pub fn from_position(grid: &TickGrid, pos: &Position) -> Result<Self> {
        let lower = grid.require_index(pos.lower)?;
        let upper = grid.require_index(pos.upper)?;
        GridPosition::new(pos.liquidity, TickRange::new(lower, upper)?)
    }
}

/// Total liquidity of `positions` over atomic interval `m` of `grid`.
pub fn liquidity_at(grid: &TickGrid, positions: &[Position], m: usize) -> Result<f64> {
    if m >= grid.interval_count() {
        return Err(Error::TickOutOfRange {
            index: m,
            tick_count: grid.tick_count(),
        });
    }
    let mut total = 0.0;
    for pos in positions {
        let range = GridPosition::from_position(grid, pos)?.range;
        if range.covers(m) {
            total += pos.liquidity;
        }
    }
    Ok(total)
}
