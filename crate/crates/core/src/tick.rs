//! Exponentially spaced price ticks.
//!
//! Tick `i` of a grid sits at `1.0001^(spacing * (i - offset))` for
//! `i in 0..=M`. The `M` atomic intervals between consecutive ticks are
//! indexed by their lower tick: interval `m` spans `(t_m, t_{m+1}]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Base of the tick exponent.
pub const TICK_BASE: f64 = 1.0001;

/// Relative tolerance used when snapping a price onto a tick.
const SNAP_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TickGrid {
    spacing: u32,
    offset: i64,
    tick_count: usize,
}

impl TickGrid {
    /// `tick_count` is `M`, the index of the last tick, so the grid has
    /// `M + 1` ticks and `M` atomic intervals.
    pub fn new(spacing: u32, offset: i64, tick_count: usize) -> Result<Self> {
        if spacing == 0 {
            return Err(Error::InvalidGrid("spacing must be positive"));
        }
        if tick_count == 0 {
            return Err(Error::InvalidGrid("tick count must be positive"));
        }
        let grid = TickGrid {
            spacing,
            offset,
            tick_count,
        };
        let (lo, hi) = (grid.price(0), grid.price(tick_count));
        if !(lo > 0.0 && hi.is_finite()) {
            return Err(Error::InvalidGrid("tick prices overflow f64"));
        }
        Ok(grid)
    }

    pub fn spacing(&self) -> u32 {
        self.spacing
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    /// Index of the last tick (`M`).
    pub fn tick_count(&self) -> usize {
        self.tick_count
    }

    /// Number of atomic intervals, equal to `M`.
    pub fn interval_count(&self) -> usize {
        self.tick_count
    }

    pub fn tick_price(&self, index: usize) -> Result<f64> {
        if index > self.tick_count {
            return Err(Error::TickOutOfRange {
                index,
                tick_count: self.tick_count,
            });
        }
        Ok(self.price(index))
    }

    /// Unchecked variant of [`tick_price`](Self::tick_price).
    #[inline]
    pub fn price(&self, index: usize) -> f64 {
        debug_assert!(index <= self.tick_count);
        let exponent = i64::from(self.spacing) * (index as i64 - self.offset);
        libm::pow(TICK_BASE, exponent as f64)
    }

    pub fn min_price(&self) -> f64 {
        self.price(0)
    }

    pub fn max_price(&self) -> f64 {
        self.price(self.tick_count)
    }

    pub fn contains_price(&self, price: f64) -> bool {
        price >= self.min_price() && price <= self.max_price()
    }

    /// Real-valued tick coordinate of `price` (integral on ticks).
    fn coordinate(&self, price: f64) -> f64 {
        libm::log(price) / (f64::from(self.spacing) * libm::log(TICK_BASE)) + self.offset as f64
    }

    /// Tick index of a price lying on the grid, `None` for off-grid prices.
    pub fn index_from_price(&self, price: f64) -> Option<usize> {
        if !(price > 0.0 && price.is_finite()) {
            return None;
        }
        let rounded = libm::round(self.coordinate(price));
        if rounded < 0.0 || rounded > self.tick_count as f64 {
            return None;
        }
        let index = rounded as usize;
        let tick = self.price(index);
        ((tick - price).abs() <= SNAP_TOLERANCE * tick).then_some(index)
    }

    /// Like [`index_from_price`](Self::index_from_price) but with an error.
    pub fn require_index(&self, price: f64) -> Result<usize> {
        self.index_from_price(price).ok_or(Error::OffGrid(price))
    }

    /// Interval `m` with `t_m < price <= t_{m+1}`: the interval a price
    /// moving down starts in. `None` when `price <= t_0` or `price > t_M`.
    pub fn interval_below(&self, price: f64) -> Option<usize> {
        if !(price > self.min_price() && price <= self.max_price()) {
            return None;
        }
        let mut m = self.estimate(price);
        while m > 0 && self.price(m) >= price {
            m -= 1;
        }
        while m + 1 < self.tick_count && self.price(m + 1) < price {
            m += 1;
        }
        Some(m)
    }

    /// Interval `m` with `t_m <= price < t_{m+1}`: the interval a price
    /// moving up starts in. `None` when `price < t_0` or `price >= t_M`.
    pub fn interval_above(&self, price: f64) -> Option<usize> {
        if !(price >= self.min_price() && price < self.max_price()) {
            return None;
        }
        let mut m = self.estimate(price);
        while m > 0 && self.price(m) > price {
            m -= 1;
        }
        while m + 1 < self.tick_count && self.price(m + 1) <= price {
            m += 1;
        }
        Some(m)
    }

    fn estimate(&self, price: f64) -> usize {
        let c = libm::floor(self.coordinate(price));
        if c <= 0.0 {
            0
        } else {
            (c as usize).min(self.tick_count - 1)
        }
    }

    /// The grid of reciprocal prices: tick `i` maps to tick `M - i` and
    /// interval `m` to interval `M - 1 - m`. Applying it twice is the
    /// identity.
    pub fn mirrored(&self) -> TickGrid {
        TickGrid {
            spacing: self.spacing,
            offset: self.tick_count as i64 - self.offset,
            tick_count: self.tick_count,
        }
    }

    pub fn mirror_interval(&self, m: usize) -> usize {
        self.tick_count - 1 - m
    }

    pub fn mirror_range(&self, range: TickRange) -> TickRange {
        TickRange {
            lower: self.tick_count - range.upper,
            upper: self.tick_count - range.lower,
        }
    }
}

/// A tick-aligned price range `(t_lower, t_upper)` given by tick indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TickRange {
    pub lower: usize,
    pub upper: usize,
}

impl TickRange {
    pub fn new(lower: usize, upper: usize) -> Result<Self> {
        if lower >= upper {
            return Err(Error::InvalidPosition(
                "lower tick must be below upper tick",
            ));
        }
        Ok(TickRange { lower, upper })
    }

    pub fn check(&self, grid: &TickGrid) -> Result<()> {
        if self.lower >= self.upper {
            return Err(Error::InvalidPosition(
                "lower tick must be below upper tick",
            ));
        }
        if self.upper > grid.tick_count() {
            return Err(Error::TickOutOfRange {
                index: self.upper,
                tick_count: grid.tick_count(),
            });
        }
        Ok(())
    }

    /// Number of atomic intervals covered.
    pub fn width(&self) -> usize {
        self.upper - self.lower
    }

    /// True when atomic interval `m` lies inside the range.
    #[inline]
    pub fn covers(&self, m: usize) -> bool {
        self.lower <= m && m < self.upper
    }

    pub fn prices(&self, grid: &TickGrid) -> (f64, f64) {
        (grid.price(self.lower), grid.price(self.upper))
    }
}
