//! Pool state and the tick-walking swap engine.
//!
//! Fees are charged on top of the input: the whole `amount_in` moves the
//! price along the curve and each filled interval additionally collects
//! `fee_rate * amount_in_m` in input-token units.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::position::{GridPosition, Position};
use crate::tick::TickGrid;

/// Which token the trader pays into the pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    /// Trader sells X; the pool price falls.
    #[serde(rename = "X_IN")]
    XIn,
    /// Trader sells Y; the pool price rises.
    #[serde(rename = "Y_IN")]
    YIn,
}

impl Direction {
    pub fn flipped(self) -> Direction {
        match self {
            Direction::XIn => Direction::YIn,
            Direction::YIn => Direction::XIn,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::XIn => "X_IN",
            Direction::YIn => "Y_IN",
        }
    }
}

impl core::str::FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "X_IN" | "x_in" => Ok(Direction::XIn),
            "Y_IN" | "y_in" => Ok(Direction::YIn),
            _ => Err(Error::InvalidConfig("direction must be X_IN or Y_IN")),
        }
    }
}

/// Passive liquidity per atomic interval plus the current price.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoolState {
    grid: TickGrid,
    liquidity: Vec<f64>,
    price: f64,
    fee_rate: f64,
}

impl PoolState {
    pub fn new(grid: TickGrid, liquidity: Vec<f64>, price: f64, fee_rate: f64) -> Result<Self> {
        if liquidity.len() != grid.interval_count() {
            return Err(Error::LengthMismatch {
                expected: grid.interval_count(),
                found: liquidity.len(),
            });
        }
        if liquidity.iter().any(|p| !(*p >= 0.0 && p.is_finite())) {
            return Err(Error::InvalidPool(
                "liquidity must be finite and non-negative",
            ));
        }
        if !(fee_rate > 0.0 && fee_rate < 1.0) {
            return Err(Error::InvalidPool("fee rate must lie in (0, 1)"));
        }
        if !(price.is_finite() && grid.contains_price(price)) {
            return Err(Error::InvalidPool("current price outside the grid"));
        }
        Ok(PoolState {
            grid,
            liquidity,
            price,
            fee_rate,
        })
    }

    /// Aggregates grid-aligned positions into per-interval liquidity.
    pub fn from_positions(
        grid: TickGrid,
        positions: &[Position],
        price: f64,
        fee_rate: f64,
    ) -> Result<Self> {
        let mut liquidity = alloc::vec![0.0; grid.interval_count()];
        for pos in positions {
            let gp = GridPosition::from_position(&grid, pos)?;
            for slot in &mut liquidity[gp.range.lower..gp.range.upper] {
                *slot += gp.liquidity;
            }
        }
        PoolState::new(grid, liquidity, price, fee_rate)
    }

    pub fn grid(&self) -> &TickGrid {
        &self.grid
    }

    pub fn liquidity(&self) -> &[f64] {
        &self.liquidity
    }

    /// Passive liquidity `P_m` of atomic interval `m`.
    pub fn liquidity_at(&self, m: usize) -> f64 {
        self.liquidity[m]
    }

    pub fn price(&self) -> f64 {
        self.price
    }

    pub fn fee_rate(&self) -> f64 {
        self.fee_rate
    }

    pub fn with_price(&self, price: f64) -> Result<PoolState> {
        PoolState::new(self.grid, self.liquidity.clone(), price, self.fee_rate)
    }

    pub fn with_fee_rate(&self, fee_rate: f64) -> Result<PoolState> {
        PoolState::new(self.grid, self.liquidity.clone(), self.price, fee_rate)
    }

    /// The same pool seen with tokens X and Y relabelled: prices inverted,
    /// grid mirrored and intervals reindexed `m -> M - 1 - m`.
    pub fn mirrored(&self) -> PoolState {
        let mut liquidity = self.liquidity.clone();
        liquidity.reverse();
        PoolState {
            grid: self.grid.mirrored(),
            liquidity,
            price: 1.0 / self.price,
            fee_rate: self.fee_rate,
        }
    }

    #[inline]
    fn active(&self, m: usize, extra: Option<&GridPosition>) -> f64 {
        self.liquidity[m] + extra.map_or(0.0, |p| p.liquidity_in(m))
    }

    /// Swaps `amount_in` of the input token through the pool, optionally
    /// with an extra (JIT) position minted on top of the passive liquidity.
    pub fn swap(
        &self,
        amount_in: f64,
        direction: Direction,
        extra: Option<&GridPosition>,
    ) -> Result<SwapResult> {
        if !(amount_in > 0.0 && amount_in.is_finite()) {
            return Err(Error::ZeroAmount);
        }
        match direction {
            Direction::XIn => self.walk_down_exact_in(amount_in, extra),
            Direction::YIn => self.walk_up_exact_in(amount_in, extra),
        }
    }

    /// [`swap`](Self::swap) that also returns the post-trade pool. The
    /// receiver is left untouched.
    pub fn execute_swap(
        &self,
        amount_in: f64,
        direction: Direction,
        extra: Option<&GridPosition>,
    ) -> Result<(PoolState, SwapResult)> {
        let result = self.swap(amount_in, direction, extra)?;
        let next = PoolState {
            grid: self.grid,
            liquidity: self.liquidity.clone(),
            price: result.final_price,
            fee_rate: self.fee_rate,
        };
        Ok((next, result))
    }

    /// Post-trade price without any JIT participation (`q*`).
    pub fn final_price_no_jit(&self, amount_in: f64, direction: Direction) -> Result<f64> {
        Ok(self.swap(amount_in, direction, None)?.final_price)
    }

    /// Exact-output swap: the input needed to take `amount_out` of the
    /// output token out of the pool.
    pub fn swap_exact_out(
        &self,
        amount_out: f64,
        direction: Direction,
        extra: Option<&GridPosition>,
    ) -> Result<SwapResult> {
        if !(amount_out > 0.0 && amount_out.is_finite()) {
            return Err(Error::ZeroAmount);
        }
        match direction {
            Direction::XIn => self.walk_down_exact_out(amount_out, extra),
            Direction::YIn => self.walk_up_exact_out(amount_out, extra),
        }
    }

    fn fill(
        &self,
        interval: usize,
        amount_in: f64,
        amount_out: f64,
        entry: f64,
        exit: f64,
    ) -> TickFill {
        TickFill {
            interval,
            amount_in,
            amount_out,
            entry_price: entry,
            exit_price: exit,
            fee: amount_in * self.fee_rate,
        }
    }

    // X in, price falls: per interval dx = L (1/sqrt(q') - 1/sqrt(q)),
    // dy = L (sqrt(q) - sqrt(q')).
    fn walk_down_exact_in(&self, amount: f64, extra: Option<&GridPosition>) -> Result<SwapResult> {
        let start = self.price;
        let Some(mut m) = self.grid.interval_below(start) else {
            return Err(Error::InsufficientLiquidity { remaining: amount });
        };
        let mut price = start;
        let mut remaining = amount;
        let mut fills = Vec::new();
        loop {
            let lower = self.grid.price(m);
            let lam = self.active(m, extra);
            if lam > 0.0 {
                let sqrt_cur = libm::sqrt(price);
                let inv_cur = 1.0 / sqrt_cur;
                let capacity = lam * (1.0 / libm::sqrt(lower) - inv_cur);
                if remaining <= capacity {
                    let inv_new = inv_cur + remaining / lam;
                    let sqrt_new = 1.0 / inv_new;
                    let new_price = (sqrt_new * sqrt_new).max(lower);
                    let out = lam * (sqrt_cur - sqrt_new);
                    fills.push(self.fill(m, remaining, out, price, new_price));
                    price = new_price;
                    break;
                }
                if capacity > 0.0 {
                    let out = lam * (sqrt_cur - libm::sqrt(lower));
                    fills.push(self.fill(m, capacity, out, price, lower));
                    remaining -= capacity;
                }
            }
            price = lower;
            if m == 0 {
                return Err(Error::InsufficientLiquidity { remaining });
            }
            m -= 1;
        }
        Ok(SwapResult::new(Direction::XIn, amount, start, price, fills))
    }

    // Y in, price rises: per interval dy = L (sqrt(q') - sqrt(q)),
    // dx = L (1/sqrt(q) - 1/sqrt(q')).
    fn walk_up_exact_in(&self, amount: f64, extra: Option<&GridPosition>) -> Result<SwapResult> {
        let start = self.price;
        let Some(mut m) = self.grid.interval_above(start) else {
            return Err(Error::InsufficientLiquidity { remaining: amount });
        };
        let last = self.grid.interval_count() - 1;
        let mut price = start;
        let mut remaining = amount;
        let mut fills = Vec::new();
        loop {
            let upper = self.grid.price(m + 1);
            let lam = self.active(m, extra);
            if lam > 0.0 {
                let sqrt_cur = libm::sqrt(price);
                let sqrt_upper = libm::sqrt(upper);
                let capacity = lam * (sqrt_upper - sqrt_cur);
                if remaining <= capacity {
                    let sqrt_new = sqrt_cur + remaining / lam;
                    let new_price = (sqrt_new * sqrt_new).min(upper);
                    let out = lam * (1.0 / sqrt_cur - 1.0 / sqrt_new);
                    fills.push(self.fill(m, remaining, out, price, new_price));
                    price = new_price;
                    break;
                }
                if capacity > 0.0 {
                    let out = lam * (1.0 / sqrt_cur - 1.0 / sqrt_upper);
                    fills.push(self.fill(m, capacity, out, price, upper));
                    remaining -= capacity;
                }
            }
            price = upper;
            if m == last {
                return Err(Error::InsufficientLiquidity { remaining });
            }
            m += 1;
        }
        Ok(SwapResult::new(Direction::YIn, amount, start, price, fills))
    }

    fn walk_down_exact_out(&self, amount: f64, extra: Option<&GridPosition>) -> Result<SwapResult> {
        let start = self.price;
        let Some(mut m) = self.grid.interval_below(start) else {
            return Err(Error::InsufficientLiquidity { remaining: amount });
        };
        let mut price = start;
        let mut remaining = amount;
        let mut fills = Vec::new();
        let mut paid = 0.0;
        loop {
            let lower = self.grid.price(m);
            let lam = self.active(m, extra);
            if lam > 0.0 {
                let sqrt_cur = libm::sqrt(price);
                let sqrt_lower = libm::sqrt(lower);
                let capacity = lam * (sqrt_cur - sqrt_lower);
                if remaining <= capacity {
                    let sqrt_new = (sqrt_cur - remaining / lam).max(sqrt_lower);
                    let new_price = (sqrt_new * sqrt_new).max(lower);
                    let input = lam * (1.0 / sqrt_new - 1.0 / sqrt_cur);
                    fills.push(self.fill(m, input, remaining, price, new_price));
                    paid += input;
                    price = new_price;
                    break;
                }
                if capacity > 0.0 {
                    let input = lam * (1.0 / sqrt_lower - 1.0 / sqrt_cur);
                    fills.push(self.fill(m, input, capacity, price, lower));
                    paid += input;
                    remaining -= capacity;
                }
            }
            price = lower;
            if m == 0 {
                return Err(Error::InsufficientLiquidity { remaining });
            }
            m -= 1;
        }
        Ok(SwapResult::new(Direction::XIn, paid, start, price, fills))
    }

    fn walk_up_exact_out(&self, amount: f64, extra: Option<&GridPosition>) -> Result<SwapResult> {
        let start = self.price;
        let Some(mut m) = self.grid.interval_above(start) else {
            return Err(Error::InsufficientLiquidity { remaining: amount });
        };
        let last = self.grid.interval_count() - 1;
        let mut price = start;
        let mut remaining = amount;
        let mut fills = Vec::new();
        let mut paid = 0.0;
        loop {
            let upper = self.grid.price(m + 1);
            let lam = self.active(m, extra);
            if lam > 0.0 {
                let sqrt_cur = libm::sqrt(price);
                let sqrt_upper = libm::sqrt(upper);
                let capacity = lam * (1.0 / sqrt_cur - 1.0 / sqrt_upper);
                if remaining <= capacity {
                    let inv_new = 1.0 / sqrt_cur - remaining / lam;
                    let sqrt_new = (1.0 / inv_new).min(sqrt_upper);
                    let new_price = (sqrt_new * sqrt_new).min(upper);
                    let input = lam * (sqrt_new - sqrt_cur);
                    fills.push(self.fill(m, input, remaining, price, new_price));
                    paid += input;
                    price = new_price;
                    break;
                }
                if capacity > 0.0 {
                    let input = lam * (sqrt_upper - sqrt_cur);
                    fills.push(self.fill(m, input, capacity, price, upper));
                    paid += input;
                    remaining -= capacity;
                }
            }
            price = upper;
            if m == last {
                return Err(Error::InsufficientLiquidity { remaining });
            }
            m += 1;
        }
        Ok(SwapResult::new(Direction::YIn, paid, start, price, fills))
    }
}

/// The part of a swap executed inside one atomic interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TickFill {
    pub interval: usize,
    /// Input token absorbed by the interval.
    pub amount_in: f64,
    /// Output token released by the interval.
    pub amount_out: f64,
    /// Price when the swap entered the interval.
    pub entry_price: f64,
    /// Price when the swap left the interval (or stopped in it).
    pub exit_price: f64,
    /// Fee in input-token units, `fee_rate * amount_in`.
    pub fee: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwapResult {
    pub direction: Direction,
    pub amount_in: f64,
    pub amount_out: f64,
    pub initial_price: f64,
    pub final_price: f64,
    pub fills: Vec<TickFill>,
}

impl SwapResult {
    fn new(
        direction: Direction,
        amount_in: f64,
        initial_price: f64,
        final_price: f64,
        fills: Vec<TickFill>,
    ) -> Self {
        let amount_out = fills.iter().map(|f| f.amount_out).sum();
        SwapResult {
            direction,
            amount_in,
            amount_out,
            initial_price,
            final_price,
            fills,
        }
    }

    /// Per-interval fees in dollars given the input token's dollar price.
    pub fn fees_usd(&self, input_price_usd: f64) -> Vec<f64> {
        self.fills.iter().map(|f| f.fee * input_price_usd).collect()
    }

    /// Total fee in input-token units.
    pub fn total_fee(&self) -> f64 {
        self.fills.iter().map(|f| f.fee).sum()
    }

    pub fn filled_in(&self) -> f64 {
        self.fills.iter().map(|f| f.amount_in).sum()
    }

    pub fn fill_for(&self, interval: usize) -> Option<&TickFill> {
        self.fills.iter().find(|f| f.interval == interval)
    }

    /// Average execution price in Y per X.
    pub fn average_price(&self) -> f64 {
        match self.direction {
            Direction::XIn => self.amount_out / self.amount_in,
            Direction::YIn => self.amount_in / self.amount_out,
        }
    }

    /// Relative deviation of the average execution price from the pre-trade
    /// price, signed so that an adverse move is positive.
    pub fn slippage(&self) -> f64 {
        let q = self.initial_price;
        match self.direction {
            Direction::XIn => (q - self.average_price()) / q,
            Direction::YIn => (self.average_price() - q) / q,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tick::TickRange;

    fn full_range_pool(liquidity: f64, price: f64) -> PoolState {
        // e^{+-9.2}: wide enough to act as (0, inf) for these trades
        let grid = TickGrid::new(1000, 92, 184).unwrap();
        PoolState::new(grid, alloc::vec![liquidity; 184], price, 0.003).unwrap()
    }

    #[test]
    fn example_one_buy_ten_x() {
        let pool = full_range_pool(1000.0, 100.0);
        let r = pool.swap(1111.1111, Direction::YIn, None).unwrap();
        assert!((r.amount_out - 10.0).abs() < 1e-5, "{}", r.amount_out);
        assert!((r.final_price - 123.4568).abs() < 1e-3);
        assert!((r.average_price() - 111.11).abs() < 1e-2);
        assert!((r.slippage() - 0.1111).abs() < 1e-4);

        let exact = pool.swap_exact_out(10.0, Direction::YIn, None).unwrap();
        assert!((exact.amount_in - 1111.111_111).abs() < 1e-5);
        assert!((exact.amount_out - 10.0).abs() < 1e-12);
    }

    #[test]
    fn full_range_matches_constant_product() {
        let pool = full_range_pool(1000.0, 100.0);
        let (x, y) = (100.0, 10_000.0);
        for dx in [0.01, 1.0, 25.0, 300.0] {
            let r = pool.swap(dx, Direction::XIn, None).unwrap();
            let dy = y - 1000.0f64 * 1000.0 / (x + dx);
            assert!((r.amount_out - dy).abs() / dy < 1e-9);
        }
        for dy in [0.5, 400.0, 20_000.0] {
            let r = pool.swap(dy, Direction::YIn, None).unwrap();
            let dx = x - 1000.0f64 * 1000.0 / (y + dy);
            assert!((r.amount_out - dx).abs() / dx < 1e-9);
        }
    }

    #[test]
    fn two_interval_crossing() {
        let grid = TickGrid::new(10, 1, 2).unwrap();
        let pool = PoolState::new(grid, alloc::vec![50.0, 50.0], grid.price(2), 0.003).unwrap();
        // capacity of interval 1 from t_2 down to t_1
        let cap = 50.0 * (1.0 / grid.price(1).sqrt() - 1.0 / grid.price(2).sqrt());
        let r = pool.swap(cap * 1.5, Direction::XIn, None).unwrap();
        assert_eq!(r.fills.len(), 2);
        assert_eq!(r.fills[0].interval, 1);
        assert_eq!(r.fills[1].interval, 0);
        assert!((r.fills[0].amount_in - cap).abs() < 1e-15);
        assert!(r.final_price < grid.price(1) && r.final_price > grid.price(0));
    }

    #[test]
    fn constant_liquidity_identities() {
        let grid = TickGrid::new(100, 5, 10).unwrap();
        let pool = PoolState::new(grid, alloc::vec![3000.0; 10], 1.0, 0.003).unwrap();
        let r = pool.swap(2.0, Direction::XIn, None).unwrap();
        assert_eq!(r.fills.len(), 1);
        let (q, q1) = (r.initial_price, r.final_price);
        let f = r.fills[0];
        assert!((f.amount_in / 3000.0 - (1.0 / q1.sqrt() - 1.0 / q.sqrt())).abs() < 1e-15);
        assert!((f.amount_out / 3000.0 - (q.sqrt() - q1.sqrt())).abs() < 1e-15);
        assert!((f.amount_out - f.amount_in * q.sqrt() * q1.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn tiny_trade_barely_moves() {
        let pool = full_range_pool(1000.0, 100.0);
        let r = pool.swap(1e-12, Direction::XIn, None).unwrap();
        assert!((r.final_price - 100.0).abs() < 1e-10);
        assert!(r.amount_out < 1e-9);
    }

    #[test]
    fn empty_intervals_are_jumped() {
        let grid = TickGrid::new(10, 0, 4).unwrap();
        let pool =
            PoolState::new(grid, alloc::vec![80.0, 0.0, 0.0, 80.0], grid.price(4), 0.01).unwrap();
        let cap3 = 80.0 * (1.0 / grid.price(3).sqrt() - 1.0 / grid.price(4).sqrt());
        let r = pool.swap(cap3 + 0.01, Direction::XIn, None).unwrap();
        assert_eq!(
            r.fills.iter().map(|f| f.interval).collect::<Vec<_>>(),
            [3, 0]
        );
        assert_eq!(r.fills[1].entry_price, grid.price(1));
    }

    #[test]
    fn errors() {
        let pool = full_range_pool(1000.0, 100.0);
        assert_eq!(pool.swap(0.0, Direction::XIn, None), Err(Error::ZeroAmount));
        assert!(matches!(
            pool.swap(1e9, Direction::XIn, None),
            Err(Error::InsufficientLiquidity { .. })
        ));
        assert!(matches!(
            pool.swap(1e12, Direction::YIn, None),
            Err(Error::InsufficientLiquidity { .. })
        ));
    }

    #[test]
    fn extra_position_absorbs_part_of_the_trade() {
        let grid = TickGrid::new(10, 0, 6).unwrap();
        let pool =
            PoolState::new(grid, alloc::vec![100.0; 6], grid.price(3) * 1.0004, 0.003).unwrap();
        let q_star = pool.final_price_no_jit(0.08, Direction::XIn).unwrap();
        let jit = GridPosition::new(1e4, TickRange::new(2, 4).unwrap()).unwrap();
        let with = pool.swap(0.08, Direction::XIn, Some(&jit)).unwrap();
        assert!(with.final_price > q_star);
        assert!(with.final_price < pool.price());
    }

    #[test]
    fn execute_swap_leaves_input_untouched() {
        let pool = full_range_pool(1000.0, 100.0);
        let before = pool.clone();
        let (next, r) = pool.execute_swap(5.0, Direction::XIn, None).unwrap();
        assert_eq!(pool, before);
        assert_eq!(next.price(), r.final_price);
        assert_eq!(next.liquidity(), pool.liquidity());
    }

    #[test]
    fn mirrored_pool_swaps_symmetrically() {
        let grid = TickGrid::new(10, 4, 8).unwrap();
        let liq = alloc::vec![10.0, 40.0, 60.0, 20.0, 80.0, 30.0, 50.0, 70.0];
        let pool = PoolState::new(grid, liq, grid.price(4) * 1.0002, 0.003).unwrap();
        let a = pool.swap(0.07, Direction::XIn, None).unwrap();
        let b = pool.mirrored().swap(0.07, Direction::YIn, None).unwrap();
        assert!((a.amount_out - b.amount_out).abs() < 1e-12);
        assert!((a.final_price * b.final_price - 1.0).abs() < 1e-12);
        assert_eq!(pool.mirrored().mirrored(), pool);
    }
}
