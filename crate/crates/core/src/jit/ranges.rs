use alloc::vec::Vec;

use crate::error::Result;
use crate::jit::SwapParams;
use crate::pool::Direction;
use crate::tick::{TickGrid, TickRange};

/// Intervals `lo..=hi` crossed by a move between `q` and `q_star`: those
/// with `t_m < max(q, q*)` and `t_{m+1} > min(q, q*)`.
pub(crate) fn touched_intervals(grid: &TickGrid, q: f64, q_star: f64) -> Option<(usize, usize)> {
    if q == q_star {
        return None;
    }
    let (lo_p, hi_p) = if q < q_star { (q, q_star) } else { (q_star, q) };
    let lo = grid.interval_above(lo_p)?;
    let hi = grid.interval_below(hi_p)?;
    (lo <= hi).then_some((lo, hi))
}

/// Every tick-aligned range made only of intervals the price path touches,
/// ordered by lower then upper tick. Empty when `q_star` equals the pool
/// price.
pub fn enumerate_ranges(params: &SwapParams, q_star: f64) -> Vec<TickRange> {
    let mut out = Vec::new();
    if let Some((lo, hi)) = touched_intervals(params.pool.grid(), params.pool.price(), q_star) {
        for a in lo..=hi {
            for b in a + 1..=hi + 1 {
                out.push(TickRange { lower: a, upper: b });
            }
        }
    }
    out
}

/// Ranges admitted by the optimizer; `strict` keeps only those that
/// contain the pre-trade price.
pub(crate) fn admissible_ranges(params: &SwapParams, q_star: f64, strict: bool) -> Vec<TickRange> {
    let mut ranges = enumerate_ranges(params, q_star);
    if strict {
        let grid = params.pool.grid();
        let q = params.pool.price();
        ranges.retain(|r| {
            let (a, b) = r.prices(grid);
            a <= q && q <= b
        });
    }
    ranges
}

/// Sufficient condition for a range to lose money at every liquidity: in
/// each of its intervals on the no-JIT price path the pool pays out more
/// dollars than it takes in, fees included,
/// `1 + alpha < (dy_m p_y) / (dx_m p_x)`.
///
/// `range` is given in the swap's own grid. Returns `false` when no
/// interval of the range lies on the path.
pub fn insufficiency_check(params: &SwapParams, range: TickRange) -> Result<bool> {
    range.check(params.pool.grid())?;
    let x = params.normalized();
    let range = params.frame_range(range);
    let q = x.pool.price();
    let q_star = x.pool.final_price_no_jit(x.amount_in, Direction::XIn)?;
    Ok(insufficient_in_frame(&x, range, q, q_star))
}

pub(crate) fn insufficient_in_frame(x: &SwapParams, range: TickRange, q: f64, q_star: f64) -> bool {
    let Some((lo, hi)) = touched_intervals(x.pool.grid(), q, q_star) else {
        return false;
    };
    let grid = x.pool.grid();
    let threshold = 1.0 + x.pool.fee_rate();
    let inv_r = x.prices.py / x.prices.px;
    let mut any = false;
    for m in range.lower.max(lo)..range.upper.min(hi + 1) {
        // dy/dx inside an interval is sqrt(entry * exit), whether or not
        // passive liquidity made the swap stop there
        let entry = q.min(grid.price(m + 1));
        let exit = q_star.max(grid.price(m));
        if !(libm::sqrt(entry * exit) * inv_r > threshold) {
            return false;
        }
        any = true;
    }
    any
}
