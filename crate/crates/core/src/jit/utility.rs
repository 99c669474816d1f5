use alloc::vec::Vec;

use crate::error::Result;
use crate::jit::{SwapParams, TickUtility, UtilityBreakdown};
use crate::pool::Direction;
use crate::position::GridPosition;
use crate::tick::TickRange;

/// Utility of minting `liquidity` over `range` (ticks of the swap's own
/// grid) around the swap, with the swap re-run through the enlarged pool.
pub fn utility(
    params: &SwapParams,
    liquidity: f64,
    range: TickRange,
    bid_cost: f64,
) -> Result<UtilityBreakdown> {
    range.check(params.pool.grid())?;
    GridPosition::new(liquidity, range)?;
    let x = params.normalized();
    let mut out = evaluate(&x, liquidity, params.frame_range(range), bid_cost, true)?;
    for t in &mut out.per_tick {
        t.interval = params.frame_interval(t.interval);
    }
    out.per_tick.sort_by_key(|t| t.interval);
    Ok(out)
}

/// Just the utility number, without the per-interval breakdown.
pub fn utility_value(
    params: &SwapParams,
    liquidity: f64,
    range: TickRange,
    bid_cost: f64,
) -> Result<f64> {
    range.check(params.pool.grid())?;
    GridPosition::new(liquidity, range)?;
    let x = params.normalized();
    Ok(evaluate(&x, liquidity, params.frame_range(range), bid_cost, false)?.utility)
}

/// Per interval `m` of the range with fill `dx_m`, entry price `q_m` and
/// active liquidity `Lam = L + P_m`:
///
/// ```text
/// F_m = dx_m alpha p_x L / Lam
/// C_m = (-p_x dx_m + p_y dx_m q_m Lam / (dx_m sqrt(q_m) + Lam)) L / Lam
/// ```
///
/// The second term in `C_m` is the Y paid out by the interval.
pub(crate) fn evaluate(
    x: &SwapParams,
    liquidity: f64,
    range: TickRange,
    bid_cost: f64,
    keep_ticks: bool,
) -> Result<UtilityBreakdown> {
    let mut out = UtilityBreakdown {
        bid_cost,
        utility: -bid_cost,
        ..Default::default()
    };
    if liquidity == 0.0 {
        return Ok(out);
    }
    let position = GridPosition { liquidity, range };
    let swap = x.pool.swap(x.amount_in, Direction::XIn, Some(&position))?;
    let (px, py) = (x.prices.px, x.prices.py);
    let alpha = x.pool.fee_rate();
    let mut net = 0.0;
    let mut ticks = Vec::new();
    for fill in swap.fills.iter().filter(|f| range.covers(f.interval)) {
        let lam = liquidity + x.pool.liquidity_at(fill.interval);
        let share = liquidity / lam;
        let dx = fill.amount_in;
        let q_m = fill.entry_price;
        let fee = dx * alpha * px * share;
        let paid_out = dx * q_m * lam / (dx * libm::sqrt(q_m) + lam);
        let impact = (-px * dx + py * paid_out) * share;
        out.fees += fee;
        out.impact += impact;
        net += fee - impact;
        if keep_ticks {
            ticks.push(TickUtility {
                interval: fill.interval,
                fee,
                impact,
            });
        }
    }
    out.utility = net - bid_cost;
    out.per_tick = ticks;
    Ok(out)
}
