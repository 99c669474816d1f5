//! Slow reference computations used to cross-check the fast paths.
//!
//! The swap integrator shares no code with the tick walker: it rebuilds
//! the tick table with `f64::powf`, finds active liquidity by binary
//! search and integrates the token flows in log-price with the midpoint
//! rule, `dx = L/2 p^{-1/2} du` and `dy = L/2 p^{1/2} du` for `u = ln p`.

use clmm_jit_core::jit::{enumerate_ranges, utility_value};
use clmm_jit_core::position::Position;
use clmm_jit_core::valuation::position_value;
use clmm_jit_core::{Direction, JitConfig, JitDecision, PoolState, SwapParams, TickRange};
use serde::Serialize;

pub const DEFAULT_STEPS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MicroSwap {
    pub final_price: f64,
    pub amount_out: f64,
}

/// Integrates a swap of `amount_in` with `steps` log-price steps spread
/// over the distance from the pool price to the grid edge it moves toward.
/// `None` when the input exhausts the grid.
pub fn micro_step_swap(
    pool: &PoolState,
    amount_in: f64,
    direction: Direction,
    steps: usize,
) -> Option<MicroSwap> {
    let grid = pool.grid();
    let ticks: Vec<f64> = (0..=grid.tick_count())
        .map(|i| 1.0001f64.powf(grid.spacing() as f64 * (i as f64 - grid.offset() as f64)))
        .collect();
    let logs: Vec<f64> = ticks.iter().map(|t| t.ln()).collect();
    let liquidity = pool.liquidity();
    let falling = direction == Direction::XIn;
    let q = pool.price();

    // interval the move starts in: t_m < q <= t_{m+1} falling, t_m <= q < t_{m+1} rising
    let above = if falling {
        ticks.partition_point(|t| *t < q)
    } else {
        ticks.partition_point(|t| *t <= q)
    };
    if above == 0 || above > liquidity.len() {
        return None;
    }
    let mut m = above - 1;

    let mut u = q.ln();
    let edge = if falling {
        logs[0]
    } else {
        logs[liquidity.len()]
    };
    let du_max = (u - edge).abs() / steps as f64;
    let (mut remaining, mut out) = (amount_in, 0.0);
    loop {
        let lam = liquidity[m];
        let boundary = if falling { logs[m] } else { logs[m + 1] };
        let mut left = (u - boundary).abs();
        while left > 0.0 {
            let du = du_max.min(left);
            let sign = if falling { -1.0 } else { 1.0 };
            let um = u + sign * 0.5 * du;
            let dx = 0.5 * lam * (-0.5 * um).exp() * du;
            let dy = 0.5 * lam * (0.5 * um).exp() * du;
            let (d_in, d_out) = if falling { (dx, dy) } else { (dy, dx) };
            if d_in > 0.0 && d_in >= remaining {
                // shorten the last step until its own midpoint flow matches
                let in_half = if falling { -0.5 } else { 0.5 };
                let mut h = du * remaining / d_in;
                for _ in 0..4 {
                    h = remaining / (0.5 * lam * (in_half * (u + sign * 0.5 * h)).exp());
                }
                let um = u + sign * 0.5 * h;
                let last_out = 0.5 * lam * (-in_half * um).exp() * h;
                return Some(MicroSwap {
                    final_price: (u + sign * h).exp(),
                    amount_out: out + last_out,
                });
            }
            remaining -= d_in;
            out += d_out;
            left -= du;
            u += sign * du;
        }
        u = boundary;
        if falling {
            if m == 0 {
                return None;
            }
            m -= 1;
        } else {
            if m + 1 == liquidity.len() {
                return None;
            }
            m += 1;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SwapComparison {
    pub fast: MicroSwap,
    pub oracle: MicroSwap,
    pub price_rel_dev: f64,
    pub out_rel_dev: f64,
}

impl SwapComparison {
    pub fn max_rel_dev(&self) -> f64 {
        self.price_rel_dev.max(self.out_rel_dev)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }
}

/// Tick walk against the integrator; `None` when either side fails.
pub fn compare_swap(
    pool: &PoolState,
    amount_in: f64,
    direction: Direction,
    steps: usize,
) -> Option<SwapComparison> {
    let fast = pool.swap(amount_in, direction, None).ok()?;
    let oracle = micro_step_swap(pool, amount_in, direction, steps)?;
    let fast = MicroSwap {
        final_price: fast.final_price,
        amount_out: fast.amount_out,
    };
    Some(SwapComparison {
        fast,
        oracle,
        price_rel_dev: rel(fast.final_price, oracle.final_price),
        out_rel_dev: rel(fast.amount_out, oracle.amount_out),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridBest {
    pub range: TickRange,
    pub liquidity: f64,
    pub utility: f64,
    pub candidates: usize,
}

/// Largest liquidity on `range` the budget pays for at the pool price.
pub fn liquidity_cap(params: &SwapParams, range: TickRange, config: &JitConfig) -> f64 {
    let (lower, upper) = range.prices(params.pool.grid());
    let unit = Position {
        liquidity: 1.0,
        lower,
        upper,
    };
    (config.budget - config.bid_cost) / position_value(&unit, params.pool.price(), &params.prices)
}

/// Exhaustive search over about `total` (range, L) pairs: every admissible
/// range with an evenly spaced liquidity grid from 0 to the budget cap.
pub fn grid_search(
    params: &SwapParams,
    config: &JitConfig,
    total: usize,
) -> clmm_jit_core::Result<Option<GridBest>> {
    let q_star = params
        .pool
        .final_price_no_jit(params.amount_in, params.direction)?;
    let q = params.pool.price();
    let ranges: Vec<TickRange> = enumerate_ranges(params, q_star)
        .into_iter()
        .filter(|r| {
            let (a, b) = r.prices(params.pool.grid());
            !config.strict_membership || (a <= q && q <= b)
        })
        .collect();
    if ranges.is_empty() {
        return Ok(None);
    }
    let per_range = (total / ranges.len()).max(2);
    let mut best: Option<GridBest> = None;
    let mut candidates = 0;
    for &range in &ranges {
        let cap = liquidity_cap(params, range, config);
        for i in 0..per_range {
            let l = cap * i as f64 / (per_range - 1) as f64;
            let u = utility_value(params, l, range, config.bid_cost)?;
            candidates += 1;
            if best.map_or(true, |b| u > b.utility) {
                best = Some(GridBest {
                    range,
                    liquidity: l,
                    utility: u,
                    candidates: 0,
                });
            }
        }
    }
    Ok(best.map(|b| GridBest { candidates, ..b }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UtilityComparison {
    pub optimizer_utility: f64,
    pub grid_utility: f64,
    pub candidates: usize,
    /// `optimizer - grid`; negative means the grid found something better.
    pub margin: f64,
}

/// Optimizer utility against the grid. A `Bottom` decision counts as zero,
/// which is what staying out earns.
pub fn compare_utility(
    params: &SwapParams,
    config: &JitConfig,
    decision: &JitDecision,
    total: usize,
) -> clmm_jit_core::Result<UtilityComparison> {
    let grid = grid_search(params, config, total)?;
    let grid_utility = grid.map_or(f64::NEG_INFINITY, |g| g.utility);
    let optimizer_utility = decision.breakdown.utility;
    // staying out is judged against the floor it failed to clear
    let margin = if decision.strategy.is_bottom() {
        config.utility_floor.max(0.0) - grid_utility
    } else {
        optimizer_utility - grid_utility
    };
    Ok(UtilityComparison {
        optimizer_utility,
        grid_utility,
        candidates: grid.map_or(0, |g| g.candidates),
        margin,
    })
}
