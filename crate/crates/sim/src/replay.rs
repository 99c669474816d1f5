//! Per-event replay: the swap without JIT, with the observed JIT position
//! and with the optimizer's position, all against the event's snapshot.

use clmm_jit_core::jit::{classify_archetype, enumerate_ranges, optimal_strategy, utility};
use clmm_jit_core::position::position_amounts;
use clmm_jit_core::valuation::{absolute_price_impact, fee_shares, position_value};
use clmm_jit_core::{
    Archetype, Direction, Error, GridPosition, JitConfig, JitDecision, PoolState, Position,
    Strategy, SwapParams, SwapResult, TickRange, UtilityBreakdown,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, SimError};
use crate::ingest::SwapEvent;

/// Environment variable capping worker threads; `0` runs sequentially.
pub const THREADS_ENV: &str = "CLMM_JIT_THREADS";

pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
}

/// Maps `f` over `items` in input order, on up to `threads` workers.
pub fn par_map<T, R, F>(items: &[T], threads: Option<usize>, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match threads {
        Some(0) | Some(1) => items.iter().map(f).collect(),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| items.par_iter().map(&f).collect()),
            Err(_) => items.iter().map(f).collect(),
        },
        None => items.par_iter().map(f).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplayConfig {
    /// Solver settings; `budget` applies to events that carry neither an
    /// observed position nor a `budget_usd`.
    pub jit: JitConfig,
    pub threads: Option<usize>,
}

impl ReplayConfig {
    pub fn new(jit: JitConfig) -> Self {
        ReplayConfig {
            jit,
            threads: threads_from_env(),
        }
    }
}

/// Dollar budget `rho` of an event: the observed position's value at entry
/// plus the bid cost, else the event's own budget, else the default.
pub fn event_budget(event: &SwapEvent, jit: &JitConfig) -> f64 {
    if let Some(obs) = event.observed_jit {
        let pos = obs.to_position(event.pool.grid());
        return position_value(&pos, event.pool.price(), &event.prices) + jit.bid_cost;
    }
    event.budget.unwrap_or(jit.budget)
}

/// [`optimal_strategy`] that treats a budget not covering the bid cost as
/// staying out.
pub fn decide(params: &SwapParams, jit: &JitConfig) -> clmm_jit_core::Result<JitDecision> {
    if jit.budget > jit.bid_cost {
        return optimal_strategy(params, jit);
    }
    let q_star = params
        .pool
        .final_price_no_jit(params.amount_in, params.direction)?;
    Ok(JitDecision {
        strategy: Strategy::Bottom,
        breakdown: UtilityBreakdown::default(),
        archetype: classify_archetype(params.pool.price(), q_star, &params.prices).ok(),
        q_star,
        ranges_evaluated: 0,
    })
}

fn input_output_prices(params: &SwapParams) -> (f64, f64) {
    match params.direction {
        Direction::XIn => (params.prices.px, params.prices.py),
        Direction::YIn => (params.prices.py, params.prices.px),
    }
}

/// Outcome of one swap with an optional JIT position minted around it.
#[derive(Debug, Clone, PartialEq)]
pub struct Sandwich {
    pub swap: SwapResult,
    pub fee_jit: f64,
    pub passive_fees: f64,
    pub total_fees: f64,
    /// Value lost by the JIT position between mint and burn.
    pub jit_impact: f64,
    /// Value lost by passive liquidity, interval by interval.
    pub passive_impact: f64,
}

impl Sandwich {
    pub fn trader_out(&self) -> f64 {
        self.swap.amount_out
    }

    /// Dollar balance of trader, JIT and passive LPs; zero up to rounding.
    pub fn conservation_residual(&self, params: &SwapParams) -> f64 {
        let (p_in, p_out) = input_output_prices(params);
        let trader =
            self.swap.amount_out * p_out - (self.swap.amount_in + self.swap.total_fee()) * p_in;
        let jit = self.fee_jit - self.jit_impact;
        let passive = self.passive_fees - self.passive_impact;
        trader + jit + passive
    }
}

pub fn run_sandwich(
    params: &SwapParams,
    jit: Option<&GridPosition>,
) -> clmm_jit_core::Result<Sandwich> {
    let pool = &params.pool;
    let swap = pool.swap(params.amount_in, params.direction, jit)?;
    let (p_in, _) = input_output_prices(params);
    let fees = swap.fees_usd(p_in);
    let passive: Vec<f64> = swap
        .fills
        .iter()
        .map(|f| pool.liquidity_at(f.interval))
        .collect();
    let own: Vec<f64> = swap
        .fills
        .iter()
        .map(|f| jit.map_or(0.0, |j| j.liquidity_in(f.interval)))
        .collect();
    let split = fee_shares(&fees, &passive, &own)?;
    let (q, q_after) = (pool.price(), swap.final_price);
    let jit_impact = jit.map_or(0.0, |j| {
        absolute_price_impact(&j.to_position(pool.grid()), q, q_after, &params.prices)
    });
    let passive_impact = passive_value_change(pool, q, q_after, params);
    Ok(Sandwich {
        total_fees: fees.iter().sum(),
        fee_jit: split.jit,
        passive_fees: split.passive,
        jit_impact,
        passive_impact,
        swap,
    })
}

// each interval's passive liquidity valued as its own position
fn passive_value_change(pool: &PoolState, q: f64, q_after: f64, params: &SwapParams) -> f64 {
    let grid = pool.grid();
    let (lo, hi) = (q.min(q_after), q.max(q_after));
    let mut total = 0.0;
    for (m, &p) in pool.liquidity().iter().enumerate() {
        let (a, b) = (grid.price(m), grid.price(m + 1));
        if p == 0.0 || b < lo || a > hi {
            continue;
        }
        let pos = Position {
            liquidity: p,
            lower: a,
            upper: b,
        };
        let (x0, y0) = position_amounts(&pos, q);
        let (x1, y1) = position_amounts(&pos, q_after);
        total += params.prices.px * (x0 - x1) + params.prices.py * (y0 - y1);
    }
    total
}

/// Slippage of an executed swap against pricing the whole input at the
/// pre-trade price, measured on the trader's output.
pub fn income_slippage(swap: &SwapResult) -> f64 {
    let q = swap.initial_price;
    let ideal = match swap.direction {
        Direction::XIn => swap.amount_in * q,
        Direction::YIn => swap.amount_in / q,
    };
    (ideal - swap.amount_out) / ideal
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObservedJit {
    pub utility: f64,
    pub fee_jit: f64,
    pub impact: f64,
    /// The observed range is one of the optimizer's candidates.
    pub in_search_space: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventMetrics {
    pub archetype: Option<Archetype>,
    pub q: f64,
    pub q_star: f64,
    /// Post-trade price with the optimized position.
    pub q_prime: f64,
    pub budget: f64,
    pub real: Option<ObservedJit>,
    pub strategy: Strategy,
    pub ranges_evaluated: usize,
    pub optimized_utility: f64,
    pub fee_jit: f64,
    /// Signed price impact `C` of the optimized position.
    pub impact: f64,
    pub impact_gain: f64,
    /// `|C| / (|C| + |F|)`; absent when the optimizer stays out.
    pub impact_share: Option<f64>,
    pub passive_fees: f64,
    pub passive_fees_baseline: f64,
    pub trader_out: f64,
    pub trader_out_baseline: f64,
    pub ideal_out: f64,
    pub slippage: f64,
    pub slippage_baseline: f64,
    pub slippage_income: f64,
    pub conservation_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplayRecord {
    pub event_id: String,
    pub direction: Direction,
    pub metrics: Option<EventMetrics>,
    pub error: Option<String>,
}

impl ReplayRecord {
    pub fn real_jit_utility(&self) -> Option<f64> {
        self.metrics.as_ref()?.real.as_ref().map(|r| r.utility)
    }

    pub fn optimized_utility(&self) -> Option<f64> {
        self.metrics.as_ref().map(|m| m.optimized_utility)
    }
}

fn strategy_position(strategy: &Strategy) -> Option<GridPosition> {
    match *strategy {
        Strategy::Participate {
            liquidity, range, ..
        } => Some(GridPosition { liquidity, range }),
        Strategy::Bottom => None,
    }
}

fn observed(
    event: &SwapEvent,
    params: &SwapParams,
    jit: &JitConfig,
    q_star: f64,
) -> Result<Option<ObservedJit>, Error> {
    let Some(obs) = event.observed_jit else {
        return Ok(None);
    };
    let u = utility(params, obs.liquidity, obs.range, jit.bid_cost)?;
    let (a, b) = obs.range.prices(params.pool.grid());
    let q = params.pool.price();
    let in_space = enumerate_ranges(params, q_star).contains(&obs.range)
        && (!jit.strict_membership || (a <= q && q <= b));
    Ok(Some(ObservedJit {
        utility: u.utility,
        fee_jit: u.fees,
        impact: u.impact,
        in_search_space: in_space,
    }))
}

pub fn replay_event(event: &SwapEvent, jit: &JitConfig) -> Result<EventMetrics> {
    let wrap = |source| SimError::Event {
        event_id: event.event_id.clone(),
        source,
    };
    let params = event.params();
    let cfg = JitConfig {
        budget: event_budget(event, jit),
        ..*jit
    };
    let baseline = run_sandwich(&params, None).map_err(wrap)?;
    let decision = decide(&params, &cfg).map_err(wrap)?;
    let real = observed(event, &params, &cfg, decision.q_star).map_err(wrap)?;
    let position = strategy_position(&decision.strategy);
    let with_jit = run_sandwich(&params, position.as_ref()).map_err(wrap)?;

    let f = decision.breakdown.fees;
    let c = decision.breakdown.impact;
    let impact_share = (!decision.strategy.is_bottom() && (f.abs() + c.abs()) > 0.0)
        .then(|| c.abs() / (c.abs() + f.abs()));
    let q = params.pool.price();
    let ideal_out = match params.direction {
        Direction::XIn => params.amount_in * q,
        Direction::YIn => params.amount_in / q,
    };
    Ok(EventMetrics {
        archetype: decision.archetype,
        q,
        q_star: decision.q_star,
        q_prime: with_jit.swap.final_price,
        budget: cfg.budget,
        real,
        strategy: decision.strategy,
        ranges_evaluated: decision.ranges_evaluated,
        optimized_utility: decision.breakdown.utility,
        fee_jit: with_jit.fee_jit,
        impact: with_jit.jit_impact,
        impact_gain: with_jit.jit_impact.abs(),
        impact_share,
        passive_fees: with_jit.passive_fees,
        passive_fees_baseline: baseline.passive_fees,
        trader_out: with_jit.trader_out(),
        trader_out_baseline: baseline.trader_out(),
        ideal_out,
        slippage: with_jit.swap.slippage(),
        slippage_baseline: baseline.swap.slippage(),
        slippage_income: income_slippage(&with_jit.swap),
        conservation_residual: with_jit.conservation_residual(&params),
    })
}

/// Replays every event; failures are recorded on the event's record and
/// the batch carries on. Records come back sorted by event id.
pub fn replay(events: &[SwapEvent], config: &ReplayConfig) -> Vec<ReplayRecord> {
    let mut records = par_map(events, config.threads, |event| {
        let (metrics, error) = match replay_event(event, &config.jit) {
            Ok(m) => (Some(m), None),
            Err(e) => (None, Some(e.to_string())),
        };
        ReplayRecord {
            event_id: event.event_id.clone(),
            direction: event.direction,
            metrics,
            error,
        }
    });
    records.sort_by(|a, b| a.event_id.cmp(&b.event_id));
    records
}

/// Range in the event's grid selected by the optimizer, if any.
pub fn selected_range(metrics: &EventMetrics) -> Option<TickRange> {
    strategy_position(&metrics.strategy).map(|p| p.range)
}
