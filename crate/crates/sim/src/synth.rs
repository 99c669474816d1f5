//! Seeded synthetic swap corpora.
//!
//! Each event gets its own pool: a bell-shaped liquidity profile with a
//! few empty intervals, a trade that crosses a handful of ticks and a
//! market price placed so that the three archetypes appear in roughly equal
//! numbers. Most events carry an observed JIT position, about half of which
//! the optimizer can also pick.

use clmm_jit_core::jit::enumerate_ranges;
use clmm_jit_core::position::Position;
use clmm_jit_core::valuation::position_value;
use clmm_jit_core::{Direction, GridPosition, MarketPrices, PoolState, TickGrid, TickRange};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ingest::SwapEvent;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    pub events: usize,
    pub seed: u64,
    /// Share of events with an observed JIT position.
    pub observed_share: f64,
    pub tick_count: usize,
}

impl SynthConfig {
    pub fn new(events: usize, seed: u64) -> Self {
        SynthConfig {
            events,
            seed,
            observed_share: 0.7,
            tick_count: 60,
        }
    }
}

fn random_pool(rng: &mut ChaCha8Rng, tick_count: usize) -> PoolState {
    let spacing = [10u32, 60][rng.random_range(0..2)];
    let level: f64 = (rng.random_range(-3.0f64..8.0)).exp();
    let centre = tick_count / 2 + rng.random_range(0..5) - 2;
    let step = spacing as f64 * 1.0001f64.ln();
    let offset = centre as i64 - (level.ln() / step).round() as i64;
    let grid = TickGrid::new(spacing, offset, tick_count).expect("grid fits in f64");
    let base = 10f64.powf(rng.random_range(3.0..6.0));
    let width = rng.random_range(4.0..15.0);
    let liquidity = (0..tick_count)
        .map(|m| {
            if m != centre && rng.random_bool(0.06) {
                return 0.0;
            }
            let z = (m as f64 - centre as f64) / width;
            base * (-z * z).exp() * rng.random_range(0.5..1.5)
        })
        .collect();
    let w: f64 = rng.random_range(0.05..0.95);
    let price = grid.price(centre).powf(1.0 - w) * grid.price(centre + 1).powf(w);
    let fee = [0.0005, 0.003, 0.01][rng.random_range(0..3)];
    PoolState::new(grid, liquidity, price, fee).expect("valid synthetic pool")
}

/// Input that would move the price `intervals` ticks at the current
/// interval's liquidity.
fn trade_size(pool: &PoolState, direction: Direction, intervals: f64) -> f64 {
    let q = pool.price();
    let grid = pool.grid();
    let m = grid.interval_below(q).expect("price inside grid");
    let l = pool.liquidity_at(m);
    let factor = 1.0001f64.powf(grid.spacing() as f64 * intervals);
    match direction {
        Direction::XIn => l * (1.0 / (q / factor).sqrt() - 1.0 / q.sqrt()),
        Direction::YIn => l * ((q * factor).sqrt() - q.sqrt()),
    }
}

pub fn synthetic_corpus(config: &SynthConfig) -> Vec<SwapEvent> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut events = Vec::with_capacity(config.events);
    while events.len() < config.events {
        let i = events.len();
        let pool = random_pool(&mut rng, config.tick_count);
        let direction = if rng.random_bool(0.5) {
            Direction::XIn
        } else {
            Direction::YIn
        };
        let mut amount = trade_size(&pool, direction, rng.random_range(0.3..6.0));
        let mut q_star = None;
        for _ in 0..20 {
            match pool.final_price_no_jit(amount, direction) {
                Ok(p) => {
                    q_star = Some(p);
                    break;
                }
                Err(_) => amount *= 0.5,
            }
        }
        let Some(q_star) = q_star else { continue };
        let q = pool.price();
        if q_star == q {
            continue;
        }

        // archetype 0 overpriced, 1 arbitrageur, 2 overshoot
        let r = match rng.random_range(0..3) {
            0 => q * (q / q_star).powf(rng.random_range(0.0..1.0)),
            1 => q_star * (q_star / q).powf(rng.random_range(0.0..0.5)),
            _ => {
                let t: f64 = rng.random_range(0.05..0.95);
                q.powf(1.0 - t) * q_star.powf(t)
            }
        };
        let py: f64 = rng.random_range(0.5..2.0);
        let prices = MarketPrices::new(r * py, py).expect("positive prices");

        let grid = *pool.grid();
        let current = grid.interval_below(q).expect("price inside grid");
        let p_here = pool.liquidity_at(current).max(1.0);
        let observed_jit = rng.random_bool(config.observed_share).then(|| {
            let probe = clmm_jit_core::SwapParams::new(pool.clone(), amount, direction, prices)
                .expect("valid swap");
            let ranges = enumerate_ranges(&probe, q_star);
            let range = if rng.random_bool(0.5) && !ranges.is_empty() {
                ranges[rng.random_range(0..ranges.len())]
            } else {
                let lower = current.saturating_sub(rng.random_range(1..4));
                let upper = (current + 1 + rng.random_range(1..4)).min(grid.tick_count());
                TickRange { lower, upper }
            };
            GridPosition {
                liquidity: p_here * rng.random_range(0.5..20.0),
                range,
            }
        });
        let budget = observed_jit.is_none().then(|| {
            let unit = Position {
                liquidity: 1.0,
                lower: grid.price(current),
                upper: grid.price(current + 1),
            };
            position_value(&unit, q, &prices) * p_here * rng.random_range(1.0..10.0)
        });
        events.push(SwapEvent {
            event_id: format!("e{i:05}"),
            direction,
            amount_in: amount,
            prices,
            fee_rate: pool.fee_rate(),
            pool_id: format!("p{i:05}"),
            pool,
            observed_jit,
            budget,
        });
    }
    events
}
