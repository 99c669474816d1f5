use core::convert::Infallible;

use crate::error::{Error, Result};
use crate::jit::ranges::admissible_ranges;
use crate::jit::utility::evaluate;
use crate::jit::{
    Archetype, JitConfig, JitDecision, SolverKind, Strategy, SwapParams, UtilityBreakdown,
};
use crate::pool::Direction;
use crate::position::Position;
use crate::solver::{grid_refine_max, particle_swarm_max, Optimum, SwarmParams};
use crate::tick::TickRange;
use crate::valuation::{position_value, MarketPrices};

/// Archetype of a trade moving the pool price from `q` to `q_star` against
/// market rate `r = p_x / p_y`.
pub fn classify_archetype(q: f64, q_star: f64, prices: &MarketPrices) -> Result<Archetype> {
    if q == q_star {
        return Err(Error::DegenerateTrade);
    }
    let r = prices.ratio();
    let archetype = if q_star > q {
        if q >= r {
            Archetype::Overpriced
        } else if q_star <= r {
            Archetype::Arbitrageur
        } else {
            Archetype::Overshoot
        }
    } else if q <= r {
        Archetype::Overpriced
    } else if q_star >= r {
        Archetype::Arbitrageur
    } else {
        Archetype::Overshoot
    };
    Ok(archetype)
}

/// Dollar value of one unit of liquidity over `range` at the pool price.
fn unit_value(x: &SwapParams, range: TickRange) -> f64 {
    let (lower, upper) = range.prices(x.pool.grid());
    let unit = Position {
        liquidity: 1.0,
        lower,
        upper,
    };
    position_value(&unit, x.pool.price(), &x.prices)
}

/// Best liquidity for one range in the normalized frame, returning
/// `(L*, U(L*))`.
fn optimize_in_frame(x: &SwapParams, range: TickRange, config: &JitConfig) -> Result<Optimum> {
    let cap = (config.budget - config.bid_cost) / unit_value(x, range);
    let mut failure = None;
    let mut objective = |l: f64| -> core::result::Result<f64, Infallible> {
        match evaluate(x, l, range, config.bid_cost, false) {
            Ok(u) => Ok(u.utility),
            Err(e) => {
                failure.get_or_insert(e);
                Ok(f64::NEG_INFINITY)
            }
        }
    };
    let found = match config.solver {
        SolverKind::GridRefine => grid_refine_max(
            &mut objective,
            0.0,
            cap,
            config.grid_points,
            config.refine_iterations,
        ),
        SolverKind::Pso => {
            let swarm = SwarmParams::new(config.pso_particles, config.pso_iterations, config.seed);
            particle_swarm_max(&mut objective, 0.0, cap, &swarm)
        }
    };
    let Ok(best) = found;
    match failure {
        Some(e) => Err(e),
        None => Ok(best),
    }
}

/// Best liquidity on a single range (ticks of the swap's own grid) under
/// the budget `L V(a, b) + v <= rho`, where `V` is the value of one unit of
/// liquidity at the pre-trade price.
pub fn optimize_liquidity(
    params: &SwapParams,
    range: TickRange,
    config: &JitConfig,
) -> Result<(f64, UtilityBreakdown)> {
    config.validate()?;
    range.check(params.pool.grid())?;
    let x = params.normalized();
    let best = optimize_in_frame(&x, params.frame_range(range), config)?;
    let breakdown = crate::jit::utility(params, best.x, range, config.bid_cost)?;
    Ok((best.x, breakdown))
}

struct Candidate {
    utility: f64,
    liquidity: f64,
    range: TickRange,
}

impl Candidate {
    // higher utility, then smaller L, narrower range, lower tick
    fn beats(&self, other: &Candidate) -> bool {
        if self.utility != other.utility {
            return self.utility > other.utility;
        }
        if self.liquidity != other.liquidity {
            return self.liquidity < other.liquidity;
        }
        if self.range.width() != other.range.width() {
            return self.range.width() < other.range.width();
        }
        self.range.lower < other.range.lower
    }
}

/// Searches every admissible range for its best liquidity and keeps the
/// overall best; stays out when that best does not clear
/// `config.utility_floor`.
pub fn optimal_strategy(params: &SwapParams, config: &JitConfig) -> Result<JitDecision> {
    config.validate()?;
    let x = params.normalized();
    let q_star_frame = x.pool.final_price_no_jit(x.amount_in, Direction::XIn)?;
    let q_star = params.frame_price(q_star_frame);
    let archetype = classify_archetype(params.pool.price(), q_star, &params.prices).ok();
    let ranges = admissible_ranges(&x, q_star_frame, config.strict_membership);

    let mut best: Option<Candidate> = None;
    for &r in &ranges {
        let found = optimize_in_frame(&x, r, config)?;
        let candidate = Candidate {
            utility: found.value,
            liquidity: found.x,
            range: params.frame_range(r),
        };
        if best.as_ref().map_or(true, |b| candidate.beats(b)) {
            best = Some(candidate);
        }
    }

    let (strategy, breakdown) = match best {
        Some(c) if c.utility > config.utility_floor => {
            let breakdown = crate::jit::utility(params, c.liquidity, c.range, config.bid_cost)?;
            let (lower_price, upper_price) = c.range.prices(params.pool.grid());
            let strategy = Strategy::Participate {
                liquidity: c.liquidity,
                range: c.range,
                lower_price,
                upper_price,
            };
            (strategy, breakdown)
        }
        _ => (Strategy::Bottom, UtilityBreakdown::default()),
    };
    Ok(JitDecision {
        strategy,
        breakdown,
        archetype,
        q_star,
        ranges_evaluated: ranges.len(),
    })
}
