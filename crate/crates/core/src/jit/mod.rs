//! Just-in-time liquidity: the strategy space of a provider who mints a
//! single position right before a known swap and burns it right after.
//!
//! All of the math runs in the frame where the trader sells X (the pool
//! price falls). A `Y_IN` swap is first relabelled into that frame by
//! [`SwapParams::normalized`]; results are mapped back before they are
//! returned, so callers only ever see their own tick indices and prices.

mod ranges;
mod search;
mod utility;

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pool::{Direction, PoolState};
use crate::tick::TickRange;
use crate::valuation::MarketPrices;

pub use ranges::{enumerate_ranges, insufficiency_check};
pub use search::{classify_archetype, optimal_strategy, optimize_liquidity};
pub use utility::{utility, utility_value};

/// A swap as seen by a JIT provider: the pool it hits, the trade and the
/// market prices that value both tokens.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwapParams {
    pub pool: PoolState,
    pub amount_in: f64,
    pub direction: Direction,
    pub prices: MarketPrices,
}

impl SwapParams {
    pub fn new(
        pool: PoolState,
        amount_in: f64,
        direction: Direction,
        prices: MarketPrices,
    ) -> Result<Self> {
        if !(amount_in > 0.0 && amount_in.is_finite()) {
            return Err(Error::ZeroAmount);
        }
        Ok(SwapParams {
            pool,
            amount_in,
            direction,
            prices,
        })
    }

    /// The same swap with X and Y relabelled. Applying it twice gives back
    /// the original swap (prices up to one rounding of `1 / (1 / q)`).
    pub fn mirror(&self) -> SwapParams {
        SwapParams {
            pool: self.pool.mirrored(),
            amount_in: self.amount_in,
            direction: self.direction.flipped(),
            prices: self.prices.swapped(),
        }
    }

    /// Maps a `Y_IN` swap onto the equivalent `X_IN` swap; `X_IN` swaps are
    /// returned unchanged.
    pub fn normalized(&self) -> SwapParams {
        match self.direction {
            Direction::XIn => self.clone(),
            Direction::YIn => self.mirror(),
        }
    }

    fn is_mirrored(&self) -> bool {
        self.direction == Direction::YIn
    }

    /// Maps a range of this swap's grid into the normalized frame, or back.
    fn frame_range(&self, range: TickRange) -> TickRange {
        if self.is_mirrored() {
            self.pool.grid().mirror_range(range)
        } else {
            range
        }
    }

    fn frame_interval(&self, m: usize) -> usize {
        if self.is_mirrored() {
            self.pool.grid().mirror_interval(m)
        } else {
            m
        }
    }

    fn frame_price(&self, price: f64) -> f64 {
        if self.is_mirrored() {
            1.0 / price
        } else {
            price
        }
    }
}

/// Free-function form of [`SwapParams::normalized`].
pub fn normalize_direction(params: &SwapParams) -> SwapParams {
    params.normalized()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SolverKind {
    /// Uniform grid followed by golden-section refinement.
    #[default]
    GridRefine,
    /// Seeded particle swarm.
    Pso,
}

impl core::str::FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "GRID_REFINE" | "grid_refine" | "grid-refine" => Ok(SolverKind::GridRefine),
            "PSO" | "pso" => Ok(SolverKind::Pso),
            _ => Err(Error::InvalidConfig("solver must be GRID_REFINE or PSO")),
        }
    }
}

fn default_grid_points() -> usize {
    512
}
fn default_refine_iterations() -> usize {
    64
}
fn default_pso_particles() -> usize {
    32
}
fn default_pso_iterations() -> usize {
    200
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JitConfig {
    /// Dollar cap `rho` on position value at mint plus the bid cost.
    pub budget: f64,
    /// Constant dollar cost `v` of getting the sandwich included.
    #[serde(default)]
    pub bid_cost: f64,
    #[serde(default)]
    pub solver: SolverKind,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    #[serde(default = "default_refine_iterations")]
    pub refine_iterations: usize,
    #[serde(default = "default_pso_particles")]
    pub pso_particles: usize,
    #[serde(default = "default_pso_iterations")]
    pub pso_iterations: usize,
    #[serde(default)]
    pub seed: u64,
    /// Participate only when the best utility is strictly above this.
    #[serde(default)]
    pub utility_floor: f64,
    /// Only admit ranges that contain the pre-trade price.
    #[serde(default)]
    pub strict_membership: bool,
}

impl JitConfig {
    pub fn new(budget: f64, bid_cost: f64) -> Self {
        JitConfig {
            budget,
            bid_cost,
            solver: SolverKind::GridRefine,
            grid_points: default_grid_points(),
            refine_iterations: default_refine_iterations(),
            pso_particles: default_pso_particles(),
            pso_iterations: default_pso_iterations(),
            seed: 0,
            utility_floor: 0.0,
            strict_membership: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.bid_cost >= 0.0 && self.bid_cost.is_finite()) {
            return Err(Error::InvalidConfig(
                "bid cost must be finite and non-negative",
            ));
        }
        if self.budget.is_nan() || self.budget.is_infinite() {
            return Err(Error::InvalidConfig("budget must be finite"));
        }
        if !(self.budget > self.bid_cost) {
            return Err(Error::BudgetTooSmall {
                budget: self.budget,
                bid_cost: self.bid_cost,
            });
        }
        if self.grid_points < 2 {
            return Err(Error::InvalidConfig("grid_points must be at least 2"));
        }
        if self.solver == SolverKind::Pso && self.pso_particles < 2 {
            return Err(Error::InvalidConfig("pso_particles must be at least 2"));
        }
        if self.utility_floor.is_nan() {
            return Err(Error::InvalidConfig("utility floor must be a number"));
        }
        Ok(())
    }
}

/// What the provider does around the swap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Strategy {
    Participate {
        liquidity: f64,
        range: TickRange,
        lower_price: f64,
        upper_price: f64,
    },
    /// Stay out of the block.
    Bottom,
}

impl Strategy {
    pub fn is_bottom(&self) -> bool {
        matches!(self, Strategy::Bottom)
    }
}

/// Fee income and price impact of the position inside one atomic interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TickUtility {
    pub interval: usize,
    pub fee: f64,
    pub impact: f64,
}

/// Dollar utility `U = F - C - v` with its per-interval decomposition.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct UtilityBreakdown {
    pub fees: f64,
    pub impact: f64,
    pub bid_cost: f64,
    /// `sum_m (F_m - C_m) - v`.
    pub utility: f64,
    pub per_tick: Vec<TickUtility>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Archetype {
    /// The trade pushes the pool price away from the market price.
    Overpriced,
    /// The trade moves the pool price toward the market price.
    Arbitrageur,
    /// The trade carries the pool price across the market price.
    Overshoot,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JitDecision {
    pub strategy: Strategy,
    pub breakdown: UtilityBreakdown,
    /// `None` when the trade leaves the price where it was.
    pub archetype: Option<Archetype>,
    /// Post-trade price without JIT participation.
    pub q_star: f64,
    pub ranges_evaluated: usize,
}
