//! Concentrated-liquidity market maker (CLMM) math and just-in-time (JIT)
//! liquidity optimization.
//!
//! The crate is `no_std` and only needs `alloc`. It covers three layers:
//!
//! * [`tick`], [`position`] and [`pool`]: the tick grid, position holdings
//!   and an exact tick-walking swap engine working in `f64`.
//! * [`valuation`]: dollar valuation of positions, absolute and relative
//!   price impact, the threshold test that decides its sign, and pro-rata
//!   fee splitting.
//! * [`jit`]: the strategy space of a JIT provider sandwiching a single
//!   swap, its utility (fees minus price impact minus bid cost) and the
//!   range-by-range search for the best position, backed by the
//!   univariate solvers in [`solver`].
//!
//! Prices are always quoted as token Y per token X, so a pool holding
//! 100 X and 10 000 Y at full range sits at price 100.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod jit;
pub mod pool;
pub mod position;
pub mod solver;
pub mod tick;
pub mod valuation;

pub use error::{Error, Result};
pub use jit::{
    Archetype, JitConfig, JitDecision, SolverKind, Strategy, SwapParams, TickUtility,
    UtilityBreakdown,
};
pub use pool::{Direction, PoolState, SwapResult, TickFill};
pub use position::{GridPosition, Position};
pub use tick::{TickGrid, TickRange};
pub use valuation::{ImpactReport, ImpactSign, MarketPrices, MoveClass};
