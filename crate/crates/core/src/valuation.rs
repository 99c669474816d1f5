//! Dollar valuation of positions and the price-impact calculus.
//!
//! Market prices are held fixed across a trade, so the price impact of a
//! position is simply the drop in its dollar value between mint (pool price
//! `q`) and withdrawal (pool price `q'`). Negative impact is a gain.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::position::{position_amounts, Position};

/// Absolute tolerance, in dollars, below which an impact counts as zero.
pub const SIGN_TOLERANCE: f64 = 1e-12;

/// External dollar prices of tokens X and Y.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketPrices {
    pub px: f64,
    pub py: f64,
}

impl MarketPrices {
    pub fn new(px: f64, py: f64) -> Result<Self> {
        if !(px > 0.0 && px.is_finite()) {
            return Err(Error::InvalidPrices("p_x must be positive and finite"));
        }
        if !(py > 0.0 && py.is_finite()) {
            return Err(Error::InvalidPrices("p_y must be positive and finite"));
        }
        if !(px / py).is_finite() || px / py == 0.0 {
            return Err(Error::InvalidPrices(
                "p_x / p_y must be finite and non-zero",
            ));
        }
        Ok(MarketPrices { px, py })
    }

    /// Market exchange rate in Y per X.
    #[inline]
    pub fn ratio(&self) -> f64 {
        self.px / self.py
    }

    /// Prices after relabelling X and Y.
    pub fn swapped(&self) -> MarketPrices {
        MarketPrices {
            px: self.py,
            py: self.px,
        }
    }
}

/// `p_x x(q) + p_y y(q)`.
pub fn position_value(pos: &Position, q: f64, prices: &MarketPrices) -> f64 {
    let (x, y) = position_amounts(pos, q);
    prices.px * x + prices.py * y
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImpactReport {
    pub value_at_mint: f64,
    pub value_at_withdraw: f64,
    /// `value_at_mint - value_at_withdraw`; negative is a gain.
    pub absolute: f64,
    /// `absolute / value_at_mint`, absent when the position was worthless.
    pub relative: Option<f64>,
}

pub fn price_impact(pos: &Position, q: f64, q_after: f64, prices: &MarketPrices) -> ImpactReport {
    let value_at_mint = position_value(pos, q, prices);
    let value_at_withdraw = position_value(pos, q_after, prices);
    let absolute = value_at_mint - value_at_withdraw;
    let relative = (value_at_mint > 0.0).then(|| absolute / value_at_mint);
    ImpactReport {
        value_at_mint,
        value_at_withdraw,
        absolute,
        relative,
    }
}

/// `C = V_mint(q) - V_withdraw(q')`.
pub fn absolute_price_impact(pos: &Position, q: f64, q_after: f64, prices: &MarketPrices) -> f64 {
    position_value(pos, q, prices) - position_value(pos, q_after, prices)
}

/// The same quantity written through the token flows into the position,
/// `C = -p_x dx - p_y dy`.
pub fn price_impact_from_flows(pos: &Position, q: f64, q_after: f64, prices: &MarketPrices) -> f64 {
    let l = pos.liquidity;
    let (s0, s1) = (libm::sqrt(pos.clamp(q)), libm::sqrt(pos.clamp(q_after)));
    let dx = l * (1.0 / s1 - 1.0 / s0);
    let dy = l * (s1 - s0);
    -prices.px * dx - prices.py * dy
}

pub fn relative_price_impact(
    pos: &Position,
    q: f64,
    q_after: f64,
    prices: &MarketPrices,
) -> Result<f64> {
    price_impact(pos, q, q_after, prices)
        .relative
        .ok_or(Error::ZeroInitialValue)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ImpactSign {
    NonPositive,
    Positive,
    /// The clamped prices coincide and the position is untouched.
    Zero,
}

/// Sign of an impact value, treating dust within [`SIGN_TOLERANCE`] as
/// non-positive.
pub fn sign_of_impact(impact: f64) -> ImpactSign {
    if impact > SIGN_TOLERANCE {
        ImpactSign::Positive
    } else {
        ImpactSign::NonPositive
    }
}

/// Decides the sign of the price impact of a `(a, b)` position from the
/// clamped prices alone.
///
/// With `r = p_x / p_y`: a falling price gives `C <= 0` iff
/// `r^2 / q^ >= q'^`, a rising price iff `r^2 / q^ <= q'^`.
pub fn threshold_sign(
    q: f64,
    q_after: f64,
    lower: f64,
    upper: f64,
    prices: &MarketPrices,
) -> ImpactSign {
    let clamp = |p: f64| p.max(lower).min(upper);
    let (qh, qh_after) = (clamp(q), clamp(q_after));
    if qh == qh_after {
        return ImpactSign::Zero;
    }
    let r = prices.ratio();
    let lhs = r * r / qh;
    let nonpositive = if qh_after < qh {
        lhs >= qh_after
    } else {
        lhs <= qh_after
    };
    if nonpositive {
        ImpactSign::NonPositive
    } else {
        ImpactSign::Positive
    }
}

/// How a pool price move relates to the market price.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MoveClass {
    /// Moving away from the market price: the LP gains.
    DivergingGain,
    /// Moving toward the market price without reaching it: the LP loses.
    ConvergingLoss,
    /// Any other move; the sign comes from the threshold test over the full
    /// price axis.
    Crossing { boundary: ImpactSign },
}

pub fn classify_move(q: f64, q_after: f64, prices: &MarketPrices) -> MoveClass {
    let r = prices.ratio();
    if (q_after < q && q <= r) || (q_after > q && q >= r) {
        MoveClass::DivergingGain
    } else if (q < q_after && q_after < r) || (q > q_after && q_after > r) {
        MoveClass::ConvergingLoss
    } else {
        MoveClass::Crossing {
            boundary: threshold_sign(q, q_after, 0.0, f64::INFINITY, prices),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeeSplit {
    pub jit: f64,
    pub passive: f64,
}

/// Pro-rata split of per-interval dollar fees between passive liquidity
/// `passive[m]` and JIT liquidity `jit[m]`.
pub fn fee_shares(fees: &[f64], passive: &[f64], jit: &[f64]) -> Result<FeeSplit> {
    if passive.len() != fees.len() {
        return Err(Error::LengthMismatch {
            expected: fees.len(),
            found: passive.len(),
        });
    }
    if jit.len() != fees.len() {
        return Err(Error::LengthMismatch {
            expected: fees.len(),
            found: jit.len(),
        });
    }
    let mut split = FeeSplit {
        jit: 0.0,
        passive: 0.0,
    };
    for (m, ((&delta, &p), &l)) in fees.iter().zip(passive).zip(jit).enumerate() {
        if delta == 0.0 {
            continue;
        }
        let total = p + l;
        if !(total > 0.0) {
            return Err(Error::ZeroLiquidityFeeTick(m));
        }
        let jit_part = delta * (l / total);
        split.jit += jit_part;
        split.passive += delta - jit_part;
    }
    Ok(split)
}

/// Fee earned by one provider holding `provider[m]` of `total[m]` liquidity.
pub fn provider_fees(fees: &[f64], provider: &[f64], total: &[f64]) -> Result<f64> {
    if provider.len() != fees.len() || total.len() != fees.len() {
        return Err(Error::LengthMismatch {
            expected: fees.len(),
            found: provider.len().min(total.len()),
        });
    }
    let mut earned = 0.0;
    for (m, ((&delta, &own), &all)) in fees.iter().zip(provider).zip(total).enumerate() {
        if delta == 0.0 || own == 0.0 {
            continue;
        }
        if !(all > 0.0) {
            return Err(Error::ZeroLiquidityFeeTick(m));
        }
        earned += delta * own / all;
    }
    Ok(earned)
}
