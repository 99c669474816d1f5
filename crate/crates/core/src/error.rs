use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Tick index outside `0..=M`.
    TickOutOfRange {
        index: usize,
        tick_count: usize,
    },
    /// A price that was expected to sit on the tick grid does not.
    OffGrid(f64),
    InvalidGrid(&'static str),
    InvalidPosition(&'static str),
    InvalidPool(&'static str),
    InvalidPrices(&'static str),
    ZeroAmount,
    /// The trade walked off the grid before it was fully absorbed.
    InsufficientLiquidity {
        remaining: f64,
    },
    /// Relative price impact requested for a position worth nothing at mint.
    ZeroInitialValue,
    /// A tick that collected fees has no liquidity to pay them to.
    ZeroLiquidityFeeTick(usize),
    LengthMismatch {
        expected: usize,
        found: usize,
    },
    /// Budget does not exceed the bid cost.
    BudgetTooSmall {
        budget: f64,
        bid_cost: f64,
    },
    InvalidConfig(&'static str),
    /// The trade leaves the pool price unchanged.
    DegenerateTrade,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::TickOutOfRange { index, tick_count } => {
                write!(f, "tick index {index} outside 0..={tick_count}")
            }
            Error::OffGrid(p) => write!(f, "price {p} is not on the tick grid"),
            Error::InvalidGrid(msg) => write!(f, "invalid tick grid: {msg}"),
            Error::InvalidPosition(msg) => write!(f, "invalid position: {msg}"),
            Error::InvalidPool(msg) => write!(f, "invalid pool state: {msg}"),
            Error::InvalidPrices(msg) => write!(f, "invalid market prices: {msg}"),
            Error::ZeroAmount => write!(f, "swap amount must be positive and finite"),
            Error::InsufficientLiquidity { remaining } => {
                write!(
                    f,
                    "insufficient liquidity: {remaining} input left unabsorbed at grid edge"
                )
            }
            Error::ZeroInitialValue => write!(f, "position has zero value at mint"),
            Error::ZeroLiquidityFeeTick(m) => {
                write!(f, "tick interval {m} collected fees but has no liquidity")
            }
            Error::LengthMismatch { expected, found } => {
                write!(f, "length mismatch: expected {expected}, found {found}")
            }
            Error::BudgetTooSmall { budget, bid_cost } => {
                write!(f, "budget {budget} does not exceed bid cost {bid_cost}")
            }
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::DegenerateTrade => write!(f, "trade leaves the pool price unchanged"),
        }
    }
}

impl core::error::Error for Error {}
