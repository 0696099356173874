use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the computational modules.
///
/// Each variant has a stable name (see [`Error::name`]) that the command
/// line front end prints next to the one-line cause.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("probabilities sum to {sum}, expected 1 within {tol:e}")]
    WeightSum { sum: f64, tol: f64 },

    #[error("{what}[{index}] = {value} is outside (0, 1)")]
    Range {
        what: &'static str,
        index: usize,
        value: f64,
    },

    #[error("map intervals {first} and {second} overlap or leave [0, 1]")]
    Overlap { first: usize, second: usize },

    #[error("{0}")]
    Arity(String),

    #[error("word is empty")]
    EmptyWord,

    #[error("symbol {symbol} is outside the alphabet 1..={arity}")]
    SymbolOutOfRange { symbol: usize, arity: usize },

    #[error("root bracket not found after {doublings} doublings")]
    Bracket { doublings: u32 },

    #[error("{0}")]
    Domain(String),

    #[error("f(alpha) evaluations disagree: {first} vs {second}")]
    Consistency { first: f64, second: f64 },

    #[error("type with denominator {denominator} is not representable with length {n}")]
    Denominator { n: u64, denominator: u64 },

    #[error("prefix of length {available} is shorter than requested depth {requested}")]
    PrefixTooShort { requested: usize, available: usize },

    #[error("{0}")]
    WindowRange(String),

    #[error("{what} needs {size:e} items, cap is {cap:e}")]
    SizeCap {
        what: &'static str,
        size: f64,
        cap: f64,
    },

    #[error("block alphabet is empty")]
    EmptyAlphabet,

    #[error("block length {n} too small: {reason}")]
    NeedLargerN { n: usize, reason: String },

    #[error("system has no translations, geometry is undefined")]
    NoGeometry,

    #[error("search exceeded its budget of {budget} nodes")]
    Budget { budget: u64 },

    #[error("{0}")]
    Parse(String),
}

impl Error {
    /// Stable error name used in user-facing reports.
    pub fn name(&self) -> &'static str {
        match self {
            Error::WeightSum { .. } => "WeightSumError",
            Error::Range { .. } => "RangeError",
            Error::Overlap { .. } => "OverlapError",
            Error::Arity(_) => "ArityError",
            Error::EmptyWord => "EmptyWordError",
            Error::SymbolOutOfRange { .. } => "RangeError",
            Error::Bracket { .. } => "BracketError",
            Error::Domain(_) => "DomainError",
            Error::Consistency { .. } => "ConsistencyError",
            Error::Denominator { .. } => "DenominatorError",
            Error::PrefixTooShort { .. } => "PrefixTooShort",
            Error::WindowRange(_) => "WindowRangeError",
            Error::SizeCap { .. } => "SizeCapError",
            Error::EmptyAlphabet => "EmptyAlphabetError",
            Error::NeedLargerN { .. } => "NeedLargerN",
            Error::NoGeometry => "NoGeometryError",
            Error::Budget { .. } => "BudgetError",
            Error::Parse(_) => "ParseError",
        }
    }
}
