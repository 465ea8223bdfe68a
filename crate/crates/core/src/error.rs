use thiserror::Error;

use crate::map_model::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("symbol must be 0 or 1, found {0:?}")]
    InvalidSymbol(char),

    #[error("words must have equal length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("cannot shift the empty word")]
    EmptyWord,

    #[error("slope a = {0} is outside (1, 2)")]
    SlopeOutOfRange(f64),

    #[error("(a, p) = ({a}, {p}) is not admissible: need 1 - 1/a <= p <= 1/a")]
    NotAdmissible { a: f64, p: f64 },

    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },

    #[error("unknown identifier `{name}` at position {pos}")]
    UnknownIdentifier { name: String, pos: usize },

    #[error("evaluation at x = {x} produced a non-finite value")]
    NonFinite { x: f64 },

    #[error("iterate {value} of x = {x} left [0, 1]")]
    LeftUnitInterval { x: f64, value: f64 },

    #[error("critical point q = {0} is outside (0, 1)")]
    CriticalPointOutOfRange(f64),

    #[error("truncation length n = {n} is too short (need n >= {min})")]
    TruncationTooShort { n: usize, min: usize },

    #[error("word length {len} exceeds the critical itinerary length {crit_len}")]
    WordLongerThanCritical { len: usize, crit_len: usize },

    #[error("n = {0} exceeds the enumeration guard (n <= {max})", max = crate::kneading::ENUMERATION_GUARD)]
    EnumerationGuard(usize),

    #[error("tolerance epsilon = {0} is outside (0, 1)")]
    EpsilonOutOfRange(f64),

    #[error("f0(q) = 1 and f1(q) = 0 together do not define a Lorenz map")]
    DegenerateCritical,

    #[error("map failed validation: {}", .0.failures().join("; "))]
    InvalidMap(Box<ValidationReport>),

    #[error("map is not Markov: {0}")]
    NotMarkov(String),

    #[error("oracle unavailable: {0}")]
    OracleUnavailable(String),

    #[error("matrix must be square and non-empty")]
    BadMatrix,

    #[error("map file: {0}")]
    MapFile(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
