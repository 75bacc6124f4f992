use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("at least 2 register qubits are required, got {0}")]
    TooFewQubits(u32),

    #[error("register of {0} qubits is too large to simulate")]
    TooManyQubits(u32),

    #[error("{name} must be {requirement}, got {value}")]
    InvalidParameter {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },

    #[error("strike {strike} lies outside the price window [{lo}, {hi})")]
    StrikeOutsideWindow { strike: f64, lo: f64, hi: f64 },

    #[error("payoff vanishes on every grid point")]
    DegeneratePayoff,

    #[error(
        "dilation needs a contraction: rate {rate} and maturity {maturity} must be non-negative"
    )]
    DilationViolated { rate: f64, maturity: f64 },

    #[error("{what} is only valid for n_q >= {min}, got {n_q}")]
    BelowValidity {
        what: &'static str,
        n_q: u32,
        min: u32,
    },

    #[error("index {index} outside the admissible range {min}..={max}")]
    IndexOutOfRange {
        index: usize,
        min: usize,
        max: usize,
    },

    #[error("truncation index M = {m} is too small for the error bound; need M >= {min_m}")]
    TruncationTooShort { m: u32, min_m: u32 },

    #[error("tolerance must lie in (0, 1], got {0}")]
    EpsilonOutOfRange(f64),

    #[error("requested {requested} terms but the expansion only has {available}")]
    PlanTooLarge { requested: usize, available: usize },

    #[error("word {word:#b} has no Z on qubit 0")]
    WordWithoutLeadingQubit { word: u64 },

    #[error("invalid volatility schedule: {0}")]
    VolatilitySchedule(String),

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("width mismatch: expected {expected} qubits, found {found}")]
    WidthMismatch { expected: usize, found: usize },

    #[error("plan does not match the pricing inputs: {0}")]
    PlanMismatch(String),

    #[error("no shot out of {shots} survived post-selection; increase the shot count")]
    NoPostSelectedShots { shots: u64 },

    #[error("price curve is empty")]
    EmptyCurve,

    #[error("tridiagonal system is singular at row {row}")]
    SingularSystem { row: usize },

    #[error("invalid Crank-Nicolson configuration: {0}")]
    CnConfig(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn param(name: &'static str, requirement: &'static str, value: f64) -> Self {
        Error::InvalidParameter {
            name,
            requirement,
            value,
        }
    }
}
