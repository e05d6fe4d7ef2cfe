use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised while building, solving, or verifying games.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("game has no players")]
    EmptyGame,

    #[error("bad interval [{lo}, {hi}]: bounds must be finite with lo < hi")]
    BadInterval { lo: f64, hi: f64 },

    #[error("payoff of player {player} is not finite at profile {profile:?}")]
    NonFinitePayoff { player: usize, profile: Vec<f64> },

    /// `coordinate` is the player index, or `n` for the subsidy strategy.
    #[error("coordinate {coordinate} = {value} lies outside [{lo}, {hi}]")]
    OutOfDomain {
        coordinate: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("expected {expected} values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("player index {player} out of range for a {n}-player game")]
    BadPlayer { player: usize, n: usize },

    #[error("objective is not finite at {at}")]
    NonFiniteObjective { at: f64 },

    #[error("invalid tolerances: {0}")]
    BadTolerances(String),

    #[error("subsidy minimum {min} at f = {at} is not zero")]
    NonZeroMinimum { min: f64, at: f64 },

    #[error("subsidy minimizer is not unique: near-ties at f = {first} and f = {second}")]
    NonUniqueMinimizer { first: f64, second: f64 },

    #[error("subsidy minimizer {found} disagrees with the declared vertex {hint}")]
    VertexHintMismatch { hint: f64, found: f64 },

    #[error("profile has no subsidy strategy f")]
    MissingSubsidyStrategy,

    #[error("fixed-point iteration did not converge in {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        last: Vec<f64>,
    },

    #[error("candidate is not a Nash equilibrium: deviation gaps {gaps:?}")]
    NotANash { gaps: Vec<f64> },

    #[error("grid of {points} points exceeds the limit of {limit}")]
    GridTooLarge { points: u128, limit: u64 },

    #[error("grid resolution must be at least 2, got {0}")]
    BadResolution(usize),

    #[error("invalid `{field}`: {reason}")]
    BadSpec { field: String, reason: String },

    #[error("closed-form output of firm {firm} is negative ({value})")]
    NegativeOutput { firm: usize, value: f64 },

    #[error("{0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn bad_spec(field: &str, reason: impl Into<String>) -> Self {
        Error::BadSpec {
            field: field.to_string(),
            reason: reason.into(),
        }
    }
}
