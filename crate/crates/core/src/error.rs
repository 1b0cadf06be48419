use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    /// Alice's move weighs more than the declared per-move budget.
    #[error("move weight {weight} exceeds budget {omega}")]
    BudgetExceeded { weight: String, omega: String },

    #[error("obstruction at relative depth 0 (the current vertex cannot be forbidden)")]
    IllegalDepth,

    #[error("child index {child} out of range for arity {arity}")]
    BadChild { child: usize, arity: usize },

    /// No child satisfies `beta * share < 1`. Unreachable for certified parameters.
    #[error("no safe child at depth {depth}")]
    NoSafeChild { depth: u64 },

    #[error("weight invariant broken: {0}")]
    InvariantBroken(String),

    /// More than three level-(m+k-2) intervals were touched by a single denominator.
    #[error("denominator {t} touched {touched} subintervals at level {level} (at most 3 allowed)")]
    LemmaViolated { t: String, touched: usize, level: u64 },

    #[error("parameters not certified: {0}")]
    NotCertified(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl GameError {
    /// True for failures that indicate a bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            GameError::NoSafeChild { .. }
                | GameError::InvariantBroken(_)
                | GameError::LemmaViolated { .. }
                | GameError::BudgetExceeded { .. }
        )
    }
}

pub type Result<T, E = GameError> = std::result::Result<T, E>;
