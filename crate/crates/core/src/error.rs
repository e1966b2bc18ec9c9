use thiserror::Error;

/// Failure modes shared by every module.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A prime of a rational part meets the level, so the value cannot be rendered mod N.
    #[error("precision obstruction at prime {0}")]
    PrecisionObstruction(u64),
    /// The level is not coprime to 2 times the product of the support.
    #[error("level obstruction: gcd({level}, 2*prod(support)) = {gcd}")]
    LevelObstruction { level: u64, gcd: u64 },
    /// A rational is not a norm; the place is a prime, or 0 for the infinite place.
    #[error("norm obstruction at place {0}")]
    NormObstruction(u64),
    #[error("orbit sqrt(-{0}) is not in the shadow support")]
    UnsupportedOrbit(u64),
    /// Row index (1-based) of the first table row that breaks the relation.
    #[error("relation violated at row {0}")]
    RViolation(usize),
    #[error("projection onto {0} is not surjective")]
    NotSubdirect(&'static str),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True for the obstruction family (precision, level, norm).
    pub fn is_obstruction(&self) -> bool {
        matches!(
            self,
            Error::PrecisionObstruction(_) | Error::LevelObstruction { .. } | Error::NormObstruction(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
