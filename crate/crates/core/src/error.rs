use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("level must be at least {min}, got {got}")]
    InvalidLevel { min: u32, got: i64 },

    #[error("configuration is not admissible for the substitution")]
    NotAdmissible,

    #[error("derivation not unique: {0} shift classes admit a preimage")]
    DerivationNotUnique(usize),

    #[error("window {width}x{height} exceeds the {limit}x{limit} substitution square")]
    OversizedWindow { width: usize, height: usize, limit: usize },

    #[error("unknown tile: {0}")]
    UnknownTile(String),

    #[error("cell ({x}, {y}) lies outside the {width}x{height} grid")]
    OutOfBounds { x: i64, y: i64, width: usize, height: usize },

    #[error("cyclic dependency through cell ({x}, {y}) inside the window")]
    CyclicDependency { x: i64, y: i64 },

    #[error("enumeration needs {required} assignments but the budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("grid has {0} escaping path component(s); periodicity needs finite paths only")]
    EscapingComponent(usize),

    #[error("need at least {need} points, got {got}")]
    TooFewPoints { need: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed input: {0}")]
    Schema(String),
}

impl Error {
    /// Refusals (budget, preconditions the caller could not know about)
    /// as opposed to malformed input.
    pub fn is_refusal(&self) -> bool {
        matches!(
            self,
            Error::BudgetExceeded { .. }
                | Error::EscapingComponent(_)
                | Error::CyclicDependency { .. }
                | Error::NotAdmissible
                | Error::DerivationNotUnique(_)
                | Error::OversizedWindow { .. }
                | Error::InvalidLevel { .. }
                | Error::TooFewPoints { .. }
        )
    }
}
