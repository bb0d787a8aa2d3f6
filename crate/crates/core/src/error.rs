use thiserror::Error;

/// Everything that can go wrong while building or analyzing a tree-shift.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid specification document: {0}")]
    Document(String),

    #[error("alphabet is empty")]
    EmptyAlphabet,

    #[error("symbol #{position} has an empty name")]
    EmptySymbolName { position: usize },

    #[error("duplicate symbol {name:?} at alphabet position {position}")]
    DuplicateSymbol { name: String, position: usize },

    #[error("arity must be at least 1")]
    ZeroArity,

    #[error("{list} entry {entry}: expected {expected} children, found {found}")]
    ArityMismatch {
        list: &'static str,
        entry: usize,
        expected: usize,
        found: usize,
    },

    #[error("{list} entry {entry}: unknown symbol {name:?}")]
    UnknownSymbol {
        list: &'static str,
        entry: usize,
        name: String,
    },

    #[error("{list} entry {entry}: duplicate pattern")]
    DuplicatePattern { list: &'static str, entry: usize },

    #[error(
        "{list} entry {entry}: only height-2 patterns (a root and its d children) are \
         supported; recode the forbidden set into Markov form first"
    )]
    NotMarkov { list: &'static str, entry: usize },

    #[error("pattern table too large: {symbols}^{arity} child tuples exceeds {limit}")]
    TooManyTuples {
        symbols: usize,
        arity: usize,
        limit: usize,
    },

    #[error("symbol index {index} out of range for alphabet of size {size}")]
    SymbolOutOfRange { index: usize, size: usize },

    #[error("the tree-shift is empty: every symbol was pruned")]
    EmptyShift,

    #[error("invalid recursion system: {0}")]
    InvalidSnre(String),

    #[error("level must be at least {min}, got {got}")]
    LevelTooSmall { min: usize, got: usize },

    #[error("exact evaluation at level {level} would need about {digits} digits (budget {budget})")]
    DigitBudgetExceeded {
        level: usize,
        digits: u64,
        budget: u64,
    },

    #[error("brute-force enumeration needs {needed} labelings per root (budget {budget})")]
    EnumerationBudgetExceeded { needed: String, budget: u64 },

    #[error("{count} reductions exceed the cap of {cap}")]
    ReductionBudgetExceeded { count: String, cap: u64 },

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("matrix dimension {dim} exceeds the exact-arithmetic cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("power iteration did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("component has no cycle; its period is undefined")]
    TrivialComponent,

    #[error("pattern is not allowed in the tree-shift")]
    PatternNotAllowed,
}

impl Error {
    /// Budget and resource errors, as opposed to domain errors.
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            Error::DigitBudgetExceeded { .. }
                | Error::EnumerationBudgetExceeded { .. }
                | Error::ReductionBudgetExceeded { .. }
                | Error::DimensionCap { .. }
                | Error::TooManyTuples { .. }
                | Error::NonConvergence { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
