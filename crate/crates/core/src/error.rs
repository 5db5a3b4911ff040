use thiserror::Error;

/// Errors raised by the separation toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unknown transition index {0}")]
    UnknownTransition(usize),

    #[error("invalid net: {0}")]
    InvalidNet(String),

    #[error("invalid automaton: {0}")]
    InvalidAutomaton(String),

    #[error("letter `{0}` is not covered by the relabeling map")]
    UnmappedLetter(String),

    #[error("automaton is not a complete DFA: {0}")]
    NotCompleteDfa(String),

    #[error("token count overflow")]
    Overflow,

    #[error("the final marking is coverable, so no inductive invariant exists")]
    Coverable,

    #[error("the languages are not disjoint")]
    NotDisjoint,

    #[error("certificate check failed: {0}")]
    CertificateRejected(String),

    #[error("bounded exploration exceeded its budget of {budget} nodes")]
    BudgetExceeded { budget: usize },

    #[error("requested word length {requested} exceeds the configured cap {cap}")]
    LengthCapExceeded { requested: usize, cap: usize },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
