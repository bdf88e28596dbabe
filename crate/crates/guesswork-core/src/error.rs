use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the guesswork toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("alphabet size must be in 2..=256, got {0}")]
    BadAlphabetSize(usize),

    #[error("character {character} outside alphabet {{0..{m}}}")]
    CharacterOutOfAlphabet { character: u8, m: usize },

    #[error("string has length {got}, expected {expected}")]
    LengthMismatch { got: usize, expected: usize },

    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),

    #[error("enumerating {needed} strings exceeds the cap of {cap} entries; raise the cap or switch to simulation")]
    EnumerationCapExceeded { needed: u128, cap: u64 },

    #[error("exhaustive sweep over {needed} joint outcomes exceeds the cap of {cap}; raise the cap or switch to simulation")]
    JointCapExceeded { needed: u128, cap: u64 },

    #[error("order statistic index {u} out of range 1..={v}")]
    OrderStatOutOfRange { u: usize, v: usize },

    #[error("strategy domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("rate curves must share one grid: {0}")]
    GridMismatch(String),

    #[error("Markov chain is reducible; per-character asymptotics need an irreducible chain")]
    ReducibleChain,

    #[error("Renyi order must be positive (or +inf), got {0}")]
    BadRenyiOrder(f64),

    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}
