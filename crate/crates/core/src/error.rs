use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("the unit word has no predecessor")]
    UnitWord,

    #[error("cannot take {steps} predecessors of a word of length {len}")]
    PredecessorOverrun { steps: usize, len: usize },

    #[error("invalid character {ch:?} at offset {offset}")]
    Parse { offset: usize, ch: char },

    #[error("empty input is not a word (write \"1\" for the unit)")]
    EmptyInput,

    #[error("{word} is not in the colour set")]
    NotAColour { word: String },

    #[error("maximum length {requested} exceeds the cap of {cap}")]
    LengthCap { requested: usize, cap: usize },

    #[error("operators live on different bases")]
    BasisMismatch,

    #[error("no witness pair for {sequence} inside words of length <= {max_len}")]
    NoWitnessInTruncation { sequence: String, max_len: usize },

    #[error("component is the root component; expected a g-path")]
    WrongComponentKind,

    #[error("mirror path needs words beyond length {max_len}")]
    MirrorOutsideTruncation { max_len: usize },

    #[error("power iteration did not converge after {iterations} iterations (estimate {estimate})")]
    NoConvergence { iterations: usize, estimate: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("basis of dimension {dimension} exceeds the budget of {budget}")]
    Budget { dimension: usize, budget: usize },

    #[error("schema error at {pointer}: {message}")]
    Schema { pointer: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
