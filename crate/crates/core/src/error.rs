use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GasError {
    #[error("branching factor must be at least 2, got {0}")]
    InvalidBranching(u32),
    #[error("tree with d = {d} and depth {depth} is too large to address")]
    TooLarge { d: u32, depth: u32 },
    #[error("edge (level {level}, index {index}) does not exist in this tree")]
    InvalidEdge { level: u32, index: u64 },
    #[error("operation requires a wired tree")]
    NotWired,
    #[error("configuration has {got} entries, shape has {expected} edges")]
    LengthMismatch { expected: u64, got: usize },
    #[error("probability {0} is outside the admissible range")]
    ProbabilityOutOfRange(String),
    #[error("{edges} edges exceed the enumeration cap of {cap}")]
    EnumerationCap { edges: u64, cap: u32 },
    #[error("configuration is not a forest")]
    NotAForest,
    #[error("p = 0 is degenerate for this operation")]
    DegenerateZeroP,
    #[error("kernel depth must be at least 1")]
    ZeroKernelDepth,
    #[error("survival sequence is too short for depth {0}")]
    SurvivalTooShort(u32),
    #[error("block has {got} child states, expected {expected}")]
    MalformedBlock { expected: u32, got: usize },
    #[error("state configuration violates the hidden-Markov constraints")]
    InvalidStateConfig,
    #[error("empty input")]
    EmptyInput,
    #[error("histogram and reference have different lengths ({0} vs {1})")]
    BinMismatch(usize, usize),
}

pub type Result<T> = std::result::Result<T, GasError>;
