use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("value {value} outside the objective range [0..{n}]")]
    OutOfRange { value: u32, n: u32 },
    #[error("front subset must contain both extremes 0 and {n}")]
    MissingExtremes { n: u32 },
    #[error("degenerate front subset: maximal empty interval equals n = {n}")]
    Degenerate { n: u32 },
    #[error("cannot select {capacity} survivors from {available} individuals")]
    Underfull { capacity: usize, available: usize },
    #[error("steady-state selection needs exactly {expected} individuals, got {actual}")]
    SteadyStateSize { expected: usize, actual: usize },
    #[error("individual {id} has no crowding distance")]
    MissingCrowding { id: u64 },
    #[error("individual {id} is not evaluated")]
    Unevaluated { id: u64 },
    #[error("scenario precondition violated: {0}")]
    Scenario(String),
}
