use thiserror::Error;

/// Errors raised by the analysis and simulation routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("query is not full: body variable `{0}` is missing from the head")]
    NotFull(String),
    #[error("self-join: relation `{0}` occurs more than once")]
    SelfJoin(String),
    #[error("head variable `{0}` does not occur in any atom")]
    UnboundHeadVar(String),
    #[error("duplicate head variable `{0}`")]
    DuplicateHeadVar(String),
    #[error("atom `{0}` has no variables")]
    EmptyAtom(String),
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("query `{0}` is not connected")]
    Disconnected(String),
    #[error("query contains unary atom `{0}`")]
    UnaryAtom(String),
    #[error("subquery enumeration supports at most {limit} atoms, query has {atoms}")]
    TooManyAtoms { atoms: usize, limit: usize },
    #[error("domain size n must be at least 1")]
    EmptyDomain,
    #[error("atom `{0}` repeats a variable; matching relations need distinct columns")]
    RepeatedVariable(String),
    #[error("missing relation for atom `{0}`")]
    MissingRelation(String),
    #[error("server count p must be at least 1")]
    NoServers,
    #[error("epsilon {eps} out of range: {reason}")]
    EpsilonOutOfRange { eps: String, reason: String },
    #[error("weights are not a fractional edge cover: variable `{0}` is covered less than once")]
    NotEdgeCover(String),
    #[error("negative weight in tensor for atom `{0}`")]
    NegativeWeight(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("unsupported query shape: {0}")]
    UnsupportedShape(String),
    #[error("view `{view}` has {tuples} tuples, above the simulator cap of {cap}")]
    ViewTooLarge { view: String, tuples: usize, cap: usize },
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error("invalid run configuration: {0}")]
    InvalidConfig(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
