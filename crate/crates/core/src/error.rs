use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} entries, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("unknown issue index {0}")]
    UnknownIssue(usize),
    #[error("invalid issue set: {0}")]
    InvalidIssues(String),
    #[error("a profile needs at least one ballot")]
    EmptyProfile,
    #[error("invalid ballot text: {0}")]
    BallotSyntax(String),
    #[error("clause contains a complementary pair on variable {0}")]
    Tautology(u32),
    #[error("formula is outside the {0} fragment")]
    Fragment(&'static str),
    #[error("circuit is not decomposable")]
    NotDecomposable,
    #[error("malformed circuit: {0}")]
    MalformedCircuit(String),
    #[error("assignment does not cover variable {0}")]
    MissingVariable(u32),
    #[error("algebraic model counting precondition violated: {0}")]
    Contract(&'static str),
    #[error("circuit has no models, so there is no witness")]
    NoWitness,
    #[error("invalid budget: {0}")]
    InvalidBudget(String),
    #[error("ballot {index} does not satisfy the integrity constraint")]
    IrrationalBallot { index: usize },
    #[error("the integrity constraint admits no rational ballot")]
    NoRationalBallot,
    #[error("resource guard: {what} is {actual}, limit is {limit}")]
    ResourceLimit {
        what: &'static str,
        limit: usize,
        actual: usize,
    },
    #[error("engine {engine} cannot handle {reason}")]
    EngineMismatch { engine: &'static str, reason: &'static str },
    #[error("unknown rule {0:?}")]
    UnknownRule(String),
    #[error("internal invariant violated: {0}")]
    Invariant(&'static str),
}
