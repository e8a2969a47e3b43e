use thiserror::Error;

use crate::polymatroid::ViolationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ground set must have between 1 and {max} elements, got {got}")]
    GroundSize { got: usize, max: usize },
    #[error("invalid label {0:?}: labels must be non-empty and may not contain ',', ':' or whitespace")]
    InvalidLabel(String),
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("rank file is missing subset {0:?}")]
    MissingSubset(String),
    #[error("rank file lists subset {0:?} more than once")]
    RepeatedSubset(String),
    #[error("rank of the empty set must be 0, got {0}")]
    NonZeroEmptyRank(String),
    #[error("value for subset {subset:?} is not a valid {mode} rank: {value}")]
    BadRankValue { subset: String, mode: &'static str, value: String },
    #[error("expected {expected} rank values, got {got}")]
    RankLength { expected: usize, got: usize },
    #[error("ground sets differ: {left:?} vs {right:?}")]
    GroundMismatch { left: Vec<String>, right: Vec<String> },
    #[error("element index {0} is outside the ground set")]
    ElementOutOfRange(usize),
    #[error("subset mask {0:#b} is outside the ground set")]
    SubsetOutOfRange(u32),
    #[error("factor map is not surjective: target element {0:?} has an empty block")]
    NotSurjective(String),
    #[error("coefficient {0} is negative")]
    NegativeCoefficient(f64),
    #[error("extension parameter {0} is negative")]
    NegativeAlpha(f64),
    #[error("split parameters sum to {sum}, but the rank of the split element is {rank}")]
    SplitSumMismatch { sum: f64, rank: f64 },
    #[error("a non-empty subset is required")]
    EmptySubset,
    #[error("subset {subset:?} has value {value}, more than {tol} away from an integer")]
    ResidualTooLarge { subset: String, value: f64, tol: f64 },
    #[error("not a polymatroid: {0}")]
    NotPolymatroid(ViolationReport),
    #[error("probabilities sum to {0}, expected 1")]
    ProbabilitySum(f64),
    #[error("probability {0} is not a finite non-negative number")]
    BadProbability(f64),
    #[error("assignment {0:?} appears more than once")]
    DuplicateAssignment(Vec<i64>),
    #[error("assignment has {got} values, expected {expected}")]
    AssignmentArity { expected: usize, got: usize },
    #[error("overlap marginals disagree by {0} on at least one cell")]
    InconsistentMarginals(f64),
    #[error("expected exactly {expected} elements, got {got}")]
    WrongArity { expected: usize, got: usize },
    #[error("information term arguments must be pairwise disjoint")]
    OverlappingArguments,
    #[error("operation requires integer mode")]
    FloatModeRejected,
    #[error("ground set of {got} elements is too large for enumeration (limit {limit})")]
    TooLargeForEnumeration { got: usize, limit: usize },
    #[error("not a matroid: {0}")]
    NotAMatroid(String),
    #[error("secret {0:?} has rank zero")]
    DegenerateSecret(String),
    #[error("oracle-backed access structure does not support {0}")]
    OracleUnsupported(&'static str),
    #[error("invalid access structure: {0}")]
    InvalidAccessStructure(String),
    #[error("invalid block selection {0:?}")]
    InvalidSelection(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
