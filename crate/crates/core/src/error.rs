use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("distance matrix is not symmetric at ({0}, {1})")]
    NonSymmetricMatrix(usize, usize),

    #[error("negative distance at ({0}, {1})")]
    NegativeDistance(usize, usize),

    #[error("nonzero self-distance at index {0}")]
    NonzeroDiagonal(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("lower bound {bound} for center {center} exceeds the number of points {n}")]
    BoundExceedsN {
        center: usize,
        bound: usize,
        n: usize,
    },

    #[error("lower bound for center {0} must be at least 1")]
    ZeroBound(usize),

    #[error("no lower bound given for candidate center {0}")]
    MissingBound(usize),

    #[error("k = {k} is outside 1..={max}")]
    KOutOfRange { k: usize, max: usize },

    #[error("relaxed triangle inequality violated for ({x}, {y}) via {z} with alpha = {alpha}")]
    RelaxedTriangleViolated {
        x: usize,
        y: usize,
        z: usize,
        alpha: f64,
    },

    #[error("alpha must be >= 1, got {0}")]
    InvalidAlpha(f64),

    #[error("index {0} out of range")]
    IndexOutOfRange(usize),

    #[error("instance has no points or no candidate centers")]
    EmptyInstance,

    #[error("assignment refers to center {0}, which is not in the solution's center set")]
    DanglingCenter(usize),

    #[error("point {0} is assigned to center {1} more than once")]
    DuplicateCenter(usize, usize),

    #[error("assignment covers {got} points, instance has {expected}")]
    AssignmentLength { expected: usize, got: usize },

    #[error("point {0} is not assigned exactly once")]
    MultiplyAssignedPoint(usize),

    #[error("amount {amount} for point {point} is outside (0, 1]")]
    AmountOutOfRange { point: usize, amount: f64 },

    #[error("input solution is infeasible: {0}")]
    InfeasibleInput(String),

    #[error("no lower-bounded partition exists: {0}")]
    InfeasibleBounds(String),

    #[error("eps must lie in (0, 1), got {0}")]
    EpsOutOfRange(f64),

    #[error("beta must lie in [0.5, 1), got {0}")]
    BetaOutOfRange(f64),

    #[error("no open center available for orphaned point {0}")]
    NoOpenCenterForOrphan(usize),

    #[error("nesting requires |C1| > |C2| (got {c1} and {c2})")]
    SizePreconditionViolated { c1: usize, c2: usize },

    #[error("solution is not a single assignment: {0}")]
    NotSingleAssignment(String),

    #[error("instance exceeds oracle guardrails: {0}")]
    TooLarge(String),

    #[error("no feasible solution exists for oracle mode {0}")]
    NoFeasibleSolution(String),

    #[error("{guarantee} violated: observed {observed}, bound {bound}")]
    GuaranteeViolated {
        guarantee: &'static str,
        observed: f64,
        bound: f64,
    },

    #[error("invalid parameters: {0}")]
    BadParams(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
