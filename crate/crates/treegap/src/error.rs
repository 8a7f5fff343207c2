//! Error type shared across the crate.

use thiserror::Error;

/// All failure modes of tree construction, operator evaluation, the
/// eigensolver, and file parsing.
#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {0} listed more than once")]
    DuplicateVertex(usize),

    #[error("parent links do not form a tree on 0..{n}: {detail}")]
    CycleOrDisconnected { n: usize, detail: String },

    #[error("rate on vertex {vertex} must be a positive finite real, got {value}")]
    NonPositiveRate { vertex: usize, value: f64 },

    #[error("root 0 must have exactly one child, found {0}")]
    RootDegree(usize),

    #[error("the root has no path to itself")]
    RootHasNoPath,

    #[error("layer {layer} outside 1..={max}")]
    LayerOutOfRange { layer: usize, max: usize },

    #[error("degenerate generator parameters: {0}")]
    DegenerateParams(String),

    #[error("the root is outside the operator domain")]
    RootNotInDomain,

    #[error("non-finite value at vertex {0}")]
    NonFiniteInput(usize),

    #[error("function must vanish at the root, got {0}")]
    BoundaryViolation(f64),

    #[error("function is identically zero")]
    ZeroFunction,

    #[error("function must be strictly positive off the root, vertex {0} is not")]
    NonPositiveFunction(usize),

    #[error("ratio function must exceed 1 off the root, vertex {0} is not")]
    InvalidRatio(usize),

    #[error("witness rejected from {family}: {condition} at vertex {vertex}")]
    DomainViolation {
        family: String,
        vertex: usize,
        condition: String,
    },

    #[error("eigensolver hit the iteration cap; best estimate {estimate}, residual {residual}")]
    ConvergenceFailure { estimate: f64, residual: f64 },

    #[error("dense reference solver limited to dimension {max}, got {dim}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("collapsed pair does not match the full tree: {0}")]
    LayerMismatch(String),

    #[error("eigenfunction not strictly increasing at vertex {0}")]
    MonotonicityViolation(usize),

    #[error("parse error at line {line}: {detail}")]
    ParseError { line: usize, detail: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI contract: 1 parse/IO and usage errors,
    /// 2 domain violations, 3 convergence failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DomainViolation { .. } => 2,
            Error::ConvergenceFailure { .. } => 3,
            _ => 1,
        }
    }
}
