use thiserror::Error;

use crate::morphism::SquareViolation;
use crate::sheaf::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid rational {0:?}")]
    ParseRational(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("linear system has no solution")]
    NoSolution,

    #[error("a face needs at least one vertex")]
    EmptyFace,
    #[error("face [{face}] repeats vertex {atom}")]
    DuplicateAtom { face: String, atom: String },
    #[error("face [{0}] has more than {max} vertices", max = crate::complex::MAX_FACE_VERTICES)]
    FaceTooLarge(String),
    #[error("complex has no faces")]
    EmptyComplex,
    #[error("face [{face}] is stored but its subface [{missing}] is not")]
    NotDownwardClosed { face: String, missing: String },
    #[error("timeline window {first}..={last} is empty")]
    EmptyWindow { first: i64, last: i64 },
    #[error("unknown face [{0}]")]
    UnknownFace(String),
    #[error("[{from}] -> [{to}] is not a face inclusion")]
    NotAnInclusion { from: String, to: String },

    #[error("sheaf violates its axioms in {} place(s); first: {}", .0.len(), .0[0])]
    InvalidSheaf(Vec<Violation>),
    #[error("section value at [{face}] has length {found}, stalk has dimension {expected}")]
    SectionShape { face: String, expected: usize, found: usize },
    #[error("vector is not in the span of the section basis")]
    NotInSpan,

    #[error("source and target sheaves live on different base complexes")]
    BaseMismatch,
    #[error("morphism fails to commute on {} square(s); first: {}", .0.len(), .0[0])]
    NotCommuting(Vec<SquareViolation>),
    #[error("image of a source section is not a section of the target")]
    ImageNotSection,
    #[error("restriction [{from}] -> [{to}] does not map the kernel into the kernel")]
    KernelNotPreserved { from: String, to: String },

    #[error("edge {tail} -> {head} is a self-loop")]
    SelfLoop { tail: String, head: String },
    #[error("vertices {tail} and {head} are joined by more than one edge")]
    ParallelEdge { tail: String, head: String },
    #[error("edge {tail} -> {head} has non-positive rate {rate}")]
    NonpositiveRate { tail: String, head: String, rate: String },
    #[error("flow is not conserved at {vertex}: inflow {inflow}, outflow {outflow}")]
    ConservationViolation { vertex: String, inflow: String, outflow: String },
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("duplicate vertex {0}")]
    DuplicateVertex(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("a filter needs at least one tap")]
    EmptyFilter,
    #[error("value dimension must be at least 1")]
    ZeroValueDim,
    #[error("input has {found} samples, expected {expected}")]
    WrongInputLength { expected: usize, found: usize },

    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema { path: path.into(), message: message.into() }
    }
}
