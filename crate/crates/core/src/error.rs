use thiserror::Error;

use crate::bits::Mask;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("basis family is empty")]
    EmptyBases,

    #[error("basis {mask:#b} has {popcount} elements, expected rank {rank}")]
    BadPopcount { mask: Mask, popcount: usize, rank: usize },

    #[error("basis {mask:#b} uses elements outside a ground set of size {n}")]
    BitOutOfRange { mask: Mask, n: usize },

    /// `(S - x) + y` is not a basis for any `y` in `T - S`.
    #[error("basis exchange fails for S={s:#b}, T={t:#b}, x={x}")]
    ExchangeViolation { s: Mask, t: Mask, x: usize },

    #[error("invalid rank {r} for a ground set of size {n}")]
    InvalidRank { r: usize, n: usize },

    #[error("ground set of size {0} exceeds the 16-element limit")]
    TooManyElements(usize),

    #[error("element {element} is outside the ground set 1..={n}")]
    ElementOutOfRange { element: usize, n: usize },

    #[error("graph edge {edge} has an endpoint outside 1..={vertices}")]
    VertexOutOfRange { edge: usize, vertices: usize },

    #[error("wheel genus must be at least 1")]
    InvalidGenus,

    #[error("matrix rows have unequal lengths or the matrix has no columns")]
    RaggedMatrix,

    #[error("matrix entries must be 0 or 1, found {0}")]
    BadMatrixEntry(u8),

    #[error("source does not cover degree {n}: {detail}")]
    SourceIncomplete { n: usize, detail: String },

    #[error("unknown property tag `{0}`")]
    UnknownTag(String),

    #[error("property `{property}` is not closed under the {kind} differential")]
    NotASubcomplex { property: String, kind: String },

    #[error("the connected quotient of `{spec}` is not a complex for the {kind} differential")]
    ConnectedQuotientUnsupported { spec: String, kind: String },

    #[error("spec `{0}` is not stable under duality and no dual spec was supplied")]
    PropertyNotDualityStable(String),

    #[error("vector is not homogeneous in total degree")]
    MixedDegree,

    #[error("built-in enumeration covers n <= 7, got {0}")]
    DegreeTooLarge(usize),

    #[error("line {line}: {msg}")]
    ParseError { line: usize, msg: String },

    #[error("line {line}: {source}")]
    InvalidRecord {
        line: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
