use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),
    #[error("relation `{0}` is not a composable path")]
    NonComposable(String),
    #[error("invalid string: {0}")]
    InvalidString(String),
    #[error("band found: {0}")]
    BandFound(String),
    #[error("module {0} is projective")]
    IsProjective(String),
    #[error("module {0} is injective")]
    IsInjective(String),
    #[error("projective summand detected at vertex {0}")]
    ProjectiveSummand(String),
    #[error("not a string algebra: {0}")]
    NotStringAlgebra(String),
    #[error("radical does not vanish within {0} layers")]
    NotRepresentationFinite(usize),
    #[error("morphism shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("intertwining violated at arrow {0}")]
    IntertwiningViolation(String),
    #[error("module {0} is not a node of the quiver")]
    NodeNotFound(String),
    #[error("not a path in the quiver: {0}")]
    NotAPath(String),
    #[error("morphism is not irreducible (depth {0})")]
    NotIrreducible(String),
    #[error("parameters out of range: {0}")]
    OutOfRange(String),
    #[error("characteristic {0} too small for this computation: {1}")]
    CharacteristicTooSmall(u64, String),
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
    #[error("witness verification failed: {0}")]
    VerificationFailed(String),
}

impl Error {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Syntax { .. } => "syntax",
            Error::UnknownVertex(_) => "unknown-vertex",
            Error::UnknownArrow(_) => "unknown-arrow",
            Error::NonComposable(_) => "non-composable",
            Error::InvalidString(_) => "invalid-string",
            Error::BandFound(_) => "band-found",
            Error::IsProjective(_) => "is-projective",
            Error::IsInjective(_) => "is-injective",
            Error::ProjectiveSummand(_) => "projective-summand",
            Error::NotStringAlgebra(_) => "not-string-algebra",
            Error::NotRepresentationFinite(_) => "not-representation-finite",
            Error::ShapeMismatch(_) => "shape-mismatch",
            Error::IntertwiningViolation(_) => "intertwining-violation",
            Error::NodeNotFound(_) => "node-not-found",
            Error::NotAPath(_) => "not-a-path",
            Error::NotIrreducible(_) => "not-irreducible",
            Error::OutOfRange(_) => "out-of-range",
            Error::CharacteristicTooSmall(..) => "characteristic-too-small",
            Error::Inconsistency(_) => "inconsistency",
            Error::VerificationFailed(_) => "verification-failed",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
