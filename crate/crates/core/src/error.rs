use thiserror::Error;

/// Error type shared by all modules of this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// A Green's function (or similar) was evaluated at or too close to its
    /// singularity. Evaluation points must keep a minimum separation from
    /// sensor positions; this is never regularized away.
    #[error("singular evaluation: {0}")]
    SingularEvaluation(String),
    /// A quadrature rule does not resolve the oscillation scale of the
    /// integrand (node spacing coarser than eta/3 in an oscillatory
    /// direction).
    #[error("quadrature under-resolved: {0}")]
    Resolution(String),
    /// An I/O or serialization failure while reading or writing artifacts.
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    /// Malformed serialized data.
    #[error("format: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
