use thiserror::Error;

/// Errors raised by the library. Display strings start with a stable
/// kebab-case tag so callers (and the CLI) can match on them.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid-parameters: {0}")]
    InvalidParameters(String),
    #[error("invalid-profile: {0}")]
    InvalidProfile(String),
    #[error("empty-profile: graph has no checks")]
    EmptyProfile,
    #[error("structure-mismatch: {0}")]
    StructureMismatch(String),
    #[error("has-core: {0} checks survive peeling")]
    HasCore(usize),
    #[error("no-clusters: {0}")]
    NoClusters(String),
    #[error("not-a-core: {0}")]
    NotACore(String),
    #[error("not-converged: message state is not a fixed point")]
    NotConverged,
    #[error("witness-not-found: marked check {check} has no star message within {depth} iterations")]
    WitnessNotFound { check: usize, depth: usize },
    #[error("too-large: {0}")]
    TooLarge(String),
    #[error("undefined: {0}")]
    Undefined(String),
    #[error("invalid-certificate: {0}")]
    InvalidCertificate(String),
    #[error("invariant-violation: {0}")]
    InvariantViolation(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// The stable tag at the front of the display string.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::InvalidParameters(_) => "invalid-parameters",
            Error::InvalidProfile(_) => "invalid-profile",
            Error::EmptyProfile => "empty-profile",
            Error::StructureMismatch(_) => "structure-mismatch",
            Error::HasCore(_) => "has-core",
            Error::NoClusters(_) => "no-clusters",
            Error::NotACore(_) => "not-a-core",
            Error::NotConverged => "not-converged",
            Error::WitnessNotFound { .. } => "witness-not-found",
            Error::TooLarge(_) => "too-large",
            Error::Undefined(_) => "undefined",
            Error::InvalidCertificate(_) => "invalid-certificate",
            Error::InvariantViolation(_) => "invariant-violation",
            Error::Parse { .. } => "parse",
            Error::Io(_) => "io",
        }
    }
}
