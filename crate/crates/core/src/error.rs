use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A table refers to things that do not exist (indices out of range,
    /// duplicate entries, wrong lengths). Distinct from axiom violations.
    #[error("malformed input: {0}")]
    Structural(String),

    #[error("group axiom `{axiom}` fails at {witness:?}")]
    NotAGroup {
        axiom: &'static str,
        witness: Vec<usize>,
    },

    #[error("{what} fails validation with {count} violation(s); first: {first}")]
    Invalid {
        what: &'static str,
        count: usize,
        first: String,
    },

    #[error("generator does not intertwine q: q(phi({point})) != psi(q({point}))")]
    Intertwining { point: usize },

    #[error("generator is not a permutation: {0}")]
    NotPermutation(String),

    #[error("closure exceeded the cap of {cap} maps (partial size {partial})")]
    CapExceeded { cap: usize, partial: usize },

    #[error("invalid system spec: {0}")]
    Spec(String),

    #[error("unknown {registry} kind `{name}`")]
    UnknownKind {
        registry: &'static str,
        name: String,
    },

    #[error("hypothesis failed: {0}")]
    NotGroupoid(String),

    #[error("group is not abelian: elements {0} and {1} do not commute; supply a character table")]
    NonAbelian(usize, usize),

    #[error("invariant section transport is inconsistent: {0}")]
    Transport(String),

    #[error("map does not descend along the factor: {0}")]
    NonDescending(String),

    #[error("mismatched input: {0}")]
    Mismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
