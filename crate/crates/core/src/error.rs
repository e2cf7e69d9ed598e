use thiserror::Error;

use crate::qstring::BitString;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("zero vector has no length")]
    EmptySupport,

    #[error("qubit string is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("register of {l_max} qubits cannot hold a string of base length {base_length}")]
    RegisterTooSmall { base_length: usize, l_max: usize },

    #[error("vectors are not orthonormal: |<v{i}|v{j}> - delta| = {deviation:e}")]
    NotOrthonormal { i: usize, j: usize, deviation: f64 },

    #[error("vector {0} is not a length eigenvector")]
    NotLengthEigenvector(usize),

    #[error("reduced state on {0} qubits exceeds the dense cap of {cap}", cap = crate::prefix::MAX_FRAGMENT_QUBITS)]
    FragmentTooLarge(usize),

    #[error("cannot restrict to {n} qubits of a {l_max}-qubit register")]
    BadRestriction { n: usize, l_max: usize },

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("length assignment is not nondecreasing at position {0}")]
    NotMonotone(usize),

    #[error("lengths violate the Kraft inequality")]
    KraftViolation,

    #[error("code word set is not prefix-free: {0} is a prefix of {1}")]
    NotPrefixFree(BitString, BitString),

    #[error("set is not prefix-free: <v{phi}|v{psi} ∘ {suffix}> != 0")]
    PrefixViolation {
        phi: usize,
        psi: usize,
        suffix: BitString,
    },

    #[error("invalid code book: {0}")]
    InvalidCodeBook(String),

    #[error("not encodable: vector lies outside the ensemble span (residual {0:e})")]
    NotEncodable(f64),

    #[error("not decodable: qubit string lies outside the code space (residual {0:e})")]
    NotDecodable(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid code: {0}")]
    InvalidCode(String),

    #[error("invalid noise model: {0}")]
    InvalidNoise(String),

    #[error("{what} limit exceeded: {got} > {max}")]
    LimitExceeded {
        what: &'static str,
        got: usize,
        max: usize,
    },

    #[error("invalid bit string {0:?}")]
    BadBits(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// Whether the error stems from bad user input rather than a defect.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Internal(_))
    }
}
