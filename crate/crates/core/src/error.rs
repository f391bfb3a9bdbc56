//! Error type shared across the library.
//!
//! Every fallible operation returns [`Error`] so that callers (CLI, FFI,
//! experiment drivers) can map failures onto exit codes / status codes
//! without string matching.

use thiserror::Error;

/// Library-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Unified error enum.
///
/// Variants are grouped by the layer that raises them; [`Error::exit_code`]
/// maps each onto the CLI exit-code contract (2 = invalid input/config,
/// 3 = resource gate tripped, 4 = an experiment assertion failed).
#[derive(Debug, Error)]
pub enum Error {
    // ---- arithmetic / group layer ----
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("integer matrix has determinant {0}, expected 1")]
    NotUnimodular(i64),
    #[error("matrix is singular mod {0}")]
    Singular(u64),
    #[error("matrix determinant is {det} mod {t}, expected 1")]
    NotSl2 { det: u64, t: u64 },
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("generator set invalid: {0}")]
    BadGeneratorSet(String),
    #[error("-1 is not a square mod {0} (need t = 1 mod 4)")]
    NoSquareRoot(u64),
    #[error("no symmetric normalization of the quaternion solutions for q={q}, t={t}")]
    NoNormalization { q: u64, t: u64 },

    // ---- graph layer ----
    #[error("invalid multigraph: {0}")]
    BadGraph(String),
    #[error("graph is disconnected (vertex {0} unreachable from 0)")]
    Disconnected(usize),
    #[error("n*degree must be even, got n={n}, degree={degree}")]
    OddHalfEdges { n: usize, degree: usize },

    // ---- spectral / walk layer ----
    #[error("eigenvalue {0} outside [-1,1] beyond tolerance")]
    EigenvalueRange(f64),
    #[error("no spectral gap: lambda={0} not in (0,1)")]
    NoSpectralGap(f64),
    #[error("uniform walk target is invalid on a bipartite graph")]
    BipartiteTarget,
    #[error("graph is not bipartite; parity-adjusted target undefined")]
    NotBipartite,
    #[error("walk profile never crosses threshold {0}")]
    ThresholdNotCrossed(f64),
    #[error("trace of H^{k} is {residue} away from an integer")]
    TraceRounding { k: usize, residue: f64 },
    #[error("cycle counts are inconsistent: {0}")]
    BadCycleCounts(String),

    // ---- resource gates (exit code 3) ----
    #[error("enumeration budget exceeded: need {need}, budget {budget}")]
    BudgetExceeded { need: u128, budget: u128 },
    #[error("dense solve gate: size {n} exceeds limit {limit}")]
    DenseLimit { n: usize, limit: usize },

    // ---- experiment assertions (exit code 4) ----
    #[error("experiment check failed: {0}")]
    CheckFailed(String),

    // ---- config / io (exit code 2) ----
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// CLI exit code for this error (see the binary's help text).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BudgetExceeded { .. } | Error::DenseLimit { .. } => 3,
            Error::CheckFailed(_) => 4,
            _ => 2,
        }
    }
}
