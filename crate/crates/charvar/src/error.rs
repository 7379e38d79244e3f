use thiserror::Error;

/// Error type shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    DegreeZero,
    #[error("GF({q}) has no element of multiplicative order {order}")]
    NoRootOfUnity { order: u64, q: u128 },
    #[error("enumeration of {required} items exceeds the limit {limit}")]
    EnumerationTooLarge { required: u128, limit: u128 },
    #[error("class functions live on different tables")]
    TableMismatch,
    #[error("target matrix is singular")]
    SingularTarget,
    #[error("solution count is not divisible by the group order: {0}")]
    NonIntegralQuotient(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("interpolated polynomial misses the holdout sample at q={q}: predicted {predicted}, counted {counted}")]
    HoldoutMismatch {
        q: String,
        predicted: String,
        counted: String,
    },
    #[error("interpolation produced non-integer coefficients")]
    NonIntegerCoefficients,
    #[error("numeric tower has no value at q = p^{needed}")]
    TowerTooShallow { needed: u64 },
    #[error("plethystic exponential needs a zero constant term")]
    NonzeroConstantTerm,
    #[error("plethystic logarithm needs constant term 1")]
    BadConstantTerm,
    #[error("missing count for {0}")]
    MissingCounts(String),
    #[error("malformed combinatorial map: {0}")]
    MalformedMap(String),
    #[error("tiling has genus zero; only g >= 1 is supported")]
    GenusZero,
    #[error("weight system is inconsistent; no grading exists")]
    NoGrading,
    #[error("cut arrows meet the localized subquiver")]
    CutMeetsLocalization,
    #[error("Euler/shift audit failed: {0}")]
    AuditFailure(String),
    #[error("count identity failed: {0}")]
    IdentityFailure(String),
    #[error("quiver with potential admits no cut")]
    NoCut,
    #[error("record is not a solution count")]
    NotSolutionCount,
    #[error("unsupported dimension vector: {0}")]
    UnsupportedDimensionVector(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
