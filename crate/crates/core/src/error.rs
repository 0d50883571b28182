//! Error type shared by every kernel module.

use thiserror::Error;

/// What ran out when a computation was cut short.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BudgetKind {
    /// Buchberger pair-queue cap.
    Pairs,
    /// Intermediate polynomial total-degree cap.
    Degree,
    /// Enumeration node cap in dimension counting.
    Enumeration,
    /// Saturation / chain iteration cap.
    Iterations,
}

impl std::fmt::Display for BudgetKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BudgetKind::Pairs => write!(f, "pair queue"),
            BudgetKind::Degree => write!(f, "intermediate degree"),
            BudgetKind::Enumeration => write!(f, "enumeration nodes"),
            BudgetKind::Iterations => write!(f, "iteration count"),
        }
    }
}

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("ring mismatch: {0}")]
    RingMismatch(String),
    #[error("undeclared variable `{0}`")]
    UndeclaredVariable(String),
    #[error("ring accepts at most {max} variables, got {got}")]
    TooManyVariables { got: usize, max: usize },
    #[error("invalid ring specification: {0}")]
    InvalidRing(String),
    #[error("polynomial total degree {deg} exceeds the cap {cap}")]
    DegreeCap { deg: u32, cap: u32 },
    #[error("computation budget exceeded ({kind}, limit {limit})")]
    Budget { kind: BudgetKind, limit: usize },
    #[error("order cap {cap} exceeded: element appears to lie in every power of the center")]
    OrdCap { cap: u32 },
    #[error("center ideal is not principal on the working chart")]
    NonPrincipalCenter,
    #[error("stabilization not reached: {0}")]
    Stabilization(String),
    #[error("Hilbert polynomial degree {got} exceeds the expected bound {expected}")]
    DegreeExceedsExpectation { got: usize, expected: usize },
    #[error("leading Hilbert coefficient vanishes; slope undefined")]
    DegenerateLeadingCoefficient,
    #[error("subscheme is not proper: {0}")]
    NotProperSubscheme(String),
    #[error("element does not lie in the ideal: {0}")]
    NotInIdeal(String),
    #[error("base-twist dimensions not yet linear within the sampled range")]
    MRangeNotLinear,
    #[error("polynomial fit in x inconsistent with verification samples")]
    InconsistentXFit,
    #[error("flatness spot check failed: {0}")]
    FlatnessCheck(String),
    #[error("twist ideal is not supported inside a fiber: {0}")]
    SupportNotInFiber(String),
    #[error("no coordinate chart contains the support of the subscheme")]
    NoChart,
    #[error("internal invariant violated: {0}")]
    InternalInvariant(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
