use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("removed point queried")]
    RemovedPointQueried,

    #[error("not in H_delta domain: first coordinate must be positive, got {0}")]
    NotInCubeDomain(f64),

    #[error("empty sample")]
    EmptySample,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("evaluation of `{id}` failed (non-finite value)")]
    Evaluation { id: String },

    #[error("mismatched base spaces: `{0}` vs `{1}`")]
    MismatchedSpaces(String, String),

    #[error("not in M_f(E)\\{{0}}: total mass is zero")]
    ZeroMass,

    #[error("measure has {atoms} atoms, exact Prohorov search supports at most {max}")]
    TooManyAtoms { atoms: usize, max: usize },

    #[error("member `{id}` takes value {value} outside [0, 1]")]
    OutOfUnitRange { id: String, value: String },

    #[error("budget exhausted: degree {degree} reached with grid error {error:e} > {target:e}")]
    BudgetExhausted { degree: u32, error: f64, target: f64 },

    #[error("support assertion violated: g = {value:e} at x_1 = {x1} < delta = {delta}")]
    SupportViolated { x1: f64, delta: f64, value: f64 },

    #[error("limit did not converge: successive estimates {previous:e} and {last:e} differ by more than {tol:e}")]
    NonConvergent { previous: f64, last: f64, tol: f64 },

    #[error("horizon too short: {0}")]
    HorizonTooShort(String),

    #[error("integral against the excursion measure may be infinite: {0}")]
    PossiblyInfinite(String),

    #[error("not in Phi(S_down): {0}")]
    NotInImage(String),

    #[error("not a fragmentation sequence: {0}")]
    InvalidSequence(String),

    #[error("improper fragmentation: total mass {0} differs from 1")]
    ImproperMass(f64),
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
