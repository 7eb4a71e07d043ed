use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not in Sp(2): unitarity defect {0:.3e}")]
    NotUnitary(f64),

    #[error("matrix is not skew-Hermitian: defect {0:.3e}")]
    NotSkewHermitian(f64),

    #[error("group parameter is not a unit quaternion (|q| = {0})")]
    NonUnitParameter(f64),

    #[error("point is not on the unit sphere: defect {0:.3e}")]
    NotOnSphere(f64),

    #[error("algebra element does not lie in the algebra of the acting group")]
    NotInSubalgebra,

    #[error("degenerate point: fundamental fields have rank {rank}, expected {expected}")]
    DegeneratePoint { rank: usize, expected: usize },

    #[error("the two expressions for pi_H disagree by {0:.3e}")]
    InconsistentProjection(f64),

    #[error("{kind} is not defined on {side} covectors")]
    SideMismatch {
        kind: &'static str,
        side: &'static str,
    },

    #[error("expected {expected} components, got {got}")]
    ComponentCount { expected: usize, got: usize },

    #[error("base point mismatch: distance {0:.3e}")]
    BaseMismatch(f64),

    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),

    #[error("constraint drift {drift:.3e} exceeds {limit:.1e} at t = {t}")]
    DriftExceeded { drift: f64, limit: f64, t: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),
}
