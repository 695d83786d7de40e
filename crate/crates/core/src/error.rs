use thiserror::Error;

/// Errors raised by tube-domain computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TubeError {
    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("weight alpha = {0} must exceed -1")]
    InvalidWeight(f64),

    #[error("point is not interior to the tube domain (defect {defect:e})")]
    NotInterior { defect: f64 },

    #[error("point is not inside the unit ball (|xi|^2 = {norm_sq})")]
    NotInBall { norm_sq: f64 },

    #[error("pole of {map}: modulus {modulus:e} below guard")]
    Pole { map: &'static str, modulus: f64 },

    #[error("principal branch requested with Re(base) = {re:e} <= 0")]
    BranchCut { re: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no admissible contour radius keeps the polydisc inside the domain")]
    ContourEscapesDomain,

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("finite-difference step {step:e} too small for defect {defect:e}")]
    StepTooSmall { step: f64, defect: f64 },

    #[error("derivative order {0} exceeds the supported maximum of 4")]
    OrderTooHigh(u32),

    #[error("no exact derivative oracle available for {0}")]
    MissingOracle(String),
}

pub type Result<T> = std::result::Result<T, TubeError>;
