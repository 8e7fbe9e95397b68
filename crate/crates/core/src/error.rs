use alloc::string::String;
use core::fmt;

/// Half-line on which an interlacing check failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    Positive,
    Negative,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::Positive => f.write_str("positive half-line"),
            Region::Negative => f.write_str("negative half-line"),
        }
    }
}

/// Errors raised by the crate. Numeric context is reported as `f64`
/// regardless of the scalar type the computation ran in.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid Jacobi matrix: {0}")]
    InvalidMatrix(String),
    #[error("theta must be positive and finite, got {0}")]
    InvalidTheta(f64),
    #[error("theta = 1 carries no spectral information for the inverse problem")]
    ThetaIsOne,
    #[error("values are not strictly increasing at position {position}")]
    DuplicateValues { position: usize },
    #[error("values at positions {first} and {second} both fall inside the zero tolerance")]
    MultipleZeros { first: usize, second: usize },
    #[error("spectra have different sizes ({lambdas} vs {mus})")]
    CardinalityMismatch { lambdas: usize, mus: usize },
    #[error("spectra do not interlace on the {region} at index {index}: {triple:?}")]
    NotInterlacing {
        region: Region,
        index: i64,
        triple: [f64; 3],
    },
    #[error("shift directions on the positive and negative half-lines are not mirrored")]
    InconsistentShift,
    #[error("zero is an eigenvalue of exactly one of the two spectra")]
    ZeroMismatch,
    #[error("eigensolver did not converge for eigenvalue {index}, off-diagonal residual {residual:e}")]
    ConvergenceFailure { index: usize, residual: f64 },
    #[error("evaluation point lies within {distance:e} of a pole")]
    PoleProximity { distance: f64 },
    #[error("m-function vanishes at the evaluation point")]
    ZeroMFunction,
    #[error("index {0} is not in the index set of the spectrum")]
    IndexNotFound(i64),
    #[error("zero is in the spectrum; theta needs the zero-case recovery with a hint")]
    ZeroInSpectrum,
    #[error("product of eigenvalue ratios is not positive")]
    NonPositiveProduct,
    #[error("zero is in the spectrum and no hint (q1, alpha0 or theta) was supplied")]
    HintMissing,
    #[error("hint does not determine theta: {0}")]
    UninformativeHint(&'static str),
    #[error("theta^2 = {theta_sq} is on the wrong side of the bound {bound}")]
    BoundViolated { theta_sq: f64, bound: f64 },
    #[error("weight at index {index} is not positive ({value:e})")]
    NonPositiveWeight { index: i64, value: f64 },
    #[error("weights sum to {sum}, not 1")]
    NormalizationFailure { sum: f64 },
    #[error("invalid spectral measure: {0}")]
    InvalidMeasure(String),
    #[error("Stieltjes recurrence broke down at step {step} (b = {value:e})")]
    BreakdownAtStep { step: usize, value: f64 },
    #[error("reconstructed matrix does not reproduce the spectra (residual {residual:e})")]
    ForwardCheckFailure { residual: f64 },
    #[error("invalid mass-spring chain: {0}")]
    InvalidChain(String),
    #[error("seed is inadmissible: non-positive spring or mass produced at step {step}")]
    InadmissibleSeed { step: usize },
    #[error("continued fraction denominator vanishes at step {step}")]
    DivisionNearZero { step: usize },
    #[error("no admissible seed found on the scanned grid")]
    EmptyResult,
    #[error("moments overflow beyond Hankel order {safe_order}")]
    Overflow { safe_order: usize },
    #[error("identity check `{name}` failed with residual {residual:e}")]
    IdentityCheck { name: &'static str, residual: f64 },
}

impl Error {
    /// Stable short name, used as the gate name in reports and CLI messages.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidMatrix(_) => "InvalidMatrix",
            Error::InvalidTheta(_) => "InvalidTheta",
            Error::ThetaIsOne => "ThetaIsOne",
            Error::DuplicateValues { .. } => "DuplicateValues",
            Error::MultipleZeros { .. } => "MultipleZeros",
            Error::CardinalityMismatch { .. } => "CardinalityMismatch",
            Error::NotInterlacing { .. } => "NotInterlacing",
            Error::InconsistentShift => "InconsistentShift",
            Error::ZeroMismatch => "ZeroMismatch",
            Error::ConvergenceFailure { .. } => "ConvergenceFailure",
            Error::PoleProximity { .. } => "PoleProximity",
            Error::ZeroMFunction => "ZeroMFunction",
            Error::IndexNotFound(_) => "IndexNotFound",
            Error::ZeroInSpectrum => "ZeroInSpectrum",
            Error::NonPositiveProduct => "NonPositiveProduct",
            Error::HintMissing => "HintMissing",
            Error::UninformativeHint(_) => "UninformativeHint",
            Error::BoundViolated { .. } => "BoundViolated",
            Error::NonPositiveWeight { .. } => "NonPositiveWeight",
            Error::NormalizationFailure { .. } => "NormalizationFailure",
            Error::InvalidMeasure(_) => "InvalidMeasure",
            Error::BreakdownAtStep { .. } => "BreakdownAtStep",
            Error::ForwardCheckFailure { .. } => "ForwardCheckFailure",
            Error::InvalidChain(_) => "InvalidChain",
            Error::InadmissibleSeed { .. } => "InadmissibleSeed",
            Error::DivisionNearZero { .. } => "DivisionNearZero",
            Error::EmptyResult => "EmptyResult",
            Error::Overflow { .. } => "Overflow",
            Error::IdentityCheck { .. } => "IdentityCheck",
        }
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
