use num_complex::Complex64;
use thiserror::Error;

use crate::contour::EpsilonReport;
use crate::residue::ResidueResult;

/// Errors from point evaluation and contour construction.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    #[error("natural number {value} outside [1, {max}]")]
    InvalidNatural { value: u64, max: u64 },
    #[error("z = {z} is within 1e-12 of the essential singularity at 0")]
    Domain { z: Complex64 },
    #[error("exp overflow evaluating f_s at z = {z}")]
    Overflow { z: Complex64 },
    #[error("|f_s({z})| = {abs_f:e} is at or below the pole floor {floor:e}")]
    PoleProximity {
        z: Complex64,
        abs_f: f64,
        floor: f64,
    },
    #[error("epsilon {0} is outside (0, 1/4]")]
    InvalidEpsilon(f64),
    #[error("minus contour for s = {s} has zero width")]
    DegenerateContour { s: u64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Errors from the residue engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ResidueError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("quadrature exhausted {panels} panels before reaching tolerance")]
    NonConvergence { panels: usize },
    #[error("residue {} is not close to a non-negative integer (residual {})", .0.raw, .0.residual)]
    NonInteger(Box<ResidueResult>),
    #[error("argument jump of {phase:.3} rad at z = {z} even at the minimum step")]
    PhaseJump { z: Complex64, phase: f64 },
    #[error("quadrature and winding disagree: {} vs {}", .a.rounded, .b.rounded)]
    MethodDisagreement {
        a: Box<ResidueResult>,
        b: Box<ResidueResult>,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Errors from divisor counting and the primality predicate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DivisorError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("evaluation failed for s = {s} after {attempts} attempts: {last_error}")]
    EvaluationFailure {
        s: u64,
        attempts: u32,
        last_error: String,
        last_report: Option<EpsilonReport>,
        results: Vec<ResidueResult>,
    },
    #[error("divisor-count identity violated for s = {s}: doubled values {doubled:?}")]
    IdentityViolation { s: u64, doubled: [i64; 3] },
}
