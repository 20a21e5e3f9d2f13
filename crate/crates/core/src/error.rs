use thiserror::Error;

/// Errors raised by the symbolic engine, the spectral loop machinery, the
/// flow integrators and the series laboratory.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A differential polynomial is not a total derivative (or carries a
    /// constant term), so a formal `∂_s⁻¹` does not exist.
    #[error("not exact: {0}")]
    NotExact(String),

    #[error("no rational solution: {0}")]
    NoSolution(String),

    /// Numerical counterpart of [`Error::NotExact`]: the mean of a grid
    /// function exceeds the exactness tolerance.
    #[error("grid function is not exact: mean {mean:e} exceeds tolerance {tol:e}")]
    NotExactNumeric { mean: f64, tol: f64 },

    /// `k·vi` has nonzero mean, so `vi` admits no isometric partner.
    #[error("field is not in the isometric domain: mean(k*vi) = {mean:e} exceeds {tol:e}")]
    NotInHA0 { mean: f64, tol: f64 },

    #[error("immersion is not unit speed: deviation {deviation:e} exceeds {tol:e}")]
    NotUnitSpeed { deviation: f64, tol: f64 },

    #[error("mean curvature {mean} is not an integer winding number (tolerance {tol:e})")]
    NonIntegerWinding { mean: f64, tol: f64 },

    #[error("grid function violates the band limit: out-of-band amplitude {amplitude:e}")]
    BandLimit { amplitude: f64 },

    #[error("curvature vanishes: min |k| = {min_abs:e} below floor {floor:e}")]
    CurvatureVanishes { min_abs: f64, floor: f64 },

    #[error("numerical instability at t = {time}: {reason}")]
    Instability { time: f64, reason: String },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    /// A Newton iterate that started away from a circle collapsed onto a
    /// constant curvature.
    #[error("iterate collapsed to constant curvature {value}")]
    ConstantCollapse { value: f64 },

    #[error("insufficient order: {0}")]
    InsufficientOrder(String),

    #[error("not invertible: {0}")]
    NotInvertible(String),

    #[error("grid mismatch: {0} vs {1} samples")]
    GridMismatch(usize, usize),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),
}

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Numerical,
    Tolerance,
    Symbolic,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            NotExact(_) | NoSolution(_) => ErrorClass::Symbolic,
            Instability { .. } | NoConvergence { .. } | NotInvertible(_) => ErrorClass::Numerical,
            NotExactNumeric { .. }
            | NotInHA0 { .. }
            | NotUnitSpeed { .. }
            | NonIntegerWinding { .. }
            | BandLimit { .. }
            | CurvatureVanishes { .. }
            | ConstantCollapse { .. } => ErrorClass::Tolerance,
            InsufficientOrder(_) | GridMismatch(..) | InvalidInput(_) | Parse(_) => {
                ErrorClass::Usage
            }
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
