//! Error type shared by the whole crate.

use core::fmt;

/// Failure modes of the numerical routines.
///
/// Routines never panic on bad numeric input; they return one of these.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Lattice dimension outside the supported range for the operation.
    DimensionOutOfRange { d: usize, max: usize },
    /// Basis matrix is numerically singular.
    SingularBasis,
    /// Gram matrix is not symmetric positive definite.
    BadGram,
    /// An enumeration or summation exceeded its configured point cap.
    CapExceeded { cap: usize },
    /// Scalar argument outside the documented domain.
    Domain(&'static str),
    /// Evaluation requested at a pole of the function.
    PoleArgument(&'static str),
    /// An iterative scheme failed to reach its tolerance.
    ConvergenceFailure(&'static str),
    /// Series parameters make the requested series diverge.
    DivergentSeries,
    /// Evaluation point is within the singular guard distance of a lattice point.
    NearSingularity { dist: f64 },
    /// Two configuration points closer than the singular guard in the torus metric.
    CoincidentPoints { dist: f64 },
    /// Domain volume incompatible with the lattice covolume at a call site
    /// that requires their product to be one.
    VolumeMismatch { product: f64 },
    /// Adaptive quadrature could not meet its error target.
    QuadratureFailure,
    /// Rejection sampling exhausted its proposal budget.
    RejectionBudgetExceeded,
    /// Spectral support construction produced no frequencies.
    EmptySupport,
    /// No dual-lattice vector has the requested squared norm.
    EmptyShell,
    /// Candidate pool smaller than the requested support size.
    PoolTooSmall { pool: usize, needed: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionOutOfRange { d, max } => {
                write!(f, "dimension {d} out of range (1..={max})")
            }
            Error::SingularBasis => write!(f, "basis matrix is singular"),
            Error::BadGram => write!(f, "Gram matrix is not symmetric positive definite"),
            Error::CapExceeded { cap } => write!(f, "enumeration cap of {cap} points exceeded"),
            Error::Domain(what) => write!(f, "argument outside domain: {what}"),
            Error::PoleArgument(what) => write!(f, "evaluation at a pole: {what}"),
            Error::ConvergenceFailure(what) => write!(f, "failed to converge: {what}"),
            Error::DivergentSeries => write!(f, "series diverges for these parameters"),
            Error::NearSingularity { dist } => {
                write!(f, "point within {dist:e} of a lattice point")
            }
            Error::CoincidentPoints { dist } => {
                write!(f, "configuration points within {dist:e} of each other")
            }
            Error::VolumeMismatch { product } => {
                write!(f, "domain volume times covolume is {product}, expected 1")
            }
            Error::QuadratureFailure => write!(f, "adaptive quadrature failed to meet tolerance"),
            Error::RejectionBudgetExceeded => write!(f, "rejection sampling budget exceeded"),
            Error::EmptySupport => write!(f, "spectral support is empty"),
            Error::EmptyShell => write!(f, "no dual vectors with the requested norm"),
            Error::PoolTooSmall { pool, needed } => {
                write!(f, "candidate pool has {pool} vectors, need {needed}")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
