use alloc::string::String;
use alloc::vec::Vec;

use crate::nonlinear::Parameter;

/// Errors raised by the finite-element kernel, the solvers, and the reduced-model builders.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A sparse or dense linear solve broke down or missed its residual tolerance.
    #[error("linear solver failed: {reason} (residual {residual:.3e} after {refinements} refinement steps)")]
    SolverFailure {
        /// What went wrong.
        reason: String,
        /// Relative residual reached, `NaN` when the factorization itself failed.
        residual: f64,
        /// Iterative refinement steps attempted.
        refinements: usize,
    },

    /// Newton iterations did not reach the tolerance.
    #[error("Newton failed to converge at mu = {mu} after {iterations} iterations (last residual {last:.3e})", last = history.last().copied().unwrap_or(f64::NAN))]
    NewtonFailure {
        /// Parameter of the failed solve.
        mu: Parameter,
        /// Newton updates performed.
        iterations: usize,
        /// Residual norm at every iterate, starting with the initial guess.
        history: Vec<f64>,
    },

    /// The first EIM snapshot vanishes, so it cannot be normalized.
    #[error("first EIM snapshot at mu = {0} is identically zero; pick a different first training parameter")]
    DegenerateSnapshot(Parameter),

    /// The EIM residual peaks at an existing interpolation point.
    #[error("EIM interpolation point {0} was already selected")]
    DegeneratePoint(usize),

    /// Gram-Schmidt left (almost) nothing of a new snapshot.
    #[error("snapshot at mu = {0} is linearly dependent on the current reduced basis")]
    LinearDependence(Parameter),

    /// Too many reduced solves failed during a greedy sweep.
    #[error("{failed} of {total} greedy evaluations failed; aborting the build")]
    GreedyAbort {
        /// Failed evaluations.
        failed: usize,
        /// Size of the training set.
        total: usize,
    },
}

/// Shorthand for results carrying [`Error`].
pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
