//! Error types shared across the crate.

/// Errors raised by densities, special functions, samplers, and the fitter.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error in {op}: {msg}")]
    Domain { op: &'static str, msg: String },

    /// Incompatible matrix dimensions.
    #[error("dimension mismatch in {op}: {msg}")]
    Dimension { op: &'static str, msg: String },

    /// A matrix required to be symmetric positive definite was not.
    #[error("matrix not positive definite in {op}")]
    NotPositiveDefinite { op: &'static str },

    /// Evaluation at a boundary of the parameter space where the quantity
    /// is undefined or infinite (e.g. the VG density at X = M with small γ).
    #[error("boundary error in {op}: {msg}")]
    Boundary { op: &'static str, msg: String },

    /// The CM1 denominator vanished: posterior weights degenerate at W ≡ const.
    #[error("degenerate posterior weights: {msg}")]
    DegenerateWeights { msg: String },

    /// A root-finding target has no root in the feasible region.
    #[error("no root in {op}: {msg}")]
    NoRoot { op: &'static str, msg: String },

    /// The log-likelihood became non-finite during fitting.
    #[error("non-finite log-likelihood at iteration {iteration}")]
    NonFiniteLogLik { iteration: usize },

    /// The log-likelihood decreased beyond the ascent slack.
    #[error("log-likelihood decreased by {drop:.3e} at iteration {iteration}")]
    AscentViolation { iteration: usize, drop: f64 },

    /// A fit aborted, wrapping the underlying cause with iteration context.
    #[error("fit aborted at iteration {iteration}: {source}")]
    FitAborted {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain { op, msg: msg.into() }
    }

    pub(crate) fn dimension(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Dimension { op, msg: msg.into() }
    }

    /// Attach fit-iteration context to an error bubbling out of a CM step.
    pub(crate) fn at_iteration(self, iteration: usize) -> Self {
        Error::FitAborted {
            iteration,
            source: Box::new(self),
        }
    }
}
