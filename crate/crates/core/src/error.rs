use thiserror::Error;

/// Everything that can go wrong in the library.
///
/// Domain and parameter errors are user mistakes; convergence and solver
/// errors are numerical failures. The CLI maps the two groups to distinct
/// exit codes via [`Error::kind`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("series did not converge after {terms} terms (last partial sum {partial_sum:e})")]
    Convergence { partial_sum: f64, terms: usize },

    #[error("reduction failed for family m1={family}: {reason} (slot {slot})")]
    Reduction {
        family: String,
        slot: String,
        reason: String,
    },

    #[error("trivial family m1={family}: V1..V4 all vanish, nothing to reduce")]
    TrivialFamily { family: String },

    #[error("forbidden state: radicand 1 + 2E/(mc^2) = {radicand:e} is negative")]
    Forbidden { radicand: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("evaluation failed at grid point {index}: {source}")]
    AtPoint {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("solver configuration: {0}")]
    SolverConfig(String),
}

/// Coarse classification of [`Error`](enum@Error) values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad input: parameters, domains, degenerate or forbidden requests.
    Input,
    /// Numerical non-convergence.
    Convergence,
    /// The eigenvalue solver was not configured adequately.
    Solver,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Convergence { .. } => ErrorKind::Convergence,
            Error::SolverConfig(_) => ErrorKind::Solver,
            Error::AtPoint { source, .. } => source.kind(),
            _ => ErrorKind::Input,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
