//! Error types shared across the crate.

use std::fmt;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes of the solvers.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// A parameter lies outside its admissible window.
    Domain(String),
    /// The requested operation is undefined in the balanced regime `q = p/2 + 1`.
    Regime(String),
    /// No finite threshold exists for the requested configuration (e.g. `N = 2`).
    NoThreshold(String),
    /// A bracketing search exhausted its configured bounds.
    SearchFailure(String),
    /// No soliton piece matches the requested mass/endpoint pair.
    Infeasible {
        /// Edge index the failure is attributed to, when meaningful.
        edge: Option<usize>,
        /// Bracket attempted by the solver before giving up.
        bracket: (f64, f64),
        detail: String,
    },
    /// A finite-difference step was too large (or too small) to be trusted.
    StepSize(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Attach an edge index to an infeasibility report.
    pub(crate) fn with_edge(self, idx: usize) -> Self {
        match self {
            Error::Infeasible {
                bracket, detail, ..
            } => Error::Infeasible {
                edge: Some(idx),
                bracket,
                detail,
            },
            other => other,
        }
    }

    /// Process exit code the CLI maps this error to (2 domain, 3 search).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Regime(_) | Error::NoThreshold(_) | Error::StepSize(_) => 2,
            Error::SearchFailure(_) | Error::Infeasible { .. } => 3,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Regime(msg) => write!(f, "regime error: {msg}"),
            Error::NoThreshold(msg) => write!(f, "no threshold: {msg}"),
            Error::SearchFailure(msg) => write!(f, "search failure: {msg}"),
            Error::Infeasible {
                edge,
                bracket,
                detail,
            } => {
                write!(f, "infeasible soliton piece")?;
                if let Some(i) = edge {
                    write!(f, " on edge {i}")?;
                }
                write!(
                    f,
                    ": {detail} (attempted frequency bracket [{:.3e}, {:.3e}])",
                    bracket.0, bracket.1
                )
            }
            Error::StepSize(msg) => write!(f, "step-size error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}
