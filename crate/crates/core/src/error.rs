use std::fmt;

use thiserror::Error;

/// A single violated configuration invariant, located by its field path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigIssue {
    pub path: String,
    pub message: String,
}

impl ConfigIssue {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigIssues(pub Vec<ConfigIssue>);

impl fmt::Display for ConfigIssues {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, issue) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{issue}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration:\n{0}")]
    Config(ConfigIssues),

    #[error("tridiagonal system at step {step} is not diagonally dominant (node {node})")]
    NotDiagonallyDominant { step: usize, node: usize },

    #[error("non-finite value at step {step}")]
    NonFinite { step: usize },

    #[error("{what} did not converge after {iterations} iterations (last defect {defect:e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        defect: f64,
    },

    #[error("could not bracket R0 after {expansions} bracket expansions")]
    Bracket { expansions: usize },

    #[error(
        "disease-free iteration from the two starts disagrees by {gap:e} (allowed {tolerance:e})"
    )]
    DfeUniqueness { gap: f64, tolerance: f64 },

    #[error("limit target not applicable: {0}")]
    NotApplicable(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config(ConfigIssues(vec![ConfigIssue::new(path, message)]))
    }

    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Parse(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
