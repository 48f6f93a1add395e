//! Error type shared by every engine operation.

use std::fmt;

use serde_json::Value;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse error category. The string forms are part of the CLI and HTTP
/// contracts (`error:<category>:` prefixes and the `category` field).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Category {
    Parse,
    Validation,
    Reference,
    Infeasible,
    Internal,
}

impl Category {
    pub fn as_str(self) -> &'static str {
        match self {
            Category::Parse => "parse",
            Category::Validation => "validation",
            Category::Reference => "reference",
            Category::Infeasible => "infeasible",
            Category::Internal => "internal",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Syntactically broken document.
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// A value violates a documented invariant. `path` names the field.
    #[error("{path}: {message}")]
    Validation { path: String, message: String },

    /// An id used somewhere does not exist where it should.
    #[error("{path}: unresolved reference `{id}`")]
    UnresolvedReference { path: String, id: String },

    /// The inputs are well-formed but the question has no answer
    /// (empty feasible set, no feasible household profile, ...).
    /// `detail` carries the diagnostic payload, e.g. relaxation advice.
    #[error("{message}")]
    Infeasible { message: String, detail: Value },

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn unresolved(path: impl Into<String>, id: impl Into<String>) -> Self {
        Error::UnresolvedReference {
            path: path.into(),
            id: id.into(),
        }
    }

    pub fn infeasible(message: impl Into<String>, detail: Value) -> Self {
        Error::Infeasible {
            message: message.into(),
            detail,
        }
    }

    pub fn category(&self) -> Category {
        match self {
            Error::Parse { .. } => Category::Parse,
            Error::Validation { .. } => Category::Validation,
            Error::UnresolvedReference { .. } => Category::Reference,
            Error::Infeasible { .. } => Category::Infeasible,
            Error::Internal(_) => Category::Internal,
        }
    }

    pub fn field_path(&self) -> Option<&str> {
        match self {
            Error::Validation { path, .. } | Error::UnresolvedReference { path, .. } => {
                Some(path.as_str())
            }
            _ => None,
        }
    }

    /// Prefixes the field path with `prefix`, so nested validators can
    /// report paths relative to themselves.
    pub fn within(self, prefix: &str) -> Self {
        match self {
            Error::Validation { path, message } => Error::Validation {
                path: join_path(prefix, &path),
                message,
            },
            Error::UnresolvedReference { path, id } => Error::UnresolvedReference {
                path: join_path(prefix, &path),
                id,
            },
            other => other,
        }
    }
}

pub(crate) fn join_path(prefix: &str, path: &str) -> String {
    match (prefix.is_empty(), path.is_empty()) {
        (true, _) => path.to_string(),
        (false, true) => prefix.to_string(),
        (false, false) if path.starts_with('[') => format!("{prefix}{path}"),
        (false, false) => format!("{prefix}.{path}"),
    }
}

/// Checks that `value` is finite and inside `[lo, hi]`.
pub(crate) fn check_range(path: &str, value: f64, lo: f64, hi: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::validation(path, format!("must be finite (got {value})")));
    }
    if value < lo || value > hi {
        return Err(Error::validation(
            path,
            format!("must be within [{lo}, {hi}] (got {value})"),
        ));
    }
    Ok(())
}

pub(crate) fn check_nonnegative(path: &str, value: f64) -> Result<()> {
    if !value.is_finite() || value < 0.0 {
        return Err(Error::validation(
            path,
            format!("must be a finite non-negative number (got {value})"),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paths_compose() {
        let e = Error::validation("w", "bad").within("initial_state");
        assert_eq!(e.field_path(), Some("initial_state.w"));
        let e = Error::validation("[2].id", "bad").within("roles");
        assert_eq!(e.field_path(), Some("roles[2].id"));
        let e = Error::validation("", "bad").within("thresholds");
        assert_eq!(e.field_path(), Some("thresholds"));
    }

    #[test]
    fn range_rejects_nan() {
        assert!(check_range("x", f64::NAN, 0.0, 1.0).is_err());
        assert!(check_range("x", 1.0, 0.0, 1.0).is_ok());
        assert!(check_range("x", 1.0000001, 0.0, 1.0).is_err());
    }
}
