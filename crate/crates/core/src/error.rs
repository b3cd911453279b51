use std::fmt;

use thiserror::Error;

/// Which family of weight constraints a residual belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Row,
    Column,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axis::Row => f.write_str("row"),
            Axis::Column => f.write_str("column"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{field}: {reason}")]
    InvalidInput { field: String, reason: String },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("negative entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("{axis} {index}: normalization residual {residual:e} exceeds tolerance")]
    Normalization {
        axis: Axis,
        index: usize,
        residual: f64,
    },

    #[error("{function}: argument {value} outside domain {domain}{}", row_suffix(*row))]
    Domain {
        function: String,
        value: f64,
        domain: String,
        row: Option<usize>,
    },

    #[error("quadrature on [{a}, {b}] did not reach tolerance within depth cap")]
    Quadrature { a: f64, b: f64 },

    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },
}

fn row_suffix(row: Option<usize>) -> String {
    match row {
        Some(i) => format!(" (inner point of row {i})"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn input(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidInput {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Attach the offending row index to a domain error.
    pub(crate) fn at_row(self, i: usize) -> Self {
        match self {
            Error::Domain {
                function,
                value,
                domain,
                ..
            } => Error::Domain {
                function,
                value,
                domain,
                row: Some(i),
            },
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
