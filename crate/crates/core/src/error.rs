use std::path::PathBuf;

use thiserror::Error;
use ucmarket_milp::Status;

/// Errors raised while reading or validating input data.
#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot read {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}: line {line}{}: {message}", column.as_ref().map(|c| format!(", column {c}")).unwrap_or_default())]
    Parse {
        origin: String,
        line: u64,
        column: Option<String>,
        message: String,
    },
    #[error("{origin}: {message}")]
    Empty { origin: String, message: String },
    #[error("unit {unit}: {message}")]
    InvalidGenerator { unit: String, message: String },
    #[error("day {day}: horizon must be 24 (found {found} values)")]
    Horizon { day: String, found: usize },
    #[error("day {day}, hour {hour}: demand must be positive (got {value})")]
    NonPositiveDemand { day: String, hour: usize, value: f64 },
    #[error("{0}")]
    Invalid(String),
}

impl DataError {
    pub(crate) fn parse(origin: &str, line: u64, column: Option<String>, message: impl Into<String>) -> Self {
        DataError::Parse {
            origin: origin.to_string(),
            line,
            column,
            message: message.into(),
        }
    }
}

/// Errors raised while building or solving a unit-commitment instance.
#[derive(Debug, Error)]
pub enum UcError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Solver(#[from] ucmarket_milp::Error),
    #[error("solver finished with status {status} and no usable schedule")]
    NoSolution { status: Status },
    #[error("binary {var} = {value} is not within integrality tolerance")]
    Fractional { var: usize, value: f64 },
    #[error("extracted schedule violates {count} constraints, first: {first}")]
    Infeasible { count: usize, first: String },
}

/// Errors raised while pricing or settling a schedule.
#[derive(Debug, Error)]
pub enum PricingError {
    #[error(transparent)]
    Uc(#[from] UcError),
    #[error("price series has {found} hours, schedule has {expected}")]
    Horizon { expected: usize, found: usize },
    #[error("total demand is zero; uplift is undefined")]
    ZeroDemand,
    #[error("uplift must be non-negative (got {0})")]
    NegativeUplift(f64),
}
