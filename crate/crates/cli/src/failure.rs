//! Error-to-exit-code mapping.

use std::fmt;

use ucmarket::{DataError, PricingError, UcError};
use ucmarket_milp::Status;

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_DATA: u8 = 2;
pub const EXIT_INFEASIBLE: u8 = 3;
pub const EXIT_NO_INCUMBENT: u8 = 4;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn new(code: u8, error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code,
            error: error.into(),
        }
    }

    pub fn usage(message: impl fmt::Display) -> Self {
        Failure::new(EXIT_USAGE, anyhow::anyhow!("{message}"))
    }

    pub fn data(message: impl fmt::Display) -> Self {
        Failure::new(EXIT_DATA, anyhow::anyhow!("{message}"))
    }

    pub fn context(self, what: impl fmt::Display) -> Self {
        Failure {
            code: self.code,
            error: self.error.context(what.to_string()),
        }
    }
}

impl From<DataError> for Failure {
    fn from(e: DataError) -> Self {
        let code = match e {
            DataError::Io { .. } => EXIT_USAGE,
            _ => EXIT_DATA,
        };
        Failure::new(code, e)
    }
}

impl From<UcError> for Failure {
    fn from(e: UcError) -> Self {
        match e {
            UcError::Data(d) => d.into(),
            UcError::Dimension(_) => Failure::new(EXIT_DATA, e),
            UcError::NoSolution {
                status: Status::Infeasible | Status::Unbounded,
            } => Failure::new(EXIT_INFEASIBLE, e),
            _ => Failure::new(EXIT_NO_INCUMBENT, e),
        }
    }
}

impl From<PricingError> for Failure {
    fn from(e: PricingError) -> Self {
        match e {
            PricingError::Uc(u) => u.into(),
            PricingError::Horizon { .. } | PricingError::ZeroDemand => Failure::new(EXIT_DATA, e),
            PricingError::NegativeUplift(_) => Failure::new(EXIT_NO_INCUMBENT, e),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new(EXIT_USAGE, e)
    }
}
