use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("invalid bounds on x{var}: [{lower}, {upper}]")]
    Bounds { var: usize, lower: f64, upper: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
