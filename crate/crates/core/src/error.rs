use std::fmt;

/// Errors raised by the simulation routines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("invalid degree law: {0}")]
    Validation(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("unsupported mode: {0}")]
    Mode(String),
    #[error("attempt budget of {attempts} exhausted")]
    Budget { attempts: usize },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("effective sample size {ess:.2} below {floor}")]
    Resampling { ess: f64, floor: f64 },
    #[error("mass/surplus matching failed: {0}")]
    Matching(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg(msg: impl fmt::Display) -> Error {
    Error::Argument(msg.to_string())
}
