use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("exponent overflow: argument {arg:.6e} exceeds the representable range")]
    Overflow { arg: f64 },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("did not converge: {0}")]
    NonConvergence(String),
    #[error("mismatched structure: {0}")]
    Mismatch(String),
    #[error("no negative-energy endpoint sψ with s ≤ {s_max}")]
    EndpointSearch { s_max: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
