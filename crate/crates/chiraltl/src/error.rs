//! Error taxonomy shared by the library and the CLI.
//!
//! The three variants map one-to-one onto the CLI exit codes: configuration
//! errors (bad input, closed slits, Nyquist violations) exit 2, numerical
//! errors (quadrature or solver non-convergence, truncation blow-ups) exit 3,
//! and oracle mismatches exit 4.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("ERROR config: {0}")]
    Config(String),
    #[error("ERROR numerical: {0}")]
    Numerical(String),
    #[error("ERROR oracle: {0}")]
    Oracle(String),
}

impl Error {
    /// Process exit code for the CLI contract (0 ok, 2 config, 3 numerical, 4 oracle).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Numerical(_) => 3,
            Error::Oracle(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn config_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

pub(crate) fn numerical_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Numerical(msg.into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_and_diagnostic_format() {
        let e = Error::Config("open_fraction must lie in (0,1), got 1.2".into());
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().starts_with("ERROR config: open_fraction"));
        assert_eq!(Error::Numerical("x".into()).exit_code(), 3);
        assert_eq!(Error::Oracle("x".into()).exit_code(), 4);
    }
}
