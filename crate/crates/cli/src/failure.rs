use std::fmt;

use negclass_core::{DataError, ModelError};

pub const USAGE: u8 = 1;
pub const DATA: u8 = 2;
pub const MODEL: u8 = 3;

/// An error paired with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn usage(message: impl fmt::Display) -> Self {
        Failure { code: USAGE, error: anyhow::anyhow!("{message}") }
    }

    pub fn context(mut self, what: impl fmt::Display + Send + Sync + 'static) -> Self {
        self.error = self.error.context(what);
        self
    }
}

impl From<DataError> for Failure {
    fn from(e: DataError) -> Self {
        Failure { code: DATA, error: e.into() }
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        let code = match e {
            ModelError::Data(_) | ModelError::Io { .. } => DATA,
            _ => MODEL,
        };
        Failure { code, error: e.into() }
    }
}
