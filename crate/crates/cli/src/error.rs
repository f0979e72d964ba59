//! CLI errors. Every variant maps to exit code 2.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("{place}: {source}")]
    Input {
        place: String,
        #[source]
        source: vcglab::Error,
    },

    #[error("{place}: {message}")]
    Semantic { place: String, message: String },

    #[error("{0}")]
    Io(String),

    #[error("cannot write output: {0}")]
    Output(String),
}

impl CliError {
    pub fn input(place: &str, source: vcglab::Error) -> Self {
        CliError::Input {
            place: place.to_string(),
            source,
        }
    }

    pub fn semantic(place: &str, message: impl Into<String>) -> Self {
        CliError::Semantic {
            place: place.to_string(),
            message: message.into(),
        }
    }
}
