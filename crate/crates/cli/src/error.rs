use std::fmt;

use cantor_frame::Error;

pub const EXIT_INVARIANT: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_SIZE: u8 = 3;
pub const EXIT_SOLVER: u8 = 4;
pub const EXIT_BRACKET: u8 = 5;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn size(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_SIZE,
            message: message.into(),
        }
    }

    pub fn io(e: &std::io::Error) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: format!("cannot write output: {e}"),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::DepthLimit { .. } | Error::DimensionLimit { .. } => EXIT_SIZE,
            Error::NonConvergence { .. } => EXIT_SOLVER,
            Error::BracketFailure { .. } => EXIT_BRACKET,
            _ => EXIT_USAGE,
        };
        let mut message = e.to_string();
        if code == EXIT_BRACKET {
            message.push_str(" (try a larger --M)");
        }
        CliError { code, message }
    }
}
