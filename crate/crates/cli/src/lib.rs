//! File formats, reports and the command implementations behind the
//! `neumann` binary.
//!
//! Every command writes into an output directory and returns an exit status:
//! 0 on success, 1 when a numerical step failed (partial outputs are still
//! written), 2 for bad input.

use std::fmt;

pub mod commands;
pub mod config;
pub mod output;
pub mod spec;

/// Exit status of a command that ran to the end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    /// Outputs were written but a solve or verdict failed.
    NumericalFailure,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Success => 0,
            Status::NumericalFailure => 1,
        }
    }
}

/// A command that stopped early.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl fmt::Display) -> Self {
        Self {
            code: 2,
            message: message.to_string(),
        }
    }

    pub fn numerical(message: impl fmt::Display) -> Self {
        Self {
            code: 1,
            message: message.to_string(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Failure {}
