use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by the command-line tool.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read `{path}`: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error("cannot write `{path}`: {source}")]
    Write { path: PathBuf, source: std::io::Error },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] pasp_core::Error),
}

impl CliError {
    /// Short machine-greppable tag printed in front of the message.
    pub fn code(&self) -> &'static str {
        use pasp_core::Error as E;
        match self {
            CliError::Read { .. } | CliError::Write { .. } | CliError::Csv(_) => "io",
            CliError::Usage(_) => "usage",
            CliError::Core(e) => match e {
                E::Syntax { .. }
                | E::UnsafeVariable { .. }
                | E::ProbabilityOutOfRange { .. }
                | E::NonGroundProbFact { .. }
                | E::DuplicateProbFact { .. }
                | E::ProbFactUnifiesWithHead { .. } => "parse",
                E::NonGroundQuery { .. } => "query",
                E::FreshNameCollision { .. } => "encoding",
                E::Olon { .. } => "olon",
                E::CredalUndefined { .. } => "credal-undefined",
                E::TooManyProbFacts { .. } | E::TooManyUndefined { .. } => "limit",
                E::Interrupted => "timeout",
                E::NotPositive | E::Internal(_) => "internal",
            },
        }
    }

    /// 1 for problems with the invocation or its input files, 2 when a
    /// well-formed program cannot be solved.
    pub fn exit_code(&self) -> u8 {
        match self.code() {
            "io" | "usage" | "parse" | "query" => 1,
            _ => 2,
        }
    }
}
