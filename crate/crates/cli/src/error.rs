//! Error classes and their exit codes.

use std::fmt;
use std::process::ExitCode;

use ecplan_core::codec::CodecError;
use ecplan_core::latency::LatencyError;
use ecplan_core::placement::PlacementError;
use ecplan_core::prob::ProbError;
use ecplan_core::scheme::SchemeError;
use ecplan_core::sim::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Failure {
    /// Reading or writing files.
    Io,
    /// Arguments that do not describe a valid model.
    Usage,
    /// Solver cap, rare-event guard, or a failed `--check`.
    Solver,
    InsufficientFragments,
    ChecksumMismatch,
    MalformedFragment,
}

impl Failure {
    pub fn code(self) -> u8 {
        match self {
            Failure::Io => 1,
            Failure::Usage => 2,
            Failure::Solver => 3,
            Failure::InsufficientFragments => 4,
            Failure::ChecksumMismatch => 5,
            Failure::MalformedFragment => 6,
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub kind: Failure,
    pub error: anyhow::Error,
}

impl CliError {
    pub fn new(kind: Failure, error: impl Into<anyhow::Error>) -> Self {
        Self {
            kind,
            error: error.into(),
        }
    }

    pub fn usage(message: impl fmt::Display) -> Self {
        Self::new(Failure::Usage, anyhow::anyhow!("{message}"))
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.kind.code())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

impl From<ProbError> for CliError {
    fn from(e: ProbError) -> Self {
        let kind = match e {
            ProbError::SolverCapExceeded { .. } | ProbError::AboveMeanThreshold { .. } => Failure::Solver,
            _ => Failure::Usage,
        };
        Self::new(kind, e)
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        let kind = match e {
            SimError::RareEvent { .. } | SimError::CertainFailure => Failure::Solver,
            SimError::ThreadPool(_) => Failure::Io,
            SimError::NoTrials | SimError::Placement(_) => Failure::Usage,
        };
        Self::new(kind, e)
    }
}

impl From<CodecError> for CliError {
    fn from(e: CodecError) -> Self {
        let kind = match e {
            CodecError::InsufficientFragments { .. } => Failure::InsufficientFragments,
            CodecError::ChecksumMismatch { .. } => Failure::ChecksumMismatch,
            CodecError::Malformed(_) | CodecError::MismatchedFragments(_) | CodecError::InconsistentLengths => {
                Failure::MalformedFragment
            }
            CodecError::Unrepairable { .. } => Failure::Solver,
            CodecError::EmptyObject
            | CodecError::TooManyFragments(_)
            | CodecError::NoDataFragments
            | CodecError::Unsupported(_) => Failure::Usage,
        };
        Self::new(kind, e)
    }
}

macro_rules! usage_errors {
    ($($t:ty),*) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                Self::new(Failure::Usage, e)
            }
        })*
    };
}

usage_errors!(SchemeError, LatencyError, PlacementError);

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::new(Failure::Io, e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::new(Failure::Io, e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::new(Failure::Io, e)
    }
}

impl CliError {
    pub fn with_context(self, context: impl fmt::Display + Send + Sync + 'static) -> Self {
        Self {
            kind: self.kind,
            error: self.error.context(context),
        }
    }
}
