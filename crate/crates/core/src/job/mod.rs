//! Structured job files: parsing, execution and report emission.

mod emit;
mod run;
mod spec;

pub use emit::{emit, summary_path, Emitted};
pub use run::*;
pub use spec::{
    parse_job, parse_job_unchecked, validation_error, ClassRef, Command, Format, GroupRef, InlineGroup, JobSpec,
    AUTO_MARGIN, N_MAX_CAP, T_MAX_CAP,
};

use crate::error::Error;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum JobError {
    #[error("{}{message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Parse { line: Option<usize>, message: String },
    #[error(transparent)]
    Engine(#[from] Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl JobError {
    /// 2 for bad input, 3 for invariant failures, 4 for resource caps.
    pub fn exit_code(&self) -> i32 {
        match self {
            JobError::Parse { .. } => 2,
            JobError::Io(_) => 1,
            JobError::Engine(e) => match e {
                Error::BallCap { .. } => 4,
                Error::Saturation(_) | Error::Constraint(_) | Error::Consistency { .. } | Error::InsufficientData(_) => 3,
                _ => 2,
            },
        }
    }
}
