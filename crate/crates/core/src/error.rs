use std::path::PathBuf;

use crate::model::{MutationKind, RuleId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("tune is empty")]
    EmptyTune,

    #[error("tune needs at least {needed} notes, got {got}")]
    TuneTooShort { needed: usize, got: usize },

    #[error("grammar is structurally invalid: {0}")]
    InvalidGrammar(String),

    #[error("unknown rule p{0}")]
    UnknownRule(RuleId),

    #[error("unknown mutation kind `{0}`")]
    UnknownKind(String),

    #[error("mutation {} ({}) is not applicable to this grammar", .0.index(), .0.code())]
    InapplicableKind(MutationKind),

    #[error("mutation {} ({}): no valid targets after {attempts} attempts", .kind.index(), .kind.code())]
    ResamplingExhausted { kind: MutationKind, attempts: u32 },

    #[error("no applicable mutation among the allowed kinds")]
    NoApplicableMutation,

    #[error("forced edit rejected: {0}")]
    InvalidEdit(String),

    #[error("invalid run configuration: {0}")]
    InvalidConfig(String),

    #[error("step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("trajectories have different lengths ({expected} vs {got})")]
    LengthMismatch { expected: usize, got: usize },

    #[error("{}:{line}:{column}: invalid token `{token}` (token {index})", .path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        index: usize,
        token: String,
    },

    #[error("note {value} at index {index} is outside the MIDI range 0-127")]
    NoteOutOfRange { index: usize, value: i64 },

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("duplicate tune id `{0}` in corpus")]
    DuplicateTuneId(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
