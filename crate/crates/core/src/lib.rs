//! Grammar-based variation of monophonic tunes.
//!
//! A tune is parsed into a Sequitur grammar, one of 19 structural mutation
//! operators edits the grammar, and the edited grammar is expanded back into
//! a new tune. Repeating the loop gives a trajectory of gradually diverging
//! variations, measured by edit distance, length and pathway assembly index.

pub mod corpus;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod midi;
pub mod model;
pub mod mutation;
pub mod pipeline;
pub mod sequitur;

pub use error::{Error, Result};
pub use model::{
    Effect, Grammar, MutationKind, NoteAlphabet, Pitch, RuleId, Symbol, TrajectoryRecord, Tune,
    ValidityReport, Violation, ROOT,
};
