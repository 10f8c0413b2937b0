use std::path::PathBuf;

use thiserror::Error;

use crate::sketch::HoleKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },

    #[error("{found} hole at {line}:{col} is not allowed here; expected {expected}")]
    HolePosition {
        line: usize,
        col: usize,
        found: HoleKind,
        expected: &'static str,
    },

    #[error("function `{0}` takes no inputs; at least one f32 parameter is required")]
    ZeroArity(String),

    #[error("program still contains {0} hole(s)")]
    RemainingHoles(usize),

    #[error("assignment has {got} value(s) but the sketch has {expected} hole(s)")]
    AssignmentLength { expected: usize, got: usize },

    #[error("hole {index} is a {kind} hole but was given a {got} value")]
    AssignmentKind {
        index: usize,
        kind: HoleKind,
        got: &'static str,
    },

    #[error("hole {index}: category {category} is out of range for a {kind} hole of arity {arity}")]
    CategoryOutOfRange {
        index: usize,
        kind: HoleKind,
        category: usize,
        arity: usize,
    },

    #[error("input has {got} value(s) but the program takes {expected}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("specification is empty")]
    EmptySpec,

    #[error("gradient estimate needs at least one sample")]
    NoSamples,

    #[error("fitness standardization needs at least 2 values, got {0}")]
    TooFewLosses(usize),

    #[error("discrete search space has {size} programs, above the cap of {cap}")]
    EnumerationCap { size: u128, cap: u128 },

    #[error("{count} fixed real value(s) given but the sketch has {expected} Real hole(s)")]
    RealCount { expected: usize, count: usize },

    #[error("theta mismatch: {0}")]
    Theta(String),

    #[error("{0}")]
    Spec(String),

    #[error("{0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
