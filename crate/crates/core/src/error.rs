use serde::{Deserialize, Serialize};
use std::fmt;

/// A single problem found while validating hand-entered input.
///
/// Validators collect every violation they find instead of stopping at the
/// first one, so callers get a complete list to fix in one pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Violation {
    /// A rank outside 1..=4 in a sociological group.
    InvalidRank {
        questionnaire: usize,
        group: usize,
        slot: usize,
        value: i64,
    },
    /// A sociological group whose ranks are not a permutation of 1..=4.
    DuplicateRank {
        questionnaire: usize,
        group: usize,
        value: i64,
    },
    /// Wrong number of groups in a questionnaire, or wrong number of answer
    /// slots in a group.
    MissingGroup {
        questionnaire: usize,
        expected: usize,
        found: usize,
    },
    WrongSlotCount {
        questionnaire: usize,
        group: usize,
        expected: usize,
        found: usize,
    },
    /// Quality-of-life answer outside 1..=7.
    OutOfRangeAnswer { question: usize, value: i64 },
    MissingAnswer { expected: usize, found: usize },
    /// Structurally wrong input: wrong JSON type, missing field, etc.
    Malformed { path: String, reason: String },
    CycleDetected { position: String },
    MultipleRoots { roots: Vec<String> },
    NoRoot,
    UnknownRole { position: String, role: String },
    UnknownParent { position: String, parent: String },
    ZeroHeadcount { position: String },
    DuplicateId { id: String },
    UnknownAspiredRole { candidate: String, role: String },
    TechnicalScoreOutOfRange {
        candidate: String,
        role: String,
        score: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::InvalidRank {
                questionnaire,
                group,
                slot,
                value,
            } => write!(
                f,
                "questionnaire {questionnaire} group {group} slot {slot}: rank {value} is outside 1..=4"
            ),
            Violation::DuplicateRank {
                questionnaire,
                group,
                value,
            } => write!(
                f,
                "questionnaire {questionnaire} group {group}: rank {value} repeated"
            ),
            Violation::MissingGroup {
                questionnaire,
                expected,
                found,
            } => write!(
                f,
                "questionnaire {questionnaire}: expected {expected} groups, found {found}"
            ),
            Violation::WrongSlotCount {
                questionnaire,
                group,
                expected,
                found,
            } => write!(
                f,
                "questionnaire {questionnaire} group {group}: expected {expected} answers, found {found}"
            ),
            Violation::OutOfRangeAnswer { question, value } => {
                write!(f, "quality-of-life question {question}: answer {value} is outside 1..=7")
            }
            Violation::MissingAnswer { expected, found } => {
                write!(f, "quality-of-life: expected {expected} answers, found {found}")
            }
            Violation::Malformed { path, reason } => write!(f, "{path}: {reason}"),
            Violation::CycleDetected { position } => {
                write!(f, "position {position} is part of a parent cycle")
            }
            Violation::MultipleRoots { roots } => {
                write!(f, "chart has several roots: {}", roots.join(", "))
            }
            Violation::NoRoot => write!(f, "chart has no root position"),
            Violation::UnknownRole { position, role } => {
                write!(f, "position {position} references unknown role {role}")
            }
            Violation::UnknownParent { position, parent } => {
                write!(f, "position {position} references unknown parent {parent}")
            }
            Violation::ZeroHeadcount { position } => {
                write!(f, "position {position} has headcount 0")
            }
            Violation::DuplicateId { id } => write!(f, "duplicate id {id}"),
            Violation::UnknownAspiredRole { candidate, role } => {
                write!(f, "candidate {candidate} aspires to unknown role {role}")
            }
            Violation::TechnicalScoreOutOfRange {
                candidate,
                role,
                score,
            } => write!(
                f,
                "candidate {candidate}: technical score {score} for role {role} is outside 0..=100"
            ),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("validation failed: {}", join_violations(.0))]
    Validation(Vec<Violation>),

    #[error("a trait cannot be compared with itself")]
    SameTrait,

    #[error("quartet {0:?} must sum to 60 with every value in 6..=24")]
    InvalidQuartet([i64; 4]),

    #[error("a resume table needs at least one member")]
    EmptyTeam,

    #[error("unknown candidate {0}")]
    UnknownCandidate(String),

    #[error("unknown position {0}")]
    UnknownPosition(String),

    #[error("candidate {0} has not been scored")]
    UnscoredCandidate(String),

    #[error("candidate {candidate} would occupy both {first} and {second}")]
    ConflictingEdit {
        candidate: String,
        first: String,
        second: String,
    },

    #[error("organization chart is invalid: {}", join_violations(.0))]
    InfeasibleChart(Vec<Violation>),

    #[error("invalid recommender configuration: {0}")]
    InvalidConfig(String),

    #[error("duration must be positive")]
    ZeroMonths,

    #[error("units present in only one snapshot: {0:?}")]
    UnmatchedUnits(Vec<String>),

    #[error("no paired observations supplied")]
    NoObservations,

    #[error("non-finite observation for unit {0}")]
    NonFinite(String),

    #[error("variable {variable}: no ordinal code for level {level:?}")]
    UnknownLevel { variable: String, level: String },

    #[error("session has no final assignment")]
    NoFinalAssignment,

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("unsupported schema version {found} (expected {expected})")]
    SchemaVersionMismatch { found: u64, expected: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    pub fn parse(location: impl Into<String>, message: impl fmt::Display) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.to_string(),
        }
    }

    /// Violations carried by this error, if it is a validation failure.
    pub fn violations(&self) -> Option<&[Violation]> {
        match self {
            Error::Validation(v) | Error::InfeasibleChart(v) => Some(v),
            _ => None,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
