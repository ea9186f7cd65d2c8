//! Team formation support: questionnaire scoring, behavioural styles, team
//! balance, role recommendation, project analytics, and the session and
//! report documents that tie them together.

pub mod analytics;
pub mod error;
pub mod fraction;
pub mod instrument;
pub mod profile;
pub mod recommend;
pub mod report;
pub mod session;
pub mod style;
pub mod team;

pub use error::{Error, Result, Violation};
