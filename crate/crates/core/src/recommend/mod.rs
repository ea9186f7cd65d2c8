//! Role recommendation: score a candidate-to-slot assignment, search for a
//! good one, and let a human edit the result.
//!
//! The optimizer only proposes. Every proposal carries its full objective
//! breakdown and can be re-scored after expert edits with [`apply_override`].

mod affinity;
mod edit;
mod objective;
mod search;

pub use affinity::{affinity, roles, AffinityTable, DEFAULT_AFFINITY, NAMED_AFFINITY, RELATED_AFFINITY};
pub use edit::{apply_override, OverrideEdit};
pub use objective::{objective, ObjectiveBreakdown, PairTerm};
pub use search::{hill_climb_from, recommend};

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::team::{Candidate, Slot};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommenderConfig {
    pub w_tech: f64,
    pub w_affinity: f64,
    pub w_balance: f64,
    /// Largest number of complete assignments searched exhaustively.
    pub exhaustive_limit: u64,
    pub restarts: u32,
    pub max_iterations: u32,
    pub seed: u64,
    pub affinity: AffinityTable,
}

impl Default for RecommenderConfig {
    fn default() -> Self {
        RecommenderConfig {
            w_tech: 0.5,
            w_affinity: 0.3,
            w_balance: 0.2,
            exhaustive_limit: 5040,
            restarts: 8,
            max_iterations: 1000,
            seed: 0,
            affinity: AffinityTable::default(),
        }
    }
}

impl RecommenderConfig {
    pub fn validate(&self) -> Result<()> {
        let weights = [self.w_tech, self.w_affinity, self.w_balance];
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidConfig(
                "weights must be finite and non-negative".into(),
            ));
        }
        if weights.iter().all(|w| *w == 0.0) {
            return Err(Error::InvalidConfig("at least one weight must be positive".into()));
        }
        self.affinity.validate().map_err(Error::InvalidConfig)
    }
}

/// Candidate per slot, plus what was left over on either side.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub pairs: BTreeMap<String, String>,
    #[serde(default)]
    pub unfilled: Vec<String>,
    #[serde(default)]
    pub bench: Vec<String>,
}

impl Assignment {
    /// Completes `pairs` with the unfilled slots (chart order) and benched
    /// candidates (pool order).
    pub fn from_pairs(pairs: BTreeMap<String, String>, slots: &[Slot], pool: &[Candidate]) -> Self {
        let used: BTreeSet<&str> = pairs.values().map(String::as_str).collect();
        let unfilled = slots
            .iter()
            .filter(|s| !pairs.contains_key(&s.id))
            .map(|s| s.id.clone())
            .collect();
        let bench = pool
            .iter()
            .filter(|c| !used.contains(c.id.as_str()))
            .map(|c| c.id.clone())
            .collect();
        Assignment {
            pairs,
            unfilled,
            bench,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Exhaustive,
    HillClimb,
    ExpertOverride,
}

impl Strategy {
    pub fn label(self) -> &'static str {
        match self {
            Strategy::Exhaustive => "exhaustive",
            Strategy::HillClimb => "hill-climb",
            Strategy::ExpertOverride => "expert-override",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchMeta {
    pub strategy: Strategy,
    /// Improving moves (hill climbing) or assignments visited (exhaustive).
    pub iterations: u64,
    pub restarts: u32,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub edits: Vec<OverrideEdit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentProposal {
    pub assignment: Assignment,
    pub objective: f64,
    pub breakdown: ObjectiveBreakdown,
    pub search_meta: SearchMeta,
}
