use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use super::objective::Problem;
use super::{AssignmentProposal, RecommenderConfig, SearchMeta, Strategy};
use crate::error::{Error, Result};
use crate::team::{Candidate, OrgChart};

/// Put `candidate` in slot `position`, or clear the slot when `candidate` is
/// `None`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverrideEdit {
    pub position: String,
    pub candidate: Option<String>,
}

impl OverrideEdit {
    pub fn assign(position: &str, candidate: &str) -> Self {
        OverrideEdit {
            position: position.to_string(),
            candidate: Some(candidate.to_string()),
        }
    }

    pub fn clear(position: &str) -> Self {
        OverrideEdit {
            position: position.to_string(),
            candidate: None,
        }
    }
}

/// Applies a batch of expert edits to a proposal and re-scores it.
///
/// Edits in a batch take effect together, so a swap is two edits. A
/// candidate may not end up in two slots; moving someone means clearing the
/// old slot in the same batch. Nothing outside the edited slots changes.
pub fn apply_override(
    proposal: &AssignmentProposal,
    edits: &[OverrideEdit],
    pool: &[Candidate],
    chart: &OrgChart,
    config: &RecommenderConfig,
) -> Result<AssignmentProposal> {
    let problem = Problem::new(pool, chart, config)?;
    for e in edits {
        if !problem.slots.iter().any(|s| s.id == e.position) {
            return Err(Error::UnknownPosition(e.position.clone()));
        }
        if let Some(c) = &e.candidate {
            if !pool.iter().any(|p| &p.id == c) {
                return Err(Error::UnknownCandidate(c.clone()));
            }
        }
    }

    let mut pairs: BTreeMap<String, String> = proposal.assignment.pairs.clone();
    for e in edits {
        match &e.candidate {
            Some(c) => pairs.insert(e.position.clone(), c.clone()),
            None => pairs.remove(&e.position),
        };
    }
    let mut holder: BTreeMap<&str, &str> = BTreeMap::new();
    for (slot, cand) in &pairs {
        if let Some(first) = holder.insert(cand, slot) {
            return Err(Error::ConflictingEdit {
                candidate: cand.clone(),
                first: first.to_string(),
                second: slot.clone(),
            });
        }
    }

    let assignment = super::Assignment::from_pairs(pairs, &problem.slots, pool);
    let state = problem.state_of(&assignment)?;
    let breakdown = problem.breakdown(&state)?;
    Ok(AssignmentProposal {
        assignment,
        objective: breakdown.score,
        breakdown,
        search_meta: SearchMeta {
            strategy: Strategy::ExpertOverride,
            iterations: 0,
            restarts: 0,
            seed: proposal.search_meta.seed,
            edits: edits.to_vec(),
        },
    })
}
