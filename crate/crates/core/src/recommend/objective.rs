use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use super::{affinity, Assignment, RecommenderConfig};
use crate::error::{Error, Result};
use crate::profile::SocioProfile;
use crate::style::{assess_person, PersonAssessment};
use crate::team::{build_resume_table, evaluate_balance, BalanceReport, Candidate, OrgChart, Slot, BALANCE_THRESHOLD};

/// Gap units over the threshold at which the balance term reaches zero.
const BALANCE_FALLOFF: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairTerm {
    pub slot: String,
    pub candidate: String,
    pub role: String,
    /// Technical score scaled to 0..=1.
    pub technical: f64,
    pub affinity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveBreakdown {
    pub pairs: Vec<PairTerm>,
    pub technical_mean: f64,
    pub affinity_mean: f64,
    pub balance_term: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub balance: Option<BalanceReport>,
    pub w_tech: f64,
    pub w_affinity: f64,
    pub w_balance: f64,
    pub score: f64,
}

/// Everything the search needs, precomputed per (candidate, slot).
pub(crate) struct Problem<'a> {
    pub slots: Vec<Slot>,
    pub pool: &'a [Candidate],
    pub config: &'a RecommenderConfig,
    technical: Vec<Vec<f64>>,
    affinity: Vec<Vec<f64>>,
    profiles: Vec<Option<SocioProfile>>,
}

/// Candidate index per slot.
pub(crate) type State = Vec<Option<usize>>;

impl<'a> Problem<'a> {
    pub fn new(pool: &'a [Candidate], chart: &OrgChart, config: &'a RecommenderConfig) -> Result<Self> {
        let slots = chart.slots();
        let assessments: Vec<Option<PersonAssessment>> = pool
            .iter()
            .map(|c| c.profile.as_ref().map(assess_person).transpose())
            .collect::<Result<_>>()?;
        let technical = pool
            .iter()
            .map(|c| slots.iter().map(|s| c.technical_for(&s.role) / 100.0).collect())
            .collect();
        let affinity = assessments
            .iter()
            .map(|a| {
                slots
                    .iter()
                    .map(|s| a.as_ref().map_or(0.0, |a| affinity(a, &s.role, &config.affinity)))
                    .collect()
            })
            .collect();
        Ok(Problem {
            slots,
            pool,
            config,
            technical,
            affinity,
            profiles: pool.iter().map(|c| c.profile).collect(),
        })
    }

    pub fn is_scored(&self, candidate: usize) -> bool {
        self.profiles[candidate].is_some()
    }

    /// (technical mean, affinity mean, balance term, member count).
    fn terms(&self, state: &[Option<usize>]) -> (f64, f64, f64, usize) {
        let mut tech = 0.0;
        let mut aff = 0.0;
        let mut normal = [0i64; 4];
        let mut tense = [0i64; 4];
        let mut n = 0usize;
        for (slot, c) in state.iter().enumerate() {
            let Some(c) = *c else { continue };
            tech += self.technical[c][slot];
            aff += self.affinity[c][slot];
            if let Some(p) = &self.profiles[c] {
                for (s, v) in normal.iter_mut().zip(p.normal.to_array()) {
                    *s += v;
                }
                for (s, v) in tense.iter_mut().zip(p.tense.to_array()) {
                    *s += v;
                }
            }
            n += 1;
        }
        if n == 0 {
            return (0.0, 0.0, 0.0, 0);
        }
        let nf = n as f64;
        (tech / nf, aff / nf, balance_term(&normal, &tense, n as i64), n)
    }

    fn combine(&self, tech_mean: f64, aff_mean: f64, balance: f64) -> f64 {
        self.config.w_tech * tech_mean
            + self.config.w_affinity * aff_mean
            + self.config.w_balance * balance
    }

    pub fn score(&self, state: &[Option<usize>]) -> f64 {
        let (t, a, b, n) = self.terms(state);
        if n == 0 {
            return 0.0;
        }
        self.combine(t, a, b)
    }

    pub fn breakdown(&self, state: &[Option<usize>]) -> Result<ObjectiveBreakdown> {
        let (technical_mean, affinity_mean, balance_term, n) = self.terms(state);
        let mut pairs = Vec::with_capacity(n);
        let mut members = Vec::with_capacity(n);
        for (slot, c) in state.iter().enumerate() {
            let Some(c) = *c else { continue };
            let cand = &self.pool[c];
            let profile = self.profiles[c]
                .as_ref()
                .ok_or_else(|| Error::UnscoredCandidate(cand.id.clone()))?;
            members.push((cand.id.as_str(), profile));
            pairs.push(PairTerm {
                slot: self.slots[slot].id.clone(),
                candidate: cand.id.clone(),
                role: self.slots[slot].role.clone(),
                technical: self.technical[c][slot],
                affinity: self.affinity[c][slot],
            });
        }
        let balance = if members.is_empty() {
            None
        } else {
            Some(evaluate_balance(&build_resume_table(members)?))
        };
        Ok(ObjectiveBreakdown {
            pairs,
            technical_mean,
            affinity_mean,
            balance_term,
            balance,
            w_tech: self.config.w_tech,
            w_affinity: self.config.w_affinity,
            w_balance: self.config.w_balance,
            score: if n == 0 {
                0.0
            } else {
                self.combine(technical_mean, affinity_mean, balance_term)
            },
        })
    }

    /// Maps an id-based assignment onto slot indices, checking every id.
    pub fn state_of(&self, assignment: &Assignment) -> Result<State> {
        let slot_index: HashMap<&str, usize> = self
            .slots
            .iter()
            .enumerate()
            .map(|(i, s)| (s.id.as_str(), i))
            .collect();
        let cand_index: HashMap<&str, usize> = self
            .pool
            .iter()
            .enumerate()
            .map(|(i, c)| (c.id.as_str(), i))
            .collect();
        let mut state = vec![None; self.slots.len()];
        let mut placed: HashMap<usize, &str> = HashMap::new();
        for (slot, cand) in &assignment.pairs {
            let si = *slot_index
                .get(slot.as_str())
                .ok_or_else(|| Error::UnknownPosition(slot.clone()))?;
            let ci = *cand_index
                .get(cand.as_str())
                .ok_or_else(|| Error::UnknownCandidate(cand.clone()))?;
            if let Some(first) = placed.insert(ci, slot) {
                return Err(Error::ConflictingEdit {
                    candidate: cand.clone(),
                    first: first.to_string(),
                    second: slot.clone(),
                });
            }
            if !self.is_scored(ci) {
                return Err(Error::UnscoredCandidate(cand.clone()));
            }
            state[si] = Some(ci);
        }
        Ok(state)
    }

    pub fn assignment_of(&self, state: &[Option<usize>]) -> Assignment {
        let pairs = state
            .iter()
            .enumerate()
            .filter_map(|(s, c)| c.map(|c| (self.slots[s].id.clone(), self.pool[c].id.clone())))
            .collect();
        Assignment::from_pairs(pairs, &self.slots, self.pool)
    }
}

/// 1 when both quartets' column means are within the threshold, otherwise
/// decaying linearly with the larger gap.
fn balance_term(normal: &[i64; 4], tense: &[i64; 4], n: i64) -> f64 {
    let spread = |s: &[i64; 4]| s.iter().max().unwrap_or(&0) - s.iter().min().unwrap_or(&0);
    let (dn, dt) = (spread(normal), spread(tense));
    if dn <= BALANCE_THRESHOLD * n && dt <= BALANCE_THRESHOLD * n {
        return 1.0;
    }
    let gap = dn.max(dt) as f64 / n as f64;
    (1.0 - (gap - BALANCE_THRESHOLD as f64) / BALANCE_FALLOFF).max(0.0)
}

/// Scores an assignment: weighted technical mean, affinity mean and balance
/// term. An empty assignment scores 0.
pub fn objective(
    assignment: &Assignment,
    pool: &[Candidate],
    chart: &OrgChart,
    config: &RecommenderConfig,
) -> Result<ObjectiveBreakdown> {
    let problem = Problem::new(pool, chart, config)?;
    let state = problem.state_of(assignment)?;
    problem.breakdown(&state)
}
