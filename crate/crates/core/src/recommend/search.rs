use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::objective::{Problem, State};
use super::{AssignmentProposal, RecommenderConfig, SearchMeta, Strategy};
use crate::error::{Error, Result};
use crate::team::{validate_org_chart, validate_pool, Candidate, OrgChart};

/// Number of complete injective assignments of `candidates` into `slots`,
/// saturating at `u64::MAX`.
fn assignment_count(candidates: usize, slots: usize) -> u64 {
    let (big, small) = if candidates >= slots {
        (candidates, slots)
    } else {
        (slots, candidates)
    };
    (0..small).fold(1u64, |acc, i| acc.saturating_mul((big - i) as u64))
}

/// Proposes a candidate for every slot it can fill.
///
/// Small instances are solved exactly by enumerating every complete
/// assignment; larger ones by seeded steepest-ascent hill climbing with
/// random restarts. The result is deterministic for a given seed.
pub fn recommend(
    pool: &[Candidate],
    chart: &OrgChart,
    config: &RecommenderConfig,
) -> Result<AssignmentProposal> {
    config.validate()?;
    validate_org_chart(chart).map_err(Error::InfeasibleChart)?;
    validate_pool(pool, chart).map_err(Error::Validation)?;
    if let Some(c) = pool.iter().find(|c| c.profile.is_none()) {
        return Err(Error::UnscoredCandidate(c.id.clone()));
    }

    let problem = Problem::new(pool, chart, config)?;
    let count = assignment_count(pool.len(), problem.slots.len());
    let (state, strategy, iterations) = if count <= config.exhaustive_limit {
        let (state, visited) = exhaustive(&problem);
        (state, Strategy::Exhaustive, visited)
    } else {
        let (state, moves) = hill_climb(&problem);
        (state, Strategy::HillClimb, moves)
    };

    let breakdown = problem.breakdown(&state)?;
    Ok(AssignmentProposal {
        assignment: problem.assignment_of(&state),
        objective: breakdown.score,
        breakdown,
        search_meta: SearchMeta {
            strategy,
            iterations,
            restarts: if strategy == Strategy::HillClimb {
                config.restarts.max(1)
            } else {
                0
            },
            seed: config.seed,
            edits: Vec::new(),
        },
    })
}

/// Visits every complete assignment in lexicographic order (empty before
/// candidate 0 before candidate 1, slot by slot) and keeps the first best.
fn exhaustive(problem: &Problem<'_>) -> (State, u64) {
    let n_slots = problem.slots.len();
    let n_cand = problem.pool.len();
    let empties = n_slots.saturating_sub(n_cand);

    struct Walk<'p, 'a> {
        problem: &'p Problem<'a>,
        state: State,
        used: Vec<bool>,
        empties_left: usize,
        best: Option<(f64, State)>,
        visited: u64,
    }

    impl Walk<'_, '_> {
        fn go(&mut self, slot: usize) {
            if slot == self.state.len() {
                self.visited += 1;
                let s = self.problem.score(&self.state);
                if self.best.as_ref().is_none_or(|(b, _)| s > *b) {
                    self.best = Some((s, self.state.clone()));
                }
                return;
            }
            if self.empties_left > 0 {
                self.empties_left -= 1;
                self.state[slot] = None;
                self.go(slot + 1);
                self.empties_left += 1;
            }
            for c in 0..self.used.len() {
                if self.used[c] {
                    continue;
                }
                self.used[c] = true;
                self.state[slot] = Some(c);
                self.go(slot + 1);
                self.state[slot] = None;
                self.used[c] = false;
            }
        }
    }

    let mut walk = Walk {
        problem,
        state: vec![None; n_slots],
        used: vec![false; n_cand],
        empties_left: empties,
        best: None,
        visited: 0,
    };
    walk.go(0);
    let best = walk.best.map(|(_, s)| s).unwrap_or_default();
    (best, walk.visited)
}

fn random_start(problem: &Problem<'_>, rng: &mut ChaCha8Rng) -> State {
    let n_slots = problem.slots.len();
    let mut cands: Vec<usize> = (0..problem.pool.len()).collect();
    cands.shuffle(rng);
    let mut slots: Vec<usize> = (0..n_slots).collect();
    slots.shuffle(rng);
    let mut state = vec![None; n_slots];
    for (s, c) in slots.into_iter().zip(cands) {
        state[s] = Some(c);
    }
    state
}

/// Steepest ascent from `start` over swap and replace-from-bench moves.
/// Returns the local optimum and the number of improving moves taken.
pub(crate) fn climb(problem: &Problem<'_>, start: State, max_iterations: u32) -> (State, f64, u64) {
    let n_slots = start.len();
    let mut state = start;
    let mut score = problem.score(&state);
    let mut moves = 0u64;
    let mut bench: Vec<usize> = Vec::new();
    while moves < u64::from(max_iterations) {
        bench.clear();
        let mut used = vec![false; problem.pool.len()];
        for c in state.iter().flatten() {
            used[*c] = true;
        }
        bench.extend((0..used.len()).filter(|c| !used[*c]));

        let mut best: Option<(f64, State)> = None;
        let consider =|candidate: State, best: &mut Option<(f64, State)>| {
            let s = problem.score(&candidate);
            if s > score && best.as_ref().is_none_or(|(b, _)| s > *b) {
                *best = Some((s, candidate));
            }
        };
        for i in 0..n_slots {
            for j in i + 1..n_slots {
                if state[i] == state[j] {
                    continue;
                }
                let mut next = state.clone();
                next.swap(i, j);
                consider(next, &mut best);
            }
            for &b in &bench {
                let mut next = state.clone();
                next[i] = Some(b);
                consider(next, &mut best);
            }
        }
        match best {
            Some((s, next)) => {
                state = next;
                score = s;
                moves += 1;
            }
            None => break,
        }
    }
    (state, score, moves)
}

fn hill_climb(problem: &Problem<'_>) -> (State, u64) {
    let config = problem.config;
    let restarts = config.restarts.max(1);
    let runs: Vec<(State, f64, u64)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(u64::from(r));
            let start = random_start(problem, &mut rng);
            climb(problem, start, config.max_iterations)
        })
        .collect();
    let total_moves = runs.iter().map(|r| r.2).sum();
    let best = runs
        .into_iter()
        .reduce(|a, b| {
            if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
                b
            } else {
                a
            }
        })
        .map(|r| r.0)
        .unwrap_or_default();
    (best, total_moves)
}

/// Runs one steepest-ascent climb from a given assignment and reports the
/// resulting proposal. The result never scores below the start.
pub fn hill_climb_from(
    start: &super::Assignment,
    pool: &[Candidate],
    chart: &OrgChart,
    config: &RecommenderConfig,
) -> Result<AssignmentProposal> {
    config.validate()?;
    let problem = Problem::new(pool, chart, config)?;
    let state = problem.state_of(start)?;
    let (state, _, moves) = climb(&problem, state, config.max_iterations);
    let breakdown = problem.breakdown(&state)?;
    Ok(AssignmentProposal {
        assignment: problem.assignment_of(&state),
        objective: breakdown.score,
        breakdown,
        search_meta: SearchMeta {
            strategy: Strategy::HillClimb,
            iterations: moves,
            restarts: 1,
            seed: config.seed,
            edits: Vec::new(),
        },
    })
}
