//! Generators and independent reference implementations shared by the
//! integration tests. Nothing here calls the code under test to compute an
//! expected value.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

use teamforge_core::profile::{score_sociological, QolResponses, SocioProfile, SocioResponses};
use teamforge_core::recommend::{affinity, apply_override, recommend, Assignment, OverrideEdit, RecommenderConfig};
use teamforge_core::session::AcquisitionSession;
use teamforge_core::Error;
use teamforge_core::style::assess_person;
use teamforge_core::team::{Candidate, OrgChart, Position, Role};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn worked_example() -> SocioResponses {
    let q1 = [[2, 3, 4, 1], [2, 4, 1, 3], [2, 4, 3, 1]];
    let q2 = [[1, 4, 2, 3], [2, 4, 1, 3], [2, 4, 3, 1]];
    SocioResponses::new(
        q1.iter().chain(q1.iter()).copied().collect(),
        q2.iter().chain(q2.iter()).copied().collect(),
    )
    .unwrap()
}

pub fn random_group(rng: &mut ChaCha8Rng) -> [u8; 4] {
    let mut g = [1u8, 2, 3, 4];
    g.shuffle(rng);
    g
}

pub fn random_raw_responses(rng: &mut ChaCha8Rng) -> (Vec<[u8; 4]>, Vec<[u8; 4]>) {
    let q1 = (0..6).map(|_| random_group(rng)).collect();
    let q2 = (0..6).map(|_| random_group(rng)).collect();
    (q1, q2)
}

pub fn random_responses(rng: &mut ChaCha8Rng) -> SocioResponses {
    let (q1, q2) = random_raw_responses(rng);
    SocioResponses::new(q1, q2).unwrap()
}

pub fn random_qol(rng: &mut ChaCha8Rng) -> QolResponses {
    let mut a = [0u8; 11];
    for v in &mut a {
        *v = rng.random_range(1..=7);
    }
    QolResponses::new(a).unwrap()
}

pub fn random_profile(rng: &mut ChaCha8Rng) -> SocioProfile {
    score_sociological(&random_responses(rng))
}

pub const ROLE_IDS: [&str; 8] = [
    "project_manager",
    "team_lead",
    "architect",
    "designer",
    "analyst",
    "developer",
    "tester",
    "hr_manager",
];

/// A chart with one root and `n` further positions, all headcount 1, roles
/// drawn at random.
pub fn random_chart(rng: &mut ChaCha8Rng, positions: usize) -> OrgChart {
    let roles = ROLE_IDS
        .iter()
        .map(|r| Role {
            id: r.to_string(),
            title: r.replace('_', " "),
        })
        .collect();
    let positions = (0..positions)
        .map(|i| Position {
            id: format!("p{i}"),
            role: ROLE_IDS[rng.random_range(0..ROLE_IDS.len())].to_string(),
            parent: if i == 0 { None } else { Some("p0".into()) },
            headcount: 1,
        })
        .collect();
    OrgChart { roles, positions }
}

pub fn random_pool(rng: &mut ChaCha8Rng, n: usize) -> Vec<Candidate> {
    (0..n)
        .map(|i| {
            let mut technical = BTreeMap::new();
            for r in ROLE_IDS {
                if rng.random_bool(0.7) {
                    technical.insert(r.to_string(), f64::from(rng.random_range(0..=100u8)));
                }
            }
            Candidate {
                id: format!("k{i}"),
                name: format!("Person {i}"),
                contact: format!("p{i}@example.org"),
                aspired_role: ROLE_IDS[rng.random_range(0..ROLE_IDS.len())].to_string(),
                profile: Some(random_profile(rng)),
                qol: None,
                technical,
            }
        })
        .collect()
}

/// Every complete injective assignment: min(slots, candidates) slots filled,
/// each candidate used at most once.
pub fn all_complete_assignments(slots: &[String], candidates: &[String]) -> Vec<BTreeMap<String, String>> {
    let want = slots.len().min(candidates.len());
    let mut out = Vec::new();
    let mut current: Vec<Option<usize>> = vec![None; slots.len()];
    fn go(
        i: usize,
        slots: &[String],
        candidates: &[String],
        want: usize,
        current: &mut Vec<Option<usize>>,
        out: &mut Vec<BTreeMap<String, String>>,
    ) {
        if i == slots.len() {
            if current.iter().flatten().count() == want {
                out.push(
                    current
                        .iter()
                        .enumerate()
                        .filter_map(|(s, c)| c.map(|c| (slots[s].clone(), candidates[c].clone())))
                        .collect(),
                );
            }
            return;
        }
        current[i] = None;
        go(i + 1, slots, candidates, want, current, out);
        for c in 0..candidates.len() {
            if current[..i].contains(&Some(c)) {
                continue;
            }
            current[i] = Some(c);
            go(i + 1, slots, candidates, want, current, out);
            current[i] = None;
        }
    }
    go(0, slots, candidates, want, &mut current, &mut out);
    out
}

pub fn assignment(pairs: BTreeMap<String, String>) -> Assignment {
    Assignment {
        pairs,
        ..Default::default()
    }
}

/// The objective written out longhand: weighted mean technical score (0..1),
/// mean affinity, and a balance term computed from exact column sums.
pub fn hand_objective(
    pairs: &BTreeMap<String, String>,
    pool: &[Candidate],
    chart: &OrgChart,
    config: &RecommenderConfig,
) -> f64 {
    if pairs.is_empty() {
        return 0.0;
    }
    let mut tech = Vec::new();
    let mut aff = Vec::new();
    let mut sums = [[0i64; 4]; 2];
    for (slot, cid) in pairs {
        let role = &chart.positions.iter().find(|p| &p.id == slot).unwrap().role;
        let c = pool.iter().find(|c| &c.id == cid).unwrap();
        let p = c.profile.unwrap();
        tech.push(c.technical.get(role).copied().unwrap_or(0.0) / 100.0);
        aff.push(affinity(&assess_person(&p).unwrap(), role, &config.affinity));
        for (k, q) in [p.normal, p.tense].iter().enumerate() {
            let a = [q.collaborator, q.controller, q.analyzer, q.promoter];
            for t in 0..4 {
                sums[k][t] += a[t];
            }
        }
    }
    let n = pairs.len() as f64;
    let mean = |v: &[f64]| v.iter().sum::<f64>() / n;
    // gap between column means = (max sum - min sum) / n
    let gap = sums
        .iter()
        .map(|s| (s.iter().max().unwrap() - s.iter().min().unwrap()) as f64 / n)
        .fold(0.0, f64::max);
    let balance = if gap <= 2.0 { 1.0 } else { (1.0 - (gap - 2.0) / 10.0).max(0.0) };
    config.w_tech * mean(&tech) + config.w_affinity * mean(&aff) + config.w_balance * balance
}

/// Mid-ranks of |d| for the non-zero differences, doubled so they are
/// integers. Quadratic and obviously correct.
pub fn oracle_doubled_ranks(diffs: &[f64]) -> Vec<(u64, bool)> {
    let nz: Vec<f64> = diffs.iter().copied().filter(|d| *d != 0.0).collect();
    nz.iter()
        .map(|d| {
            let below = nz.iter().filter(|e| e.abs() < d.abs()).count() as u64;
            let equal = nz.iter().filter(|e| e.abs() == d.abs()).count() as u64;
            // ranks below+1 ..= below+equal, mean doubled
            (2 * below + equal + 1, *d > 0.0)
        })
        .collect()
}

/// Two-sided p by walking all 2^n sign patterns.
pub fn oracle_wilcoxon_p(diffs: &[f64]) -> f64 {
    let ranks = oracle_doubled_ranks(diffs);
    let n = ranks.len();
    if n == 0 {
        return 1.0;
    }
    let total: i64 = ranks.iter().map(|r| r.0 as i64).sum();
    let observed: i64 = ranks.iter().filter(|r| r.1).map(|r| r.0 as i64).sum();
    let dev = (2 * observed - total).abs();
    let mut extreme = 0u64;
    for mask in 0u64..(1 << n) {
        let w: i64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i].0 as i64).sum();
        if (2 * w - total).abs() >= dev {
            extreme += 1;
        }
    }
    extreme as f64 / (1u64 << n) as f64
}

/// A session that has been through scoring, a recommendation, an expert
/// edit and acceptance.
pub fn random_session(seed: u64) -> AcquisitionSession {
    let mut r = rng(seed);
    let chart = random_chart(&mut r, 3);
    let mut pool = random_pool(&mut r, 4);
    for c in &mut pool {
        c.profile = None;
        c.aspired_role = chart.positions[0].role.clone();
    }
    let mut s = AcquisitionSession::new(format!("Project {seed}"), chart);
    s.config.seed = seed;
    s.set_pool(pool).unwrap();
    for id in ["k0", "k1", "k2", "k3"] {
        let socio = random_responses(&mut r);
        let qol = random_qol(&mut r);
        s.score_candidate(id, &socio, Some(&qol)).unwrap();
    }
    let p = recommend(&s.pool, &s.chart, &s.config).unwrap();
    let benched = p.assignment.bench[0].clone();
    let edited = apply_override(&p, &[OverrideEdit::assign("p0", &benched)], &s.pool, &s.chart, &s.config);
    s.push_proposal(p.clone());
    let last = match edited {
        Ok(e) => e,
        Err(Error::ConflictingEdit { .. }) => p,
        Err(e) => panic!("{e}"),
    };
    s.set_final(last.assignment.clone()).unwrap();
    s.push_proposal(last);
    s
}

