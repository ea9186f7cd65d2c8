//! Roles, the organization chart, candidates, and team balance.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result, Violation};
use crate::fraction::Fraction;
use crate::profile::{QolScore, Quartet, SocioProfile};
use crate::style::Trait;

/// Column means may differ by at most this much before a team counts as
/// unbalanced.
pub const BALANCE_THRESHOLD: i64 = 2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Role {
    pub id: String,
    pub title: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Position {
    pub id: String,
    pub role: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
    #[serde(default = "one")]
    pub headcount: u32,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrgChart {
    pub roles: Vec<Role>,
    pub positions: Vec<Position>,
}

/// One seat to fill. Positions with headcount > 1 become several slots named
/// `<position>#1`, `<position>#2`, ...
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slot {
    pub id: String,
    pub position: String,
    pub role: String,
}

impl OrgChart {
    pub fn role(&self, id: &str) -> Option<&Role> {
        self.roles.iter().find(|r| r.id == id)
    }

    pub fn position(&self, id: &str) -> Option<&Position> {
        self.positions.iter().find(|p| p.id == id)
    }

    pub fn slots(&self) -> Vec<Slot> {
        let mut out = Vec::new();
        for p in &self.positions {
            if p.headcount == 1 {
                out.push(Slot {
                    id: p.id.clone(),
                    position: p.id.clone(),
                    role: p.role.clone(),
                });
            } else {
                for k in 1..=p.headcount {
                    out.push(Slot {
                        id: format!("{}#{k}", p.id),
                        position: p.id.clone(),
                        role: p.role.clone(),
                    });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub id: String,
    pub name: String,
    #[serde(default)]
    pub contact: String,
    pub aspired_role: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<SocioProfile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qol: Option<QolScore>,
    /// Externally supplied technical test results per role id, 0..=100.
    #[serde(default)]
    pub technical: BTreeMap<String, f64>,
}

impl Candidate {
    pub fn technical_for(&self, role: &str) -> f64 {
        self.technical.get(role).copied().unwrap_or(0.0)
    }
}

pub fn validate_org_chart(chart: &OrgChart) -> std::result::Result<(), Vec<Violation>> {
    let mut violations = Vec::new();

    let mut role_ids = BTreeSet::new();
    for r in &chart.roles {
        if !role_ids.insert(r.id.as_str()) {
            violations.push(Violation::DuplicateId { id: r.id.clone() });
        }
    }
    let mut by_id: HashMap<&str, &Position> = HashMap::new();
    for p in &chart.positions {
        if by_id.insert(p.id.as_str(), p).is_some() {
            violations.push(Violation::DuplicateId { id: p.id.clone() });
        }
    }

    let mut roots = Vec::new();
    for p in &chart.positions {
        if !role_ids.contains(p.role.as_str()) {
            violations.push(Violation::UnknownRole {
                position: p.id.clone(),
                role: p.role.clone(),
            });
        }
        if p.headcount == 0 {
            violations.push(Violation::ZeroHeadcount {
                position: p.id.clone(),
            });
        }
        match &p.parent {
            None => roots.push(p.id.clone()),
            Some(parent) if !by_id.contains_key(parent.as_str()) => {
                violations.push(Violation::UnknownParent {
                    position: p.id.clone(),
                    parent: parent.clone(),
                })
            }
            Some(_) => {}
        }
    }

    // A position is on a cycle if walking its parent links brings us back to it.
    for p in &chart.positions {
        let mut current = p.parent.as_deref();
        let mut steps = 0;
        while let Some(id) = current {
            if id == p.id {
                violations.push(Violation::CycleDetected {
                    position: p.id.clone(),
                });
                break;
            }
            steps += 1;
            if steps > chart.positions.len() {
                break;
            }
            current = by_id.get(id).and_then(|q| q.parent.as_deref());
        }
    }

    if !chart.positions.is_empty() {
        match roots.len() {
            0 => violations.push(Violation::NoRoot),
            1 => {}
            _ => violations.push(Violation::MultipleRoots { roots }),
        }
    }

    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// Checks a candidate pool against a chart: unique ids, resolvable aspired
/// roles, technical scores in range, and well-formed profiles.
pub fn validate_pool(
    pool: &[Candidate],
    chart: &OrgChart,
) -> std::result::Result<(), Vec<Violation>> {
    let mut violations = Vec::new();
    let mut seen = BTreeSet::new();
    for c in pool {
        if !seen.insert(c.id.as_str()) {
            violations.push(Violation::DuplicateId { id: c.id.clone() });
        }
        if chart.role(&c.aspired_role).is_none() {
            violations.push(Violation::UnknownAspiredRole {
                candidate: c.id.clone(),
                role: c.aspired_role.clone(),
            });
        }
        for (role, &score) in &c.technical {
            if !score.is_finite() || !(0.0..=100.0).contains(&score) {
                violations.push(Violation::TechnicalScoreOutOfRange {
                    candidate: c.id.clone(),
                    role: role.clone(),
                    score,
                });
            }
        }
        if let Some(p) = &c.profile {
            if let Err(e) = p.validate() {
                violations.push(Violation::Malformed {
                    path: format!("candidate {}.profile", c.id),
                    reason: e.to_string(),
                });
            }
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// Exact per-trait means.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuartetMean {
    #[serde(rename = "Z")]
    pub collaborator: Fraction,
    #[serde(rename = "X")]
    pub controller: Fraction,
    #[serde(rename = "W")]
    pub analyzer: Fraction,
    #[serde(rename = "Y")]
    pub promoter: Fraction,
}

impl QuartetMean {
    fn of<'a>(quartets: impl Iterator<Item = &'a Quartet>) -> Option<Self> {
        let mut sums = [0i64; 4];
        let mut n = 0i64;
        for q in quartets {
            for (s, v) in sums.iter_mut().zip(q.to_array()) {
                *s += v;
            }
            n += 1;
        }
        if n == 0 {
            return None;
        }
        let m = sums.map(|s| Fraction::new(s, n));
        Some(QuartetMean {
            collaborator: m[0],
            controller: m[1],
            analyzer: m[2],
            promoter: m[3],
        })
    }

    pub fn to_array(&self) -> [Fraction; 4] {
        [self.collaborator, self.controller, self.analyzer, self.promoter]
    }

    pub fn get(&self, t: Trait) -> Fraction {
        self.to_array()[t as usize]
    }

    /// Largest difference between any two columns.
    pub fn max_gap(&self) -> Fraction {
        let a = self.to_array();
        let max = a.iter().max().copied().unwrap_or_default();
        let min = a.iter().min().copied().unwrap_or_default();
        max - min
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResumeRow {
    pub member: String,
    pub normal: Quartet,
    pub tense: Quartet,
}

/// Every member's eight trait scores plus a summary row of column means.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResumeTable {
    pub rows: Vec<ResumeRow>,
    pub summary_normal: QuartetMean,
    pub summary_tense: QuartetMean,
}

impl ResumeTable {
    /// CSV with header `member,Z,X,W,Y,z,x,w,y` and a final `summary` row of
    /// means rounded to two decimals.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let _ = w.write_record(["member", "Z", "X", "W", "Y", "z", "x", "w", "y"]);
        for r in &self.rows {
            let mut rec = vec![r.member.clone()];
            rec.extend(r.normal.to_array().iter().map(i64::to_string));
            rec.extend(r.tense.to_array().iter().map(i64::to_string));
            let _ = w.write_record(&rec);
        }
        let mut rec = vec!["summary".to_string()];
        rec.extend(self.summary_normal.to_array().iter().map(|f| f.to_decimal_string(2)));
        rec.extend(self.summary_tense.to_array().iter().map(|f| f.to_decimal_string(2)));
        let _ = w.write_record(&rec);
        let bytes = w.into_inner().unwrap_or_default();
        String::from_utf8(bytes).unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalanceReport {
    pub normal_balanced: bool,
    pub tense_balanced: bool,
    pub balanced: bool,
    pub max_column_gap_normal: Fraction,
    pub max_column_gap_tense: Fraction,
}

impl BalanceReport {
    pub fn max_gap(&self) -> Fraction {
        self.max_column_gap_normal.max(self.max_column_gap_tense)
    }
}

pub fn build_resume_table<'a, I>(members: I) -> Result<ResumeTable>
where
    I: IntoIterator<Item = (&'a str, &'a SocioProfile)>,
{
    let rows: Vec<ResumeRow> = members
        .into_iter()
        .map(|(id, p)| ResumeRow {
            member: id.to_string(),
            normal: p.normal,
            tense: p.tense,
        })
        .collect();
    let summary_normal = QuartetMean::of(rows.iter().map(|r| &r.normal)).ok_or(Error::EmptyTeam)?;
    let summary_tense = QuartetMean::of(rows.iter().map(|r| &r.tense)).ok_or(Error::EmptyTeam)?;
    Ok(ResumeTable {
        rows,
        summary_normal,
        summary_tense,
    })
}

/// A quartet is balanced when no two column means differ by more than two
/// units; the team is balanced when both quartets are.
pub fn evaluate_balance(resume: &ResumeTable) -> BalanceReport {
    let threshold = Fraction::from_integer(BALANCE_THRESHOLD);
    let gap_normal = resume.summary_normal.max_gap();
    let gap_tense = resume.summary_tense.max_gap();
    let normal_balanced = gap_normal <= threshold;
    let tense_balanced = gap_tense <= threshold;
    BalanceReport {
        normal_balanced,
        tense_balanced,
        balanced: normal_balanced && tense_balanced,
        max_column_gap_normal: gap_normal,
        max_column_gap_tense: gap_tense,
    }
}
