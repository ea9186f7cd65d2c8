//! The two close-process documents: who fills which position, and how the
//! team was put together.
//!
//! Both are pure functions of the session, rendered as JSON (via
//! [`render_json`](crate::session::render_json)), text, or CSV.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::recommend::{AffinityTable, OverrideEdit};
use crate::session::AcquisitionSession;
use crate::team::{build_resume_table, evaluate_balance, BalanceReport};

pub const TOOL_VERSION: &str = concat!("teamforge ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionLine {
    pub position: String,
    pub role: String,
    pub candidate: String,
    pub name: String,
    /// e.g. "Controller / Major-Minor".
    pub style_normal: String,
    pub style_tense: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionReport {
    pub tool: String,
    pub project: String,
    pub members: Vec<CompletionLine>,
    pub unfilled: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub balance: Option<BalanceReport>,
}

/// Lists each selected person with their position, role and style, the
/// positions left open, and the team's balance.
pub fn completion_report(session: &AcquisitionSession) -> Result<CompletionReport> {
    let assignment = session
        .final_assignment
        .as_ref()
        .ok_or(Error::NoFinalAssignment)?;
    let slots = session.chart.slots();
    let mut members = Vec::new();
    let mut profiles = Vec::new();
    for slot in &slots {
        let Some(cid) = assignment.pairs.get(&slot.id) else {
            continue;
        };
        let cand = session
            .candidate(cid)
            .ok_or_else(|| Error::UnknownCandidate(cid.clone()))?;
        let a = session
            .assessments
            .get(cid)
            .ok_or_else(|| Error::UnscoredCandidate(cid.clone()))?;
        if let Some(p) = &cand.profile {
            profiles.push((cid.as_str(), p));
        }
        members.push(CompletionLine {
            position: slot.id.clone(),
            role: session
                .chart
                .role(&slot.role)
                .map(|r| r.title.clone())
                .unwrap_or_else(|| slot.role.clone()),
            candidate: cid.clone(),
            name: cand.name.clone(),
            style_normal: a.person.normal.style.summary(),
            style_tense: a.person.tense.style.summary(),
        });
    }
    let unfilled = slots
        .iter()
        .filter(|s| !assignment.pairs.contains_key(&s.id))
        .map(|s| s.id.clone())
        .collect();
    let balance = if profiles.is_empty() {
        None
    } else {
        Some(evaluate_balance(&build_resume_table(profiles.iter().map(|(id, p)| (*id, *p)))?))
    };
    Ok(CompletionReport {
        tool: TOOL_VERSION.to_string(),
        project: session.project.clone(),
        members,
        unfilled,
        balance,
    })
}

impl CompletionReport {
    pub fn to_text(&self) -> String {
        let mut out = format!("Human resource completion report: {}\n", self.project);
        for m in &self.members {
            let _ = writeln!(
                out,
                "{} ({}): {} [{}] normal {}; tense {}",
                m.position, m.role, m.name, m.candidate, m.style_normal, m.style_tense
            );
        }
        if self.unfilled.is_empty() {
            out.push_str("Unfilled positions: none\n");
        } else {
            let _ = writeln!(out, "Unfilled positions: {}", self.unfilled.join(", "));
        }
        match &self.balance {
            Some(b) => {
                let _ = writeln!(
                    out,
                    "Balance: {} (normal gap {}, tense gap {})",
                    if b.balanced { "balanced" } else { "unbalanced" },
                    b.max_column_gap_normal.to_decimal_string(2),
                    b.max_column_gap_tense.to_decimal_string(2)
                );
            }
            None => out.push_str("Balance: no members\n"),
        }
        let _ = writeln!(out, "Generated by {}", self.tool);
        out
    }

    /// One row per position; unfilled positions have empty candidate cells.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let _ = w.write_record(["position", "role", "candidate", "name", "style_normal", "style_tense"]);
        for m in &self.members {
            let _ = w.write_record([
                &m.position,
                &m.role,
                &m.candidate,
                &m.name,
                &m.style_normal,
                &m.style_tense,
            ]);
        }
        for u in &self.unfilled {
            let _ = w.write_record([u.as_str(), "", "", "", "", ""]);
        }
        String::from_utf8(w.into_inner().unwrap_or_default()).unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateLine {
    pub candidate: String,
    pub name: String,
    pub aspired_role: String,
    pub tests_applied: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProposalLine {
    /// 1-based position in the session history.
    pub index: usize,
    pub strategy: String,
    pub objective: f64,
    pub assignment: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub edits: Vec<OverrideEdit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigSnapshot {
    pub w_tech: f64,
    pub w_affinity: f64,
    pub w_balance: f64,
    pub seed: u64,
    pub restarts: u32,
    pub exhaustive_limit: u64,
    /// Affinity entries that differ from the built-in table, as
    /// `descriptor.role = value`.
    pub affinity_overrides: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcquisitionReport {
    pub tool: String,
    pub project: String,
    pub candidates_evaluated: usize,
    pub candidates: Vec<CandidateLine>,
    pub proposals: Vec<ProposalLine>,
    pub config: ConfigSnapshot,
    pub final_assignment: bool,
}

fn affinity_overrides(table: &AffinityTable) -> Vec<String> {
    let base = AffinityTable::default();
    let mut out = Vec::new();
    if table.default_value != base.default_value {
        out.push(format!("default = {}", table.default_value));
    }
    for (d, roles) in &table.entries {
        for (r, v) in roles {
            if base.get(d, r) != Some(*v) {
                out.push(format!("{d}.{r} = {v}"));
            }
        }
    }
    for (d, roles) in &base.entries {
        for r in roles.keys() {
            if table.get(d, r).is_none() {
                out.push(format!("{d}.{r} removed"));
            }
        }
    }
    out
}

/// Everything that went into the acquisition: candidates and the tests they
/// took, every proposal in order, and the search configuration.
pub fn acquisition_report(session: &AcquisitionSession) -> AcquisitionReport {
    let candidates: Vec<CandidateLine> = session
        .pool
        .iter()
        .map(|c| {
            let mut tests = Vec::new();
            if c.profile.is_some() {
                tests.push("sociological".to_string());
            }
            if c.qol.is_some() {
                tests.push("quality-of-life".to_string());
            }
            tests.extend(c.technical.keys().map(|r| format!("technical:{r}")));
            CandidateLine {
                candidate: c.id.clone(),
                name: c.name.clone(),
                aspired_role: c.aspired_role.clone(),
                tests_applied: tests,
            }
        })
        .collect();
    let proposals = session
        .proposals
        .iter()
        .enumerate()
        .map(|(i, p)| ProposalLine {
            index: i + 1,
            strategy: p.search_meta.strategy.label().to_string(),
            objective: p.objective,
            assignment: p
                .assignment
                .pairs
                .iter()
                .map(|(s, c)| (s.clone(), c.clone()))
                .collect(),
            edits: p.search_meta.edits.clone(),
        })
        .collect();
    let c = &session.config;
    AcquisitionReport {
        tool: TOOL_VERSION.to_string(),
        project: session.project.clone(),
        candidates_evaluated: candidates.iter().filter(|c| !c.tests_applied.is_empty()).count(),
        candidates,
        proposals,
        config: ConfigSnapshot {
            w_tech: c.w_tech,
            w_affinity: c.w_affinity,
            w_balance: c.w_balance,
            seed: c.seed,
            restarts: c.restarts,
            exhaustive_limit: c.exhaustive_limit,
            affinity_overrides: affinity_overrides(&c.affinity),
        },
        final_assignment: session.final_assignment.is_some(),
    }
}

fn describe_edit(e: &OverrideEdit) -> String {
    match &e.candidate {
        Some(c) => format!("assign {} -> {}", c, e.position),
        None => format!("clear {}", e.position),
    }
}

impl AcquisitionReport {
    pub fn to_text(&self) -> String {
        let mut out = format!("Acquisition report: {}\n", self.project);
        let _ = writeln!(out, "{} candidates evaluated", self.candidates_evaluated);
        for c in &self.candidates {
            let tests = if c.tests_applied.is_empty() {
                "none".to_string()
            } else {
                c.tests_applied.join(", ")
            };
            let _ = writeln!(
                out,
                "  {} [{}] aspires to {}; tests: {}",
                c.name, c.candidate, c.aspired_role, tests
            );
        }
        let _ = writeln!(out, "Proposals: {}", self.proposals.len());
        for p in &self.proposals {
            let pairs: Vec<String> = p.assignment.iter().map(|(s, c)| format!("{s}={c}")).collect();
            let _ = writeln!(
                out,
                "  #{} {} objective {:.6}: {}",
                p.index,
                p.strategy,
                p.objective,
                if pairs.is_empty() { "(empty)".to_string() } else { pairs.join(", ") }
            );
            for e in &p.edits {
                let _ = writeln!(out, "    edit: {}", describe_edit(e));
            }
        }
        let c = &self.config;
        let _ = writeln!(
            out,
            "Config: w_tech {} w_affinity {} w_balance {} seed {} restarts {} exhaustive_limit {}",
            c.w_tech, c.w_affinity, c.w_balance, c.seed, c.restarts, c.exhaustive_limit
        );
        if c.affinity_overrides.is_empty() {
            out.push_str("Affinity overrides: none\n");
        } else {
            for o in &c.affinity_overrides {
                let _ = writeln!(out, "Affinity override: {o}");
            }
        }
        let _ = writeln!(
            out,
            "Final assignment: {}",
            if self.final_assignment { "recorded" } else { "not recorded" }
        );
        let _ = writeln!(out, "Generated by {}", self.tool);
        out
    }

    /// The proposal chronology as CSV, one row per (proposal, slot).
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let _ = w.write_record(["proposal", "strategy", "objective", "position", "candidate", "edits"]);
        for p in &self.proposals {
            let edits = p.edits.iter().map(describe_edit).collect::<Vec<_>>().join("; ");
            let objective = p.objective.to_string();
            if p.assignment.is_empty() {
                let _ = w.write_record([&p.index.to_string(), &p.strategy, &objective, "", "", &edits]);
            }
            for (s, c) in &p.assignment {
                let _ = w.write_record([&p.index.to_string(), &p.strategy, &objective, s, c, &edits]);
            }
        }
        String::from_utf8(w.into_inner().unwrap_or_default()).unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::fixtures::worked_example;
    use crate::recommend::{apply_override, recommend, Assignment};
    use crate::session::parse_request_list;
    use crate::team::{OrgChart, Position, Role};
    use std::collections::BTreeMap;

    fn session(with_dev: bool) -> AcquisitionSession {
        let mut positions = vec![Position {
            id: "lead".into(),
            role: "team_lead".into(),
            parent: None,
            headcount: 1,
        }];
        if with_dev {
            positions.push(Position {
                id: "dev".into(),
                role: "developer".into(),
                parent: Some("lead".into()),
                headcount: 1,
            });
        }
        let chart = OrgChart {
            roles: vec![
                Role { id: "team_lead".into(), title: "Team lead".into() },
                Role { id: "developer".into(), title: "Developer".into() },
            ],
            positions,
        };
        let mut s = AcquisitionSession::new("Project 5", chart);
        s.set_pool(parse_request_list("name,contact,aspired_role\nAna,a@x,team_lead\n").unwrap())
            .unwrap();
        s.score_candidate("c1", &worked_example(), None).unwrap();
        s
    }

    #[test]
    fn test_no_final() {
        assert!(matches!(completion_report(&session(false)), Err(Error::NoFinalAssignment)));
    }

    #[test]
    fn test_one_person_report() {
        let mut s = session(false);
        s.set_final(Assignment {
            pairs: BTreeMap::from([("lead".into(), "c1".into())]),
            ..Default::default()
        })
        .unwrap();
        let r = completion_report(&s).unwrap();
        assert_eq!(r.members.len(), 1);
        assert_eq!(r.members[0].style_normal, "Controller / Major-Minor");
        // a lone member with a 12-unit spread is not a balanced team
        let b = r.balance.as_ref().unwrap();
        assert!(!b.balanced);
        assert_eq!(b.max_column_gap_normal, 12.into());
        let text = r.to_text();
        assert_eq!(text.lines().filter(|l| l.starts_with("lead ")).count(), 1);
        assert!(text.contains("Unfilled positions: none"));
    }

    #[test]
    fn test_unfilled_listed() {
        let mut s = session(true);
        s.set_final(Assignment {
            pairs: BTreeMap::from([("lead".into(), "c1".into())]),
            ..Default::default()
        })
        .unwrap();
        let r = completion_report(&s).unwrap();
        assert_eq!(r.unfilled, vec!["dev".to_string()]);
        assert!(r.to_text().contains("Unfilled positions: dev"));
        assert!(r.to_csv().contains("\ndev,,,,,\n"));
    }

    #[test]
    fn test_acquisition_chronology() {
        let mut s = session(true);
        let p = recommend(&s.pool, &s.chart, &s.config).unwrap();
        let edited = apply_override(&p, &[OverrideEdit::clear("lead"), OverrideEdit::assign("dev", "c1")], &s.pool, &s.chart, &s.config).unwrap();
        s.push_proposal(p);
        s.push_proposal(edited);
        let r = acquisition_report(&s);
        assert_eq!(r.proposals.len(), 2);
        assert_eq!(r.proposals[0].strategy, "exhaustive");
        assert_eq!(r.proposals[1].strategy, "expert-override");
        let text = r.to_text();
        assert!(text.contains("edit: clear lead"));
        assert!(text.contains("edit: assign c1 -> dev"));
        assert!(text.find("#1 exhaustive").unwrap() < text.find("#2 expert-override").unwrap());
        assert_eq!(r.to_text(), acquisition_report(&s.clone()).to_text());
    }

    #[test]
    fn test_empty_pool() {
        let s = AcquisitionSession::new("Empty", OrgChart::default());
        let r = acquisition_report(&s);
        assert_eq!(r.candidates_evaluated, 0);
        assert!(r.to_text().contains("0 candidates evaluated"));
    }

    #[test]
    fn test_affinity_override_listed() {
        let mut s = AcquisitionSession::new("P", OrgChart::default());
        s.config.affinity.set("Controller", "tester", 0.9);
        let r = acquisition_report(&s);
        assert_eq!(r.config.affinity_overrides, vec!["Controller.tester = 0.9".to_string()]);
    }
}
