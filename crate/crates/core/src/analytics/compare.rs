use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use super::productivity::{productivity_table_csv, productivity_table_text, ProjectMetrics};
use super::wilcoxon::{wilcoxon_signed_rank, PairedObservation, WilcoxonResult};
use crate::error::{Error, Result};
use crate::fraction::Fraction;
use crate::recommend::roles;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub project: String,
    pub before: ProjectMetrics,
    pub after: ProjectMetrics,
    /// after - before productivity.
    pub delta: Fraction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
    pub wilcoxon: WilcoxonResult,
}

impl ComparisonReport {
    fn table_rows(&self) -> Vec<ProjectMetrics> {
        self.rows
            .iter()
            .flat_map(|r| [r.before.clone(), r.after.clone()])
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = productivity_table_text(&self.table_rows());
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{}: {} -> {} (delta {})",
                r.project,
                r.before.productivity.to_decimal_string(2),
                r.after.productivity.to_decimal_string(2),
                signed(r.delta)
            );
        }
        let w = &self.wilcoxon;
        let _ = writeln!(
            out,
            "Wilcoxon signed-rank: n = {}, W+ = {}, W- = {}, p = {:.6} ({:?})",
            w.n_effective, w.w_plus, w.w_minus, w.p_value, w.method
        );
        out
    }

    pub fn to_csv(&self) -> String {
        productivity_table_csv(&self.table_rows())
    }
}

fn signed(f: Fraction) -> String {
    let s = f.to_decimal_string(2);
    if f.is_positive() {
        format!("+{s}")
    } else {
        s
    }
}

/// Pairs projects by id across two snapshots, reports per-project
/// productivity deltas and a signed-rank test over the productivity pairs.
pub fn compare_snapshots(
    before: &[ProjectMetrics],
    after: &[ProjectMetrics],
    alpha: Option<f64>,
) -> Result<ComparisonReport> {
    let before_ids: BTreeSet<&str> = before.iter().map(|m| m.project.as_str()).collect();
    let after_ids: BTreeSet<&str> = after.iter().map(|m| m.project.as_str()).collect();
    let unmatched: Vec<String> = before_ids
        .symmetric_difference(&after_ids)
        .map(|s| s.to_string())
        .collect();
    if !unmatched.is_empty() {
        return Err(Error::UnmatchedUnits(unmatched));
    }
    let mut rows = Vec::new();
    for b in before {
        let a = after
            .iter()
            .find(|a| a.project == b.project)
            .ok_or_else(|| Error::UnmatchedUnits(vec![b.project.clone()]))?;
        rows.push(ComparisonRow {
            project: b.project.clone(),
            before: b.clone(),
            after: a.clone(),
            delta: a.productivity - b.productivity,
        });
    }
    let pairs: Vec<PairedObservation> = rows
        .iter()
        .map(|r| PairedObservation::new(&r.project, r.before.productivity.to_f64(), r.after.productivity.to_f64()))
        .collect();
    let wilcoxon = wilcoxon_signed_rank(&pairs, alpha)?;
    Ok(ComparisonReport { rows, wilcoxon })
}

/// Splits a project list into (before, after) by snapshot label: the
/// earliest label seen for each project is "before", the next one "after".
pub fn split_snapshots(rows: &[ProjectMetrics]) -> Result<(Vec<ProjectMetrics>, Vec<ProjectMetrics>)> {
    let mut by_project: BTreeMap<&str, Vec<&ProjectMetrics>> = BTreeMap::new();
    let mut order = Vec::new();
    for r in rows {
        let e = by_project.entry(r.project.as_str()).or_default();
        if e.is_empty() {
            order.push(r.project.as_str());
        }
        e.push(r);
    }
    let mut before = Vec::new();
    let mut after = Vec::new();
    let mut unmatched = Vec::new();
    for p in order {
        match by_project[p].as_slice() {
            [b, a] => {
                before.push((*b).clone());
                after.push((*a).clone());
            }
            _ => unmatched.push(p.to_string()),
        }
    }
    if !unmatched.is_empty() {
        return Err(Error::UnmatchedUnits(unmatched));
    }
    Ok((before, after))
}

/// Categorical variables observed per team member in the field study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentVariable {
    ActivityLevel,
    ExpectedRoleNormal,
    CurrentRoleNormal,
    ExpectedRoleTense,
    CurrentRoleTense,
    State,
    ProjectBalance,
    Orientation,
}

impl ExperimentVariable {
    pub const ALL: [ExperimentVariable; 8] = [
        ExperimentVariable::ActivityLevel,
        ExperimentVariable::ExpectedRoleNormal,
        ExperimentVariable::CurrentRoleNormal,
        ExperimentVariable::ExpectedRoleTense,
        ExperimentVariable::CurrentRoleTense,
        ExperimentVariable::State,
        ExperimentVariable::ProjectBalance,
        ExperimentVariable::Orientation,
    ];

    pub fn key(self) -> &'static str {
        match self {
            ExperimentVariable::ActivityLevel => "activity_level",
            ExperimentVariable::ExpectedRoleNormal => "expected_role_normal",
            ExperimentVariable::CurrentRoleNormal => "current_role_normal",
            ExperimentVariable::ExpectedRoleTense => "expected_role_tense",
            ExperimentVariable::CurrentRoleTense => "current_role_tense",
            ExperimentVariable::State => "state",
            ExperimentVariable::ProjectBalance => "project_balance",
            ExperimentVariable::Orientation => "orientation",
        }
    }

    pub fn from_key(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.key() == s)
    }
}

/// Ordinal code per (variable, level). Levels are matched case-insensitively.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrdinalEncoding {
    pub levels: BTreeMap<String, BTreeMap<String, i64>>,
}

impl Default for OrdinalEncoding {
    fn default() -> Self {
        let mut levels: BTreeMap<String, BTreeMap<String, i64>> = BTreeMap::new();
        let mut put = |v: ExperimentVariable, pairs: &[(&str, i64)]| {
            levels.insert(
                v.key().to_string(),
                pairs.iter().map(|(k, c)| (k.to_string(), *c)).collect(),
            );
        };
        put(ExperimentVariable::ActivityLevel, &[("passive", 0), ("active", 1)]);
        put(ExperimentVariable::State, &[("normal", 0), ("tense", 1)]);
        put(ExperimentVariable::ProjectBalance, &[("no", 0), ("yes", 1)]);
        put(
            ExperimentVariable::Orientation,
            &[("people-oriented", 0), ("task-oriented", 1)],
        );
        let role_order = [
            roles::PROJECT_MANAGER,
            roles::TEAM_LEAD,
            roles::ARCHITECT,
            roles::DESIGNER,
            roles::ANALYST,
            roles::DEVELOPER,
            roles::TESTER,
            roles::HR_MANAGER,
        ];
        let role_codes: Vec<(&str, i64)> = role_order
            .iter()
            .enumerate()
            .map(|(i, r)| (*r, i as i64 + 1))
            .collect();
        for v in [
            ExperimentVariable::ExpectedRoleNormal,
            ExperimentVariable::CurrentRoleNormal,
            ExperimentVariable::ExpectedRoleTense,
            ExperimentVariable::CurrentRoleTense,
        ] {
            put(v, &role_codes);
        }
        OrdinalEncoding { levels }
    }
}

impl OrdinalEncoding {
    pub fn code(&self, variable: ExperimentVariable, level: &str) -> Result<i64> {
        self.levels
            .get(variable.key())
            .and_then(|m| {
                m.iter()
                    .find(|(k, _)| k.eq_ignore_ascii_case(level.trim()))
                    .map(|(_, c)| *c)
            })
            .ok_or_else(|| Error::UnknownLevel {
                variable: variable.key().to_string(),
                level: level.to_string(),
            })
    }
}

/// One unit's categorical observations, keyed by variable key.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitRecord {
    pub unit: String,
    pub levels: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableComparison {
    pub variable: ExperimentVariable,
    pub pairs: Vec<PairedObservation>,
    pub wilcoxon: WilcoxonResult,
}

/// Encodes one categorical variable ordinally for every unit present in both
/// snapshots and runs the signed-rank test on the pairs.
pub fn compare_variable(
    before: &[UnitRecord],
    after: &[UnitRecord],
    variable: ExperimentVariable,
    encoding: &OrdinalEncoding,
    alpha: Option<f64>,
) -> Result<VariableComparison> {
    let b_ids: BTreeSet<&str> = before.iter().map(|u| u.unit.as_str()).collect();
    let a_ids: BTreeSet<&str> = after.iter().map(|u| u.unit.as_str()).collect();
    let unmatched: Vec<String> = b_ids.symmetric_difference(&a_ids).map(|s| s.to_string()).collect();
    if !unmatched.is_empty() {
        return Err(Error::UnmatchedUnits(unmatched));
    }
    let level = |u: &UnitRecord| -> Result<i64> {
        let raw = u.levels.get(variable.key()).ok_or_else(|| Error::UnknownLevel {
            variable: variable.key().to_string(),
            level: String::new(),
        })?;
        encoding.code(variable, raw)
    };
    let mut pairs = Vec::new();
    for b in before {
        let a = after
            .iter()
            .find(|a| a.unit == b.unit)
            .ok_or_else(|| Error::UnmatchedUnits(vec![b.unit.clone()]))?;
        pairs.push(PairedObservation::new(&b.unit, level(b)? as f64, level(a)? as f64));
    }
    let wilcoxon = wilcoxon_signed_rank(&pairs, alpha)?;
    Ok(VariableComparison {
        variable,
        pairs,
        wilcoxon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_projects() -> Vec<ProjectMetrics> {
        vec![
            ProjectMetrics::new("Project 5", "April 2008", 49, 16.into()).unwrap(),
            ProjectMetrics::new("Project 5", "October 2009", 94, 13.into()).unwrap(),
            ProjectMetrics::new("Project 6", "April 2008", 55, 7.into()).unwrap(),
            ProjectMetrics::new("Project 6", "October 2009", 89, 11.into()).unwrap(),
        ]
    }

    #[test]
    fn test_project5_delta() {
        let (b, a) = split_snapshots(&two_projects()).unwrap();
        let r = compare_snapshots(&b, &a, None).unwrap();
        assert_eq!(r.rows[0].delta.to_decimal_string(2), "4.17");
        assert_eq!(r.rows[0].delta, Fraction::new(94, 13) - Fraction::new(49, 16));
        let text = r.to_text();
        assert!(text.contains("delta +4.17"));
        let csv = r.to_csv();
        for v in ["3.06", "7.23", "7.86", "8.09"] {
            assert!(csv.contains(v), "{csv}");
        }
    }

    #[test]
    fn test_identical_snapshots() {
        let rows = two_projects();
        let r = compare_snapshots(&rows[..1], &rows[..1], None).unwrap();
        assert!(r.rows[0].delta.is_zero());
        assert_eq!(r.wilcoxon.p_value, 1.0);
        assert_eq!(r.wilcoxon.n_effective, 0);
    }

    #[test]
    fn test_unmatched() {
        let rows = two_projects();
        let e = compare_snapshots(&rows[..1], &rows[2..3], None).unwrap_err();
        assert!(matches!(e, Error::UnmatchedUnits(u) if u.len() == 2));
        assert!(split_snapshots(&rows[..3]).is_err());
    }

    #[test]
    fn test_antisymmetric_deltas() {
        let (b, a) = split_snapshots(&two_projects()).unwrap();
        let fwd = compare_snapshots(&b, &a, None).unwrap();
        let back = compare_snapshots(&a, &b, None).unwrap();
        for (x, y) in fwd.rows.iter().zip(&back.rows) {
            assert_eq!(x.delta, -y.delta);
        }
        assert_eq!(fwd.wilcoxon.p_value, back.wilcoxon.p_value);
    }

    #[test]
    fn test_compare_variable() {
        let rec = |u: &str, o: &str| UnitRecord {
            unit: u.into(),
            levels: BTreeMap::from([("orientation".to_string(), o.to_string())]),
        };
        let before = vec![rec("a", "people-oriented"), rec("b", "people-oriented"), rec("c", "task-oriented")];
        let after = vec![rec("a", "task-oriented"), rec("b", "Task-Oriented"), rec("c", "task-oriented")];
        let r = compare_variable(&before, &after, ExperimentVariable::Orientation, &OrdinalEncoding::default(), None).unwrap();
        assert_eq!(r.wilcoxon.n_effective, 2);
        assert_eq!(r.pairs[0].after, 1.0);
        let bad = vec![rec("a", "sideways"), rec("b", "x"), rec("c", "y")];
        assert!(matches!(
            compare_variable(&bad, &after, ExperimentVariable::Orientation, &OrdinalEncoding::default(), None),
            Err(Error::UnknownLevel { .. })
        ));
    }
}
