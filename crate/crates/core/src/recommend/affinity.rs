use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::style::{MixedSubstyle, PersonAssessment, StyleKind, Trait};

pub const NAMED_AFFINITY: f64 = 1.0;
pub const RELATED_AFFINITY: f64 = 0.5;
pub const DEFAULT_AFFINITY: f64 = 0.25;

/// Role ids used by the built-in affinity table, grouped by the kind of work.
pub mod roles {
    pub const PROJECT_MANAGER: &str = "project_manager";
    pub const TEAM_LEAD: &str = "team_lead";
    pub const ARCHITECT: &str = "architect";
    pub const DESIGNER: &str = "designer";
    pub const ANALYST: &str = "analyst";
    pub const DEVELOPER: &str = "developer";
    pub const TESTER: &str = "tester";
    pub const HR_MANAGER: &str = "hr_manager";

    pub const LEADERSHIP: &[&str] = &[PROJECT_MANAGER, TEAM_LEAD];
    pub const TECHNICAL: &[&str] = &[ARCHITECT, DESIGNER, ANALYST];
    pub const DELIVERY: &[&str] = &[DEVELOPER, TESTER];
    pub const SUPPORT: &[&str] = &[HR_MANAGER];

    pub const GROUPS: &[&[&str]] = &[LEADERSHIP, TECHNICAL, DELIVERY, SUPPORT];
}

/// Style-to-role affinity in 0..=1.
///
/// Keys are style descriptors (a mixed substyle name such as `Technical`, or
/// a trait name such as `Controller`) mapped to role ids. Anything missing
/// falls back to `default_value`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffinityTable {
    pub entries: BTreeMap<String, BTreeMap<String, f64>>,
    pub default_value: f64,
}

impl Default for AffinityTable {
    /// Named pairs score 1.0, other roles in the same group as a named role
    /// 0.5, everything else 0.25.
    fn default() -> Self {
        use roles::*;
        let mut table = AffinityTable {
            entries: BTreeMap::new(),
            default_value: DEFAULT_AFFINITY,
        };
        let named: [(MixedSubstyle, &[&str]); 3] = [
            (MixedSubstyle::Administrative, LEADERSHIP),
            (MixedSubstyle::Technical, TECHNICAL),
            (MixedSubstyle::Energetic, &[DEVELOPER, HR_MANAGER]),
        ];
        for (style, named_roles) in named {
            for group in GROUPS {
                if group.iter().any(|r| named_roles.contains(r)) {
                    for role in *group {
                        let v = if named_roles.contains(role) {
                            NAMED_AFFINITY
                        } else {
                            RELATED_AFFINITY
                        };
                        table.set(style.name(), role, v);
                    }
                }
            }
        }
        for style in [
            MixedSubstyle::Executive,
            MixedSubstyle::Diplomatic,
            MixedSubstyle::Developed,
        ] {
            for role in LEADERSHIP.iter().chain(SUPPORT) {
                table.set(style.name(), role, RELATED_AFFINITY);
            }
        }
        let by_trait: [(Trait, &[&str]); 4] = [
            (Trait::Controller, LEADERSHIP),
            (Trait::Analyzer, TECHNICAL),
            (Trait::Collaborator, SUPPORT),
            (Trait::Promoter, SUPPORT),
        ];
        for (t, group) in by_trait {
            for role in group {
                table.set(t.name(), role, RELATED_AFFINITY);
            }
        }
        table
    }
}

impl AffinityTable {
    pub fn set(&mut self, descriptor: &str, role: &str, value: f64) {
        self.entries
            .entry(descriptor.to_string())
            .or_default()
            .insert(role.to_string(), value);
    }

    pub fn get(&self, descriptor: &str, role: &str) -> Option<f64> {
        self.entries.get(descriptor).and_then(|m| m.get(role)).copied()
    }

    pub fn validate(&self) -> Result<(), String> {
        let ok = |v: f64| v.is_finite() && (0.0..=1.0).contains(&v);
        if !ok(self.default_value) {
            return Err(format!("default affinity {} outside 0..=1", self.default_value));
        }
        for (d, m) in &self.entries {
            for (r, v) in m {
                if !ok(*v) {
                    return Err(format!("affinity {d}.{r} = {v} outside 0..=1"));
                }
            }
        }
        Ok(())
    }
}

/// Affinity of a person for a role, judged from their normal-situation style.
///
/// A mixed style is looked up by substyle first; otherwise, or when the table
/// has no such entry, by dominant trait; then the table default.
pub fn affinity(assessment: &PersonAssessment, role: &str, table: &AffinityTable) -> f64 {
    let style = &assessment.normal.style;
    if style.kind == StyleKind::Mixed {
        if let Some(v) = style
            .mixed_substyle
            .and_then(|m| table.get(m.name(), role))
        {
            return v;
        }
    }
    table
        .get(style.dominant_trait.name(), role)
        .unwrap_or(table.default_value)
}
