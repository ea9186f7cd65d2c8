//! The on-disk acquisition session and the other documents read from files:
//! the candidate request list and the recommender config override.
//!
//! A session is a single JSON document with a top-level `schema_version`.
//! Saving writes a temporary file next to the target and renames it over the
//! target, so readers never observe a half-written session.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::io::Write as _;
use std::path::Path;

use crate::error::{Error, Result, Violation};
use crate::profile::{score_quality_of_life, score_sociological, QolResponses, QolScore, SocioResponses};
use crate::recommend::{objective, Assignment, AssignmentProposal, ObjectiveBreakdown, RecommenderConfig};
use crate::style::{assess_person, PersonAssessment};
use crate::team::{validate_org_chart, validate_pool, BalanceReport, Candidate, OrgChart};

pub const SCHEMA_VERSION: u64 = 1;

/// What is known about one scored candidate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateAssessment {
    pub person: PersonAssessment,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qol: Option<QolScore>,
}

/// Balance and objective of a hypothetical assignment. Nothing is recorded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhatIf {
    pub balance: BalanceReport,
    pub objective: ObjectiveBreakdown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcquisitionSession {
    pub schema_version: u64,
    pub project: String,
    pub chart: OrgChart,
    #[serde(default)]
    pub pool: Vec<Candidate>,
    /// Keyed by candidate id.
    #[serde(default)]
    pub assessments: BTreeMap<String, CandidateAssessment>,
    #[serde(default)]
    pub config: RecommenderConfig,
    /// Every proposal made during the session, oldest first.
    #[serde(default)]
    pub proposals: Vec<AssignmentProposal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_assignment: Option<Assignment>,
}

impl AcquisitionSession {
    pub fn new(project: impl Into<String>, chart: OrgChart) -> Self {
        AcquisitionSession {
            schema_version: SCHEMA_VERSION,
            project: project.into(),
            chart,
            pool: Vec::new(),
            assessments: BTreeMap::new(),
            config: RecommenderConfig::default(),
            proposals: Vec::new(),
            final_assignment: None,
        }
    }

    /// Replaces the pool. Assessments are rebuilt from the candidates'
    /// profiles, so a pool carrying profiles arrives already assessed.
    pub fn set_pool(&mut self, pool: Vec<Candidate>) -> Result<()> {
        validate_pool(&pool, &self.chart).map_err(Error::Validation)?;
        let mut assessments = BTreeMap::new();
        for c in &pool {
            if let Some(p) = &c.profile {
                assessments.insert(
                    c.id.clone(),
                    CandidateAssessment {
                        person: assess_person(p)?,
                        qol: c.qol,
                    },
                );
            }
        }
        self.pool = pool;
        self.assessments = assessments;
        self.final_assignment = None;
        Ok(())
    }

    pub fn candidate(&self, id: &str) -> Option<&Candidate> {
        self.pool.iter().find(|c| c.id == id)
    }

    /// Scores a candidate's questionnaires and records the result.
    pub fn score_candidate(
        &mut self,
        id: &str,
        socio: &SocioResponses,
        qol: Option<&QolResponses>,
    ) -> Result<CandidateAssessment> {
        let candidate = self
            .pool
            .iter_mut()
            .find(|c| c.id == id)
            .ok_or_else(|| Error::UnknownCandidate(id.to_string()))?;
        let profile = score_sociological(socio);
        let assessment = CandidateAssessment {
            person: assess_person(&profile)?,
            qol: qol.map(score_quality_of_life),
        };
        candidate.profile = Some(profile);
        candidate.qol = assessment.qol;
        self.assessments.insert(id.to_string(), assessment.clone());
        Ok(assessment)
    }

    /// Appends to the proposal history; earlier entries are never touched.
    pub fn push_proposal(&mut self, proposal: AssignmentProposal) {
        self.proposals.push(proposal);
    }

    /// Makes `assignment` the session's final answer after checking it
    /// against the chart and pool.
    pub fn set_final(&mut self, assignment: Assignment) -> Result<()> {
        check_assignment(&assignment, &self.chart, &self.pool).map_err(Error::Validation)?;
        self.final_assignment = Some(assignment);
        Ok(())
    }

    pub fn what_if(&self, assignment: &Assignment) -> Result<WhatIf> {
        let objective = objective(assignment, &self.pool, &self.chart, &self.config)?;
        let balance = objective.balance.clone().ok_or(Error::EmptyTeam)?;
        Ok(WhatIf { balance, objective })
    }

    /// Structural checks applied after loading.
    pub fn validate(&self) -> Result<()> {
        if !self.chart.positions.is_empty() {
            validate_org_chart(&self.chart).map_err(Error::InfeasibleChart)?;
        }
        let mut violations = validate_pool(&self.pool, &self.chart).err().unwrap_or_default();
        for (id, a) in &self.assessments {
            match self.candidate(id).and_then(|c| c.profile) {
                Some(p) if a.person.normal.quartet == p.normal && a.person.tense.quartet == p.tense => {}
                _ => violations.push(Violation::Malformed {
                    path: format!("assessments.{id}"),
                    reason: "does not match the candidate's profile".into(),
                }),
            }
        }
        if let Some(a) = &self.final_assignment {
            if let Err(v) = check_assignment(a, &self.chart, &self.pool) {
                violations.extend(v);
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(violations))
        }
    }
}

fn check_assignment(
    assignment: &Assignment,
    chart: &OrgChart,
    pool: &[Candidate],
) -> std::result::Result<(), Vec<Violation>> {
    let slots: BTreeSet<String> = chart.slots().into_iter().map(|s| s.id).collect();
    let mut seen = BTreeSet::new();
    let mut v = Vec::new();
    for (slot, cand) in &assignment.pairs {
        if !slots.contains(slot) {
            v.push(Violation::Malformed {
                path: format!("final_assignment.pairs.{slot}"),
                reason: "unknown position".into(),
            });
        }
        match pool.iter().find(|c| &c.id == cand) {
            None => v.push(Violation::Malformed {
                path: format!("final_assignment.pairs.{slot}"),
                reason: format!("unknown candidate {cand}"),
            }),
            Some(c) if c.profile.is_none() => v.push(Violation::Malformed {
                path: format!("final_assignment.pairs.{slot}"),
                reason: format!("candidate {cand} has not been scored"),
            }),
            Some(_) => {}
        }
        if !seen.insert(cand.as_str()) {
            v.push(Violation::DuplicateId { id: cand.clone() });
        }
    }
    if v.is_empty() {
        Ok(())
    } else {
        Err(v)
    }
}

/// Pretty JSON with a trailing newline. Every JSON document the tool emits,
/// on disk or over HTTP, goes through here.
pub fn render_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).unwrap_or_else(|_| "null".into());
    s.push('\n');
    s
}

/// Parses any JSON document, reporting line, column and field path on error.
pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let inner = e.inner();
        let path = e.path().to_string();
        let location = if path == "." {
            format!("line {}, column {}", inner.line(), inner.column())
        } else {
            format!("line {}, column {}, at {path}", inner.line(), inner.column())
        };
        Error::parse(location, inner)
    })
}

/// Parses a session document. Syntax errors report line and column; type
/// errors also report the field path.
pub fn parse_session(text: &str) -> Result<AcquisitionSession> {
    let probe: serde_json::Value = serde_json::from_str(text).map_err(|e| {
        Error::parse(format!("line {}, column {}", e.line(), e.column()), e)
    })?;
    let found = probe
        .get("schema_version")
        .ok_or_else(|| Error::parse("schema_version", "missing field"))?;
    let found = found
        .as_u64()
        .ok_or_else(|| Error::parse("schema_version", "expected a non-negative integer"))?;
    if found != SCHEMA_VERSION {
        return Err(Error::SchemaVersionMismatch {
            found,
            expected: SCHEMA_VERSION,
        });
    }
    let session: AcquisitionSession = parse_json(text)?;
    session.validate()?;
    Ok(session)
}

pub fn load_session(path: &Path) -> Result<AcquisitionSession> {
    parse_session(&std::fs::read_to_string(path)?)
}

pub fn save_session(session: &AcquisitionSession, path: &Path) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(render_json(session).as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Reads a candidate request list: `name,contact,aspired_role`, plus an
/// optional `id` column. Without ids, candidates are numbered `c1`, `c2`, ...
pub fn parse_request_list(text: &str) -> Result<Vec<Candidate>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| Error::parse("line 1", e))?.clone();
    let col = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let need = |name: &str| {
        col(name).ok_or_else(|| Error::parse("line 1", format!("missing column {name}")))
    };
    let (iname, icontact, irole) = (need("name")?, need("contact")?, need("aspired_role")?);
    let iid = col("id");
    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let line = format!("line {}", i + 2);
        let rec = rec.map_err(|e| Error::parse(line.clone(), e))?;
        let field = |idx: usize| rec.get(idx).unwrap_or("").to_string();
        let name = field(iname);
        if name.is_empty() {
            return Err(Error::parse(format!("{line}, name"), "empty name"));
        }
        let aspired_role = field(irole);
        if aspired_role.is_empty() {
            return Err(Error::parse(format!("{line}, aspired_role"), "empty role"));
        }
        let id = match iid.map(field) {
            Some(id) if !id.is_empty() => id,
            _ => format!("c{}", i + 1),
        };
        out.push(Candidate {
            id,
            name,
            contact: field(icontact),
            aspired_role,
            profile: None,
            qol: None,
            technical: BTreeMap::new(),
        });
    }
    Ok(out)
}

/// Applies a TOML override document to `base`.
///
/// Keys are flat: `w_tech`, `w_affinity`, `w_balance`, `exhaustive_limit`,
/// `restarts`, `max_iterations`, `seed`, `affinity.default`, and
/// `"affinity.<descriptor>.<role>"`. TOML tables are accepted too and read as
/// the equivalent dotted keys.
pub fn parse_config_toml(text: &str, base: RecommenderConfig) -> Result<RecommenderConfig> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| {
        let loc = e
            .span()
            .map(|s| {
                let line = text[..s.start.min(text.len())].matches('\n').count() + 1;
                format!("line {line}")
            })
            .unwrap_or_else(|| "config".into());
        Error::parse(loc, e.message())
    })?;
    let mut flat = Vec::new();
    flatten(&table, String::new(), &mut flat);

    let mut config = base;
    for (key, value) in flat {
        let bad = |what: &str| Error::parse(key.clone(), format!("expected {what}"));
        let as_f64 = || match &value {
            toml::Value::Float(f) => Ok(*f),
            toml::Value::Integer(i) => Ok(*i as f64),
            _ => Err(bad("a number")),
        };
        let as_u64 = || match &value {
            toml::Value::Integer(i) if *i >= 0 => Ok(*i as u64),
            _ => Err(bad("a non-negative integer")),
        };
        match key.as_str() {
            "w_tech" => config.w_tech = as_f64()?,
            "w_affinity" => config.w_affinity = as_f64()?,
            "w_balance" => config.w_balance = as_f64()?,
            "exhaustive_limit" => config.exhaustive_limit = as_u64()?,
            "restarts" => config.restarts = u32::try_from(as_u64()?).map_err(|_| bad("a 32-bit count"))?,
            "max_iterations" => {
                config.max_iterations = u32::try_from(as_u64()?).map_err(|_| bad("a 32-bit count"))?
            }
            "seed" => config.seed = as_u64()?,
            "affinity.default" => config.affinity.default_value = as_f64()?,
            k => match k.strip_prefix("affinity.").and_then(|r| r.split_once('.')) {
                Some((descriptor, role)) if !descriptor.is_empty() && !role.is_empty() => {
                    config.affinity.set(descriptor, role, as_f64()?)
                }
                _ => return Err(Error::parse(key.clone(), "unknown key")),
            },
        }
    }
    config.validate()?;
    Ok(config)
}

fn flatten(table: &toml::Table, prefix: String, out: &mut Vec<(String, toml::Value)>) {
    for (k, v) in table {
        let key = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        match v {
            toml::Value::Table(t) => flatten(t, key, out),
            other => out.push((key, other.clone())),
        }
    }
}
