use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fraction::Fraction;

/// Requirements completed per month, kept exact.
pub fn productivity(requirements: u64, months: Fraction) -> Result<Fraction> {
    if !months.is_positive() {
        return Err(Error::ZeroMonths);
    }
    let r = i64::try_from(requirements)
        .map_err(|_| Error::parse("requirements", "value too large"))?;
    Fraction::from_integer(r)
        .checked_div(&months)
        .ok_or_else(|| Error::parse("productivity", "value out of range"))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawMetrics")]
pub struct ProjectMetrics {
    pub project: String,
    /// e.g. "April 2008".
    pub snapshot: String,
    pub requirements: u64,
    pub months: Fraction,
    pub productivity: Fraction,
    /// Recorded alongside the figures but never part of the productivity
    /// computation (team size, specification notes, ...).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub context: BTreeMap<String, String>,
}

#[derive(Deserialize)]
struct RawMetrics {
    project: String,
    snapshot: String,
    requirements: u64,
    months: Fraction,
    #[serde(default)]
    context: BTreeMap<String, String>,
}

impl TryFrom<RawMetrics> for ProjectMetrics {
    type Error = Error;
    fn try_from(r: RawMetrics) -> Result<Self> {
        let mut m = ProjectMetrics::new(r.project, r.snapshot, r.requirements, r.months)?;
        m.context = r.context;
        Ok(m)
    }
}

impl ProjectMetrics {
    pub fn new(
        project: impl Into<String>,
        snapshot: impl Into<String>,
        requirements: u64,
        months: Fraction,
    ) -> Result<Self> {
        Ok(ProjectMetrics {
            project: project.into(),
            snapshot: snapshot.into(),
            requirements,
            months,
            productivity: productivity(requirements, months)?,
            context: BTreeMap::new(),
        })
    }

    pub fn label(&self) -> String {
        if self.snapshot.is_empty() {
            self.project.clone()
        } else {
            format!("{} {}", self.project, self.snapshot)
        }
    }
}

/// Reads `project,snapshot,requirements,months[,extra...]` rows. Extra
/// columns are kept as context.
pub fn parse_projects_csv(text: &str) -> Result<Vec<ProjectMetrics>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::parse("line 1", e))?
        .clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::parse("line 1", format!("missing column {name}")))
    };
    let (ip, is, ir, im) = (col("project")?, col("snapshot")?, col("requirements")?, col("months")?);
    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let line = format!("line {}", i + 2);
        let rec = rec.map_err(|e| Error::parse(line.clone(), e))?;
        let field = |idx: usize| rec.get(idx).unwrap_or("");
        let requirements: u64 = field(ir)
            .parse()
            .map_err(|_| Error::parse(format!("{line}, requirements"), "expected a non-negative integer"))?;
        let months: Fraction = field(im)
            .parse()
            .map_err(|e| Error::parse(format!("{line}, months"), e))?;
        let mut m = ProjectMetrics::new(field(ip), field(is), requirements, months)
            .map_err(|e| Error::parse(format!("{line}, months"), e))?;
        for (k, (h, v)) in headers.iter().zip(rec.iter()).enumerate() {
            if ![ip, is, ir, im].contains(&k) {
                m.context.insert(h.to_string(), v.to_string());
            }
        }
        out.push(m);
    }
    Ok(out)
}

/// Aligned text table: project, requirements, months, productivity (2 dp).
pub fn productivity_table_text(rows: &[ProjectMetrics]) -> String {
    let header = ["Project", "Requirements (R)", "Time (months)", "Productivity (R/M)"];
    let body: Vec<[String; 4]> = rows
        .iter()
        .map(|m| {
            [
                m.label(),
                m.requirements.to_string(),
                display_months(m.months),
                m.productivity.to_decimal_string(2),
            ]
        })
        .collect();
    let mut widths = header.map(str::len);
    for r in &body {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: [&str; 4]| {
        let mut s = format!("{:<w$}", cells[0], w = widths[0]);
        for (c, w) in cells[1..].iter().zip(&widths[1..]) {
            s.push_str(&format!("  {c:>w$}"));
        }
        out.push_str(s.trim_end());
        out.push('\n');
    };
    line(header);
    for r in &body {
        line([&r[0], &r[1], &r[2], &r[3]]);
    }
    out
}

/// CSV with header `project,requirements,time_months,productivity`.
pub fn productivity_table_csv(rows: &[ProjectMetrics]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let _ = w.write_record(["project", "requirements", "time_months", "productivity"]);
    for m in rows {
        let _ = w.write_record([
            m.label(),
            m.requirements.to_string(),
            display_months(m.months),
            m.productivity.to_decimal_string(2),
        ]);
    }
    String::from_utf8(w.into_inner().unwrap_or_default()).unwrap_or_default()
}

fn display_months(m: Fraction) -> String {
    if m.denom() == 1 {
        m.to_string()
    } else {
        m.to_decimal_string(2)
    }
}
