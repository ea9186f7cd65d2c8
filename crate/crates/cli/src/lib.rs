//! The `teamforge` command line.
//!
//! Every subcommand works either on a saved session (`--session`) or on a
//! throwaway one assembled from a pool and a chart. Output goes to stdout as
//! text, JSON or CSV; JSON is byte-for-byte what the HTTP service returns.
//!
//! Exit codes: 0 success, 1 validation or I/O failure, 2 usage error.

use std::ffi::OsString;
use std::io::Write;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use teamforge_core::analytics::{
    compare_snapshots, parse_projects_csv, productivity_table_csv, productivity_table_text, split_snapshots,
    ComparisonReport, ProjectMetrics, WilcoxonRequest, WilcoxonResult,
};
use teamforge_core::profile::{Quartet, ResponseDocument};
use teamforge_core::recommend::{apply_override, recommend, Assignment, AssignmentProposal, OverrideEdit};
use teamforge_core::report::{acquisition_report, completion_report};
use teamforge_core::session::{
    load_session, parse_config_toml, parse_json, parse_request_list, render_json, save_session, AcquisitionSession,
    WhatIf,
};
use teamforge_core::style::{
    classify_style, derive_orientation, describe_traits, score_document, ScoreCard, SituationAssessment,
};
use teamforge_core::team::{build_resume_table, Candidate, OrgChart};
use teamforge_core::Error;

#[derive(Debug, Parser)]
#[command(name = "teamforge", version, about = "Score candidates, balance teams and recommend role assignments")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,
    /// Also write the JSON document to this file.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score a candidate's questionnaires.
    Score {
        #[arg(long, value_name = "FILE")]
        responses: PathBuf,
        /// Record the result against this candidate in the session.
        #[arg(long)]
        candidate: Option<String>,
        #[command(flatten)]
        ctx: ContextArgs,
        /// Save the session afterwards.
        #[arg(long, requires = "candidate")]
        commit: bool,
    },
    /// Classify a style from a response file or a single quartet.
    Classify {
        #[arg(long, value_name = "FILE", conflicts_with = "quartet", required_unless_present = "quartet")]
        responses: Option<PathBuf>,
        /// Four comma-separated values in Z,X,W,Y order.
        #[arg(long, value_name = "Z,X,W,Y")]
        quartet: Option<String>,
    },
    /// Balance and objective of an assignment (default: the final one).
    Balance {
        #[arg(long, value_name = "FILE")]
        assignment: Option<PathBuf>,
        #[command(flatten)]
        ctx: ContextArgs,
    },
    /// Propose a candidate for every position.
    Recommend {
        #[command(flatten)]
        ctx: ContextArgs,
        /// Record the proposal as final and save the session.
        #[arg(long)]
        commit: bool,
    },
    /// Apply expert edits to the latest proposal.
    Override {
        /// JSON file of the form {"edits": [{"position": .., "candidate": ..}]}.
        #[arg(long, value_name = "FILE")]
        edits: PathBuf,
        #[command(flatten)]
        ctx: ContextArgs,
        #[arg(long)]
        commit: bool,
    },
    /// Productivity table and before/after significance test.
    Evaluate {
        /// CSV of project,snapshot,requirements,months rows.
        #[arg(long, value_name = "FILE", conflicts_with = "pairs", required_unless_present = "pairs")]
        table: Option<PathBuf>,
        /// JSON paired observations.
        #[arg(long, value_name = "FILE")]
        pairs: Option<PathBuf>,
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Completion or acquisition report.
    Report {
        #[arg(long, value_enum)]
        kind: ReportKind,
        #[command(flatten)]
        ctx: ContextArgs,
    },
    /// Serve the HTTP API over a session file.
    Serve {
        #[arg(long, value_name = "FILE")]
        session: PathBuf,
        #[arg(long, default_value = "127.0.0.1")]
        bind: IpAddr,
        #[arg(long, default_value_t = 8080)]
        port: u16,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportKind {
    Completion,
    Acquisition,
}

#[derive(Debug, Args)]
struct ContextArgs {
    /// Session file.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["pool", "chart"])]
    session: Option<PathBuf>,
    /// Candidate pool: a .csv request list or a JSON candidate array.
    #[arg(long, value_name = "FILE", requires = "chart")]
    pool: Option<PathBuf>,
    /// Organization chart JSON.
    #[arg(long, value_name = "FILE", requires = "pool")]
    chart: Option<PathBuf>,
    /// Project name for a session built from --pool/--chart.
    #[arg(long, default_value = "untitled")]
    project: String,
    /// Recommender config overrides (TOML).
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(Error::Io(e))
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return e.exit_code();
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(CliError::Core(e)) => {
            let _ = writeln!(err, "error: {e}");
            if let Some(vs) = e.violations() {
                for v in vs {
                    let _ = writeln!(err, "  - {v}");
                }
            }
            1
        }
    }
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| {
        CliError::Core(Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
    })
}

impl ContextArgs {
    /// The working session and, when it came from a file, where to save it.
    fn load(&self) -> CliResult<(AcquisitionSession, Option<PathBuf>)> {
        let (mut session, path) = match (&self.session, &self.pool, &self.chart) {
            (Some(path), _, _) => (load_session(path)?, Some(path.clone())),
            (None, Some(pool), Some(chart)) => {
                let chart: OrgChart = parse_json(&read(chart)?)?;
                let text = read(pool)?;
                let candidates: Vec<Candidate> = if pool.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
                    parse_request_list(&text)?
                } else {
                    parse_json(&text)?
                };
                let mut s = AcquisitionSession::new(self.project.clone(), chart);
                s.set_pool(candidates)?;
                s.validate()?;
                (s, None)
            }
            _ => return Err(CliError::Usage("supply --session, or --pool together with --chart".into())),
        };
        if let Some(config) = &self.config {
            session.config = parse_config_toml(&read(config)?, session.config.clone())?;
        }
        if let Some(seed) = self.seed {
            session.config.seed = seed;
        }
        Ok((session, path))
    }
}

fn commit_path(path: Option<PathBuf>) -> CliResult<PathBuf> {
    path.ok_or_else(|| CliError::Usage("--commit needs --session".into()))
}

/// One rendered result: the JSON document plus optional text and CSV forms.
struct Output {
    json: String,
    text: String,
    csv: Option<String>,
}

impl Output {
    fn new(value: &impl Serialize, text: String, csv: Option<String>) -> Self {
        Output {
            json: render_json(value),
            text,
            csv,
        }
    }
}

fn execute(cli: Cli, out: &mut dyn Write) -> CliResult<()> {
    let output = match cli.command {
        Command::Serve { session, bind, port } => return serve(session, SocketAddr::new(bind, port), out),
        Command::Score {
            responses,
            candidate,
            ctx,
            commit,
        } => score(&responses, candidate.as_deref(), &ctx, commit)?,
        Command::Classify { responses, quartet } => classify(responses.as_deref(), quartet.as_deref())?,
        Command::Balance { assignment, ctx } => balance(assignment.as_deref(), &ctx)?,
        Command::Recommend { ctx, commit } => {
            let (mut session, path) = ctx.load()?;
            let proposal = recommend(&session.pool, &session.chart, &session.config)?;
            if commit {
                let path = commit_path(path)?;
                session.set_final(proposal.assignment.clone())?;
                session.push_proposal(proposal.clone());
                save_session(&session, &path)?;
            }
            Output::new(&proposal, proposal_text(&proposal, &session), Some(proposal_csv(&proposal)))
        }
        Command::Override { edits, ctx, commit } => {
            #[derive(Deserialize)]
            struct EditFile {
                edits: Vec<OverrideEdit>,
            }
            let file: EditFile = parse_json(&read(&edits)?)?;
            let (mut session, path) = ctx.load()?;
            let base = session
                .proposals
                .last()
                .ok_or_else(|| CliError::Usage("the session has no proposal to override; run recommend --commit first".into()))?;
            let edited = apply_override(base, &file.edits, &session.pool, &session.chart, &session.config)?;
            if commit {
                let path = commit_path(path)?;
                session.set_final(edited.assignment.clone())?;
                session.push_proposal(edited.clone());
                save_session(&session, &path)?;
            }
            Output::new(&edited, proposal_text(&edited, &session), Some(proposal_csv(&edited)))
        }
        Command::Evaluate { table, pairs, alpha } => evaluate(table.as_deref(), pairs.as_deref(), alpha)?,
        Command::Report { kind, ctx } => {
            let (session, _) = ctx.load()?;
            match kind {
                ReportKind::Completion => {
                    let r = completion_report(&session)?;
                    Output::new(&r, r.to_text(), Some(r.to_csv()))
                }
                ReportKind::Acquisition => {
                    let r = acquisition_report(&session);
                    Output::new(&r, r.to_text(), Some(r.to_csv()))
                }
            }
        }
    };

    let body = match cli.format {
        Format::Text => output.text,
        Format::Json => output.json.clone(),
        Format::Csv => output
            .csv
            .ok_or_else(|| CliError::Usage("this command has no CSV output".into()))?,
    };
    if let Some(path) = &cli.out {
        std::fs::write(path, &output.json)?;
    }
    out.write_all(body.as_bytes())?;
    Ok(())
}

fn serve(session: PathBuf, bind: SocketAddr, out: &mut dyn Write) -> CliResult<()> {
    let loaded = load_session(&session)?;
    let runtime = tokio::runtime::Runtime::new()?;
    writeln!(out, "listening on http://{bind}")?;
    out.flush()?;
    runtime.block_on(teamforge_service::serve(teamforge_service::ServiceConfig {
        bind,
        session: loaded,
        save_path: Some(session),
    }))?;
    Ok(())
}

fn score(responses: &Path, candidate: Option<&str>, ctx: &ContextArgs, commit: bool) -> CliResult<Output> {
    let doc = ResponseDocument::from_json_str(&read(responses)?).map_err(Error::Validation)?;
    if let Some(id) = candidate {
        let (mut session, path) = ctx.load()?;
        session.score_candidate(id, &doc.socio, doc.qol.as_ref())?;
        if commit {
            save_session(&session, &commit_path(path)?)?;
        }
    }
    let card = score_document(&doc, candidate)?;
    Ok(Output::new(&card, score_text(&card), Some(score_csv(&card))))
}

fn score_text(card: &ScoreCard) -> String {
    let mut s = String::new();
    if let Some(c) = &card.candidate {
        s += &format!("candidate {c}\n");
    }
    for (label, a) in [("normal", &card.assessment.normal), ("tense", &card.assessment.tense)] {
        s += &situation_line(label, a);
    }
    s += &format!(
        "stable under stress: {}\n",
        if card.assessment.stable_under_stress { "yes" } else { "no" }
    );
    if let Some(q) = &card.qol {
        s += &format!(
            "quality of life: fatigue {}, emotional {}, total {}\n",
            q.fatigue,
            q.emotional,
            q.total()
        );
    }
    s
}

fn situation_line(label: &str, a: &SituationAssessment) -> String {
    let [z, x, w, y] = a.quartet.to_array();
    format!(
        "{label:<7} Z={z} X={x} W={w} Y={y}  {}  {:?}, {:?}  [{}]\n",
        a.style.summary(),
        a.orientation.activity,
        a.orientation.orientation,
        a.descriptors.join(", ")
    )
}

fn score_csv(card: &ScoreCard) -> String {
    let mut s = String::from("situation,Z,X,W,Y,style,activity,orientation\n");
    for (label, a) in [("normal", &card.assessment.normal), ("tense", &card.assessment.tense)] {
        let [z, x, w, y] = a.quartet.to_array();
        s += &format!(
            "{label},{z},{x},{w},{y},{},{:?},{:?}\n",
            a.style.summary(),
            a.orientation.activity,
            a.orientation.orientation
        );
    }
    s
}

fn classify(responses: Option<&Path>, quartet: Option<&str>) -> CliResult<Output> {
    if let Some(path) = responses {
        let doc = ResponseDocument::from_json_str(&read(path)?).map_err(Error::Validation)?;
        let card = score_document(&doc, None)?;
        let text = situation_line("normal", &card.assessment.normal) + &situation_line("tense", &card.assessment.tense);
        return Ok(Output::new(&card.assessment, text, None));
    }
    let raw = quartet.unwrap_or_default();
    let values: Vec<i64> = raw
        .split(',')
        .map(|v| v.trim().parse::<i64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("--quartet expects four integers, got {raw:?}")))?;
    let [z, x, w, y] = values[..] else {
        return Err(CliError::Usage(format!("--quartet expects four integers, got {raw:?}")));
    };
    let q = Quartet::new(z, x, w, y);
    q.validate()?;
    let assessment = SituationAssessment {
        quartet: q,
        style: classify_style(&q)?,
        orientation: derive_orientation(&q)?,
        descriptors: describe_traits(&q).into_iter().map(String::from).collect(),
    };
    Ok(Output::new(&assessment, situation_line("quartet", &assessment), None))
}

fn balance(assignment: Option<&Path>, ctx: &ContextArgs) -> CliResult<Output> {
    let (session, _) = ctx.load()?;
    let assignment: Assignment = match assignment {
        Some(path) => parse_json(&read(path)?)?,
        None => session.final_assignment.clone().ok_or(Error::NoFinalAssignment)?,
    };
    let what_if = session.what_if(&assignment)?;

    let mut members = Vec::new();
    for (slot, id) in &assignment.pairs {
        let profile = session
            .candidate(id)
            .and_then(|c| c.profile.as_ref())
            .ok_or_else(|| Error::UnscoredCandidate(id.clone()))?;
        members.push((format!("{slot}:{id}"), profile));
    }
    let resume = build_resume_table(members.iter().map(|(m, p)| (m.as_str(), *p)))?;

    let mut text = String::new();
    text += &format!("{:<16} {:>5} {:>5} {:>5} {:>5} | {:>5} {:>5} {:>5} {:>5}\n", "member", "Z", "X", "W", "Y", "z", "x", "w", "y");
    for r in &resume.rows {
        let [a, b, c, d] = r.normal.to_array();
        let [e, f, g, h] = r.tense.to_array();
        text += &format!("{:<16} {a:>5} {b:>5} {c:>5} {d:>5} | {e:>5} {f:>5} {g:>5} {h:>5}\n", r.member);
    }
    let mean = |m: &teamforge_core::team::QuartetMean| {
        m.to_array().map(|f| f.to_decimal_string(2))
    };
    let [a, b, c, d] = mean(&resume.summary_normal);
    let [e, f, g, h] = mean(&resume.summary_tense);
    text += &format!("{:<16} {a:>5} {b:>5} {c:>5} {d:>5} | {e:>5} {f:>5} {g:>5} {h:>5}\n", "mean");
    text += &what_if_text(&what_if);
    Ok(Output::new(&what_if, text, Some(resume.to_csv())))
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "balanced"
    } else {
        "unbalanced"
    }
}

fn what_if_text(w: &WhatIf) -> String {
    let b = &w.balance;
    let o = &w.objective;
    format!(
        "normal: gap {} ({})\ntense:  gap {} ({})\nteam:   {}\nobjective {:.4} = {} x tech {:.4} + {} x affinity {:.4} + {} x balance {:.4}\n",
        b.max_column_gap_normal,
        yes_no(b.normal_balanced),
        b.max_column_gap_tense,
        yes_no(b.tense_balanced),
        yes_no(b.balanced),
        o.score,
        o.w_tech,
        o.technical_mean,
        o.w_affinity,
        o.affinity_mean,
        o.w_balance,
        o.balance_term,
    )
}

fn proposal_text(p: &AssignmentProposal, session: &AcquisitionSession) -> String {
    let mut s = format!(
        "{} objective {:.4} (tech {:.4}, affinity {:.4}, balance {:.4})\n",
        p.search_meta.strategy.label(),
        p.objective,
        p.breakdown.technical_mean,
        p.breakdown.affinity_mean,
        p.breakdown.balance_term
    );
    for t in &p.breakdown.pairs {
        let name = session.candidate(&t.candidate).map(|c| c.name.as_str()).unwrap_or("");
        s += &format!(
            "  {:<12} {:<18} {} {}  tech {:.2} affinity {:.2}\n",
            t.slot, t.role, t.candidate, name, t.technical, t.affinity
        );
    }
    for e in &p.search_meta.edits {
        match &e.candidate {
            Some(c) => s += &format!("  edit: assign {c} -> {}\n", e.position),
            None => s += &format!("  edit: clear {}\n", e.position),
        }
    }
    if !p.assignment.unfilled.is_empty() {
        s += &format!("unfilled: {}\n", p.assignment.unfilled.join(", "));
    }
    if !p.assignment.bench.is_empty() {
        s += &format!("bench: {}\n", p.assignment.bench.join(", "));
    }
    if let Some(b) = &p.breakdown.balance {
        s += &format!("team {} (max gap {})\n", yes_no(b.balanced), b.max_gap());
    }
    s
}

fn proposal_csv(p: &AssignmentProposal) -> String {
    let mut s = String::from("slot,role,candidate,technical,affinity\n");
    for t in &p.breakdown.pairs {
        s += &format!("{},{},{},{},{}\n", t.slot, t.role, t.candidate, t.technical, t.affinity);
    }
    s
}

#[derive(Serialize)]
struct Evaluation<'a> {
    projects: &'a [ProjectMetrics],
    #[serde(skip_serializing_if = "Option::is_none")]
    comparison: Option<ComparisonReport>,
}

fn evaluate(table: Option<&Path>, pairs: Option<&Path>, alpha: Option<f64>) -> CliResult<Output> {
    if let Some(path) = pairs {
        let mut req: WilcoxonRequest = parse_json(&read(path)?)?;
        if alpha.is_some() {
            req.alpha = alpha;
        }
        let result = req.run()?;
        return Ok(Output::new(&result, wilcoxon_text(&result), None));
    }
    let Some(path) = table else {
        return Err(CliError::Usage("supply --table or --pairs".into()));
    };
    let rows = parse_projects_csv(&read(path)?)?;
    // A table that pairs up by project also gets the before/after test.
    let comparison = match split_snapshots(&rows) {
        Ok((before, after)) if !before.is_empty() => Some(compare_snapshots(&before, &after, alpha)?),
        _ => None,
    };
    let text = match &comparison {
        Some(c) => c.to_text(),
        None => productivity_table_text(&rows),
    };
    let doc = Evaluation {
        projects: &rows,
        comparison,
    };
    Ok(Output::new(&doc, text, Some(productivity_table_csv(&rows))))
}

fn wilcoxon_text(r: &WilcoxonResult) -> String {
    let mut s = format!(
        "n = {} ({} non-zero), W+ = {}, W- = {}, W = {}\np = {:.6} ({:?}{})\n",
        r.n_pairs,
        r.n_effective,
        r.w_plus,
        r.w_minus,
        r.statistic,
        r.p_value,
        r.method,
        if r.ties { ", ties" } else { "" }
    );
    if let (Some(alpha), Some(sig)) = (r.alpha, r.significant) {
        s += &format!("{} at alpha = {alpha}\n", if sig { "significant" } else { "not significant" });
    }
    s += &format!("{}\n", r.conventions);
    s
}
