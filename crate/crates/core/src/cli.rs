//! The `oag` command line: argument parsing, structure binding, report
//! output and the corpus runner.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use crate::lab::{
    check_bci, check_dci, compactness_certificate, completeness_audit, extract_subcover, family_audit,
    uniform_continuity_check, AuditRole, DefinableFamily, LabError, Report,
};
use crate::logic::Var;
use crate::parser::{parse_formula, ParseError};
use crate::qe::{Limits, QeEngine, QeError};
use crate::scalar::Scalar;
use crate::sets::{normalize_with, the_variable};
use crate::structure::StructureSpec;

pub const EXIT_TRUE: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "oag", version, about = "Decide first-order sentences over densely ordered abelian groups and run continuous-induction checks")]
pub struct Cli {
    /// Structure file, or one of the built-ins `Q`, `Q_<n>` (e.g. `Q_3`) and `Q_sqrt2_cut`.
    #[arg(long, global = true, default_value = "Q")]
    pub structure: String,
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    /// Cap on formula size during elimination.
    #[arg(long, global = true, default_value_t = crate::qe::DEFAULT_MAX_NODES)]
    pub max_nodes: usize,
    /// Cap on subcover sweep steps.
    #[arg(long, global = true, default_value_t = 10_000)]
    pub max_steps: usize,
    /// Cap on the size of discrete-range predicates.
    #[arg(long, global = true)]
    pub range_cap: Option<u32>,
    /// Recorded in every report.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Report `timing_ms` as 0, for byte-identical output across runs.
    #[arg(long, global = true)]
    pub no_timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    /// Family formula phi(param, point).
    #[arg(long)]
    pub family: String,
    #[arg(long, default_value = "a")]
    pub param: String,
    #[arg(long, default_value = "x")]
    pub point: String,
}

#[derive(Debug, Args)]
pub struct IntervalArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub from: Scalar,
    #[arg(long, allow_hyphen_values = true)]
    pub to: Scalar,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide a sentence.
    Decide { formula: String },
    /// Decide the definable continuous induction instance of a formula.
    Dci {
        #[arg(long, default_value = "v")]
        var: String,
        formula: String,
    },
    /// Decide the bounded induction instance on [from, to).
    Bci {
        #[arg(long, default_value = "v")]
        var: String,
        #[command(flatten)]
        interval: IntervalArgs,
        formula: String,
    },
    /// Cut analysis of a one-variable formula.
    Gap { formula: String },
    /// Canonical definable set of a one-variable formula and its pseudo-finiteness.
    Set { formula: String },
    /// Extract a finite subcover of [from, to] from an open cover.
    Subcover {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        interval: IntervalArgs,
    },
    /// Find a fiber of an exhaustion holding a finite subcover.
    Compact {
        #[command(flatten)]
        family: FamilyArgs,
        /// Exhaustion formula psi(index, point), sharing the family's point variable.
        #[arg(long)]
        exhaustion: String,
        #[arg(long, default_value = "t")]
        index: String,
        #[command(flatten)]
        interval: IntervalArgs,
    },
    /// Continuity and uniform continuity of a definable function on [from, to].
    Ucont {
        #[arg(long, default_value = "x")]
        x: String,
        #[arg(long, default_value = "y")]
        y: String,
        #[command(flatten)]
        interval: IntervalArgs,
        graph: String,
    },
    /// Audit a family as an open cover of [from, to], or as an exhaustion.
    Audit {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, allow_hyphen_values = true, requires = "to")]
        from: Option<Scalar>,
        #[arg(long, allow_hyphen_values = true, requires = "from")]
        to: Option<Scalar>,
    },
    /// Run every `.fml` file of a corpus directory.
    Corpus { dir: PathBuf },
}

/// Resolves a `--structure` value: an existing file, else a built-in name.
pub fn resolve_structure(name: &str, relative_to: Option<&Path>) -> Result<StructureSpec, String> {
    let candidates = [relative_to.map(|d| d.join(name)), Some(PathBuf::from(name))];
    for path in candidates.into_iter().flatten() {
        if path.is_file() {
            return StructureSpec::load(&path).map_err(|e| e.to_string());
        }
    }
    match name {
        "Q" => Ok(StructureSpec::rationals()),
        "Q_sqrt2_cut" => Ok(StructureSpec::sqrt2_cut()),
        other => match other.strip_prefix("Q_").map(str::parse::<u32>) {
            Some(Ok(n)) => StructureSpec::q_n(n).map_err(|e| e.to_string()),
            _ => Err(format!("no structure file or built-in named `{other}`")),
        },
    }
}

/// Outcome of one command.
pub enum Outcome {
    Report(Report),
    Error(String),
    Resource(String),
}

fn parse(text: &str) -> Result<crate::logic::Formula, String> {
    parse_formula(text).map_err(|e: ParseError| format!("parse error at line {}, column {}: {}", e.span.line, e.span.column, e.message))
}

fn lab_outcome(r: Result<Report, LabError>) -> Outcome {
    match r {
        Ok(rep) => Outcome::Report(rep),
        Err(e) if e.is_resource_limit() => Outcome::Resource(e.to_string()),
        Err(LabError::AuditFailed(audit)) => {
            let mut rep = audit.to_report();
            rep.check = "subcover".into();
            rep.verdict = json!("audit_failed");
            Outcome::Report(rep)
        }
        Err(e) => Outcome::Error(e.to_string()),
    }
}

fn qe_outcome(e: QeError) -> Outcome {
    match e {
        QeError::ResourceLimit { .. } => Outcome::Resource(e.to_string()),
        other => Outcome::Error(other.to_string()),
    }
}

fn family(args: &FamilyArgs) -> Result<DefinableFamily, String> {
    DefinableFamily::new(parse(&args.family)?, args.param.as_str(), args.point.as_str()).map_err(|e| e.to_string())
}

/// Runs one non-corpus command against a bound engine.
pub fn run_command(command: &Command, engine: &QeEngine<'_>) -> Outcome {
    let structure = engine.structure().id().to_string();
    let body = || -> Result<Outcome, String> {
        Ok(match command {
            Command::Decide { formula } => {
                let f = parse(formula)?;
                let start = Instant::now();
                match engine.decide(&f) {
                    Ok(v) => {
                        let mut r = Report::new("decide", &structure, f.to_string(), v);
                        r.timing_ms = start.elapsed().as_millis() as u64;
                        Outcome::Report(r)
                    }
                    Err(e) => qe_outcome(e),
                }
            }
            Command::Dci { var, formula } => {
                lab_outcome(check_dci(&parse(formula)?, &Var::new(var.as_str()), engine).map(|r| r.to_report()))
            }
            Command::Bci { var, interval, formula } => lab_outcome(
                check_bci(&parse(formula)?, &Var::new(var.as_str()), &interval.from, &interval.to, engine).map(|r| r.to_report()),
            ),
            Command::Gap { formula } => lab_outcome(completeness_audit(&parse(formula)?, engine).map(|r| r.to_report())),
            Command::Set { formula } => {
                let f = parse(formula)?;
                let start = Instant::now();
                match normalize_with(&f, engine) {
                    Ok(set) => {
                        let pf = set.is_pseudo_finite();
                        let mut r = Report::new("set", &structure, f.to_string(), pf.verdict);
                        r.components = Some(set.components().iter().map(|c| c.to_string()).collect());
                        r.witness = Some(json!({
                            "set": set.to_string(),
                            "discrete": pf.discrete,
                            "closed": pf.closed,
                            "bounded": pf.bounded,
                            "finite": set.as_points().is_some(),
                        }));
                        r.timing_ms = start.elapsed().as_millis() as u64;
                        Outcome::Report(r)
                    }
                    Err(e) => qe_outcome(e),
                }
            }
            Command::Subcover { family: fam, interval } => {
                lab_outcome(extract_subcover(&family(fam)?, &interval.from, &interval.to, engine).map(|c| c.to_report()))
            }
            Command::Compact { family: fam, exhaustion, index, interval } => {
                let fam = family(fam)?;
                let psi = DefinableFamily::new(parse(exhaustion)?, index.as_str(), fam.point().clone()).map_err(|e| e.to_string())?;
                let start = Instant::now();
                lab_outcome(compactness_certificate(&fam, &psi, &interval.from, &interval.to, engine).map(|o| {
                    let mut r = o.to_report(&psi);
                    r.timing_ms = start.elapsed().as_millis() as u64;
                    r
                }))
            }
            Command::Ucont { x, y, interval, graph } => lab_outcome(
                uniform_continuity_check(&parse(graph)?, &Var::new(x.as_str()), &Var::new(y.as_str()), &interval.from, &interval.to, engine)
                    .map(|r| r.to_report()),
            ),
            Command::Audit { family: fam, from, to } => {
                let role = match (from, to) {
                    (Some(a), Some(b)) => AuditRole::OpenCover { a: a.clone(), b: b.clone() },
                    _ => AuditRole::Exhaustion,
                };
                lab_outcome(family_audit(&family(fam)?, &role, engine).map(|a| a.to_report()))
            }
            Command::Corpus { .. } => Outcome::Error("nested corpus run".into()),
        })
    };
    body().unwrap_or_else(Outcome::Error)
}

/// Exit code of a single-command outcome. Resource limits count as errors
/// here; only the corpus runner reports them separately.
pub fn exit_code(outcome: &Outcome) -> i32 {
    match outcome {
        Outcome::Report(r) if r.verdict_is_true() => EXIT_TRUE,
        Outcome::Report(_) => EXIT_FALSE,
        Outcome::Error(_) | Outcome::Resource(_) => EXIT_ERROR,
    }
}

/// One declared check of a corpus file. A file starts with one or more
/// header lines `#! check key=value ... expect=VERDICT`, followed by the
/// formula; each header line is a separate entry. Values containing
/// spaces are double-quoted.
#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub path: PathBuf,
    /// Position of the header line within its file.
    pub index: usize,
    pub check: String,
    pub options: Vec<(String, String)>,
    pub expect: String,
    pub formula: String,
}

/// Splits a header on whitespace, keeping double-quoted runs together.
fn header_words(line: &str) -> Result<Vec<String>, String> {
    let mut words = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    for c in line.chars() {
        match c {
            '"' => quoted = !quoted,
            c if c.is_whitespace() && !quoted => {
                if !cur.is_empty() {
                    words.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if quoted {
        return Err("unterminated quote".into());
    }
    if !cur.is_empty() {
        words.push(cur);
    }
    Ok(words)
}

impl CorpusEntry {
    /// All entries declared by one file.
    pub fn parse_file(path: &Path, text: &str) -> Result<Vec<CorpusEntry>, String> {
        let err = |m: String| format!("{}: {m}", path.display());
        let headers: Vec<&str> = text.lines().map_while(|l| l.strip_prefix("#!")).collect();
        if headers.is_empty() {
            return Err(err("first line must be a `#!` header".into()));
        }
        let formula = text.lines().skip(headers.len()).collect::<Vec<_>>().join("\n").trim().to_string();
        let mut out = Vec::new();
        for (index, header) in headers.into_iter().enumerate() {
            let words = header_words(header).map_err(err)?;
            let (check, fields) = words.split_first().ok_or_else(|| err("header names no check".into()))?;
            let mut options = Vec::new();
            let mut expect = None;
            for w in fields {
                let (k, v) = w.split_once('=').ok_or_else(|| err(format!("bad header field `{w}`")))?;
                if k == "expect" {
                    expect = Some(v.to_string());
                } else {
                    options.push((k.to_string(), v.to_string()));
                }
            }
            let expect = expect.ok_or_else(|| err("header has no expect=".into()))?;
            out.push(CorpusEntry { path: path.to_path_buf(), index, check: check.clone(), options, expect, formula: formula.clone() });
        }
        Ok(out)
    }

    /// `file.fml`, or `file.fml#k` for the k-th check of a file with several.
    pub fn name(&self) -> String {
        let file = self.path.file_name().and_then(|n| n.to_str()).unwrap_or("?");
        if self.index == 0 {
            file.to_string()
        } else {
            format!("{file}#{}", self.index)
        }
    }

    pub fn option(&self, key: &str) -> Option<&str> {
        self.options.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn scalar(&self, key: &str) -> Result<Scalar, String> {
        self.option(key)
            .ok_or_else(|| format!("missing {key}="))?
            .parse()
            .map_err(|e: crate::scalar::ScalarError| e.to_string())
    }

    fn interval(&self) -> Result<IntervalArgs, String> {
        Ok(IntervalArgs { from: self.scalar("from")?, to: self.scalar("to")? })
    }

    fn family(&self) -> FamilyArgs {
        FamilyArgs {
            family: self.formula.clone(),
            param: self.option("param").unwrap_or("a").to_string(),
            point: self.option("point").unwrap_or("x").to_string(),
        }
    }

    /// The command this entry runs.
    pub fn command(&self) -> Result<Command, String> {
        let f = self.formula.clone();
        let var = self.option("var").unwrap_or("v").to_string();
        Ok(match self.check.as_str() {
            "decide" => Command::Decide { formula: f },
            "dci" => Command::Dci { var, formula: f },
            "bci" => Command::Bci { var, interval: self.interval()?, formula: f },
            "gap" => Command::Gap { formula: f },
            "set" => Command::Set { formula: f },
            "subcover" => Command::Subcover { family: self.family(), interval: self.interval()? },
            "compact" => Command::Compact {
                family: self.family(),
                exhaustion: self.option("exhaustion").ok_or("missing exhaustion=")?.to_string(),
                index: self.option("index").unwrap_or("t").to_string(),
                interval: self.interval()?,
            },
            "ucont" => Command::Ucont {
                x: self.option("x").unwrap_or("x").to_string(),
                y: self.option("y").unwrap_or("y").to_string(),
                interval: self.interval()?,
                graph: f,
            },
            "audit" => Command::Audit {
                family: self.family(),
                from: self.option("from").map(|_| self.scalar("from")).transpose()?,
                to: self.option("to").map(|_| self.scalar("to")).transpose()?,
            },
            other => return Err(format!("unknown check `{other}`")),
        })
    }
}

/// Result of one corpus entry.
pub struct CorpusResult {
    pub entry: CorpusEntry,
    pub outcome: Outcome,
    pub passed: bool,
}

/// Loads every `.fml` file in `dir`, sorted by name.
pub fn load_corpus(dir: &Path) -> Result<Vec<CorpusEntry>, String> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| format!("{}: {e}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "fml"))
        .collect();
    paths.sort();
    let mut out = Vec::new();
    for p in &paths {
        let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
        out.extend(CorpusEntry::parse_file(p, &text)?);
    }
    Ok(out)
}

/// Runs entries in parallel; results come back in input order.
pub fn run_corpus(entries: &[CorpusEntry], default_structure: &str, limits: Limits, range_cap: Option<u32>) -> Vec<CorpusResult> {
    entries
        .par_iter()
        .map(|entry| {
            let outcome = (|| -> Result<Outcome, String> {
                let dir = entry.path.parent();
                let mut s = resolve_structure(entry.option("structure").unwrap_or(default_structure), dir)?;
                if let Some(cap) = range_cap {
                    s = s.with_range_cap(cap);
                }
                let engine = QeEngine::new(&s).with_limits(limits);
                Ok(run_command(&entry.command()?, &engine))
            })()
            .unwrap_or_else(Outcome::Error);
            let passed = matches!(&outcome, Outcome::Report(r) if r.verdict_text() == entry.expect);
            CorpusResult { entry: entry.clone(), outcome, passed }
        })
        .collect()
}

fn render(outcome: &Outcome, cli: &Cli) -> String {
    match outcome {
        Outcome::Report(r) => {
            let mut r = r.clone();
            r.seed = cli.seed;
            if cli.no_timing {
                r.timing_ms = 0;
            }
            match cli.format {
                Format::Json => r.to_json(),
                Format::Text => r.to_text(),
            }
        }
        Outcome::Error(e) | Outcome::Resource(e) => match cli.format {
            Format::Json => json!({ "error": e, "seed": cli.seed }).to_string(),
            Format::Text => format!("error: {e}"),
        },
    }
}

/// Runs the command line; returns the exit code, stdout and stderr text.
pub fn run(cli: &Cli) -> (i32, String, String) {
    let limits = Limits { max_nodes: cli.max_nodes, max_steps: cli.max_steps };
    if limits.max_nodes == 0 || limits.max_steps == 0 {
        return (EXIT_ERROR, String::new(), "error: caps must be positive\n".into());
    }
    if let Command::Corpus { dir } = &cli.command {
        return run_corpus_command(cli, dir, limits);
    }
    let structure = match resolve_structure(&cli.structure, None) {
        Ok(s) => match cli.range_cap {
            Some(cap) => s.with_range_cap(cap),
            None => s,
        },
        Err(e) => return (EXIT_ERROR, String::new(), format!("error: {e}\n")),
    };
    let engine = QeEngine::new(&structure).with_limits(limits);
    let outcome = run_command(&cli.command, &engine);
    let code = exit_code(&outcome);
    let text = render(&outcome, cli) + "\n";
    match outcome {
        Outcome::Report(_) => (code, text, String::new()),
        _ => (code, String::new(), text),
    }
}

fn run_corpus_command(cli: &Cli, dir: &Path, limits: Limits) -> (i32, String, String) {
    let entries = match load_corpus(dir) {
        Ok(e) => e,
        Err(e) => return (EXIT_ERROR, String::new(), format!("error: {e}\n")),
    };
    if entries.is_empty() {
        return (EXIT_ERROR, String::new(), format!("error: no .fml files in {}\n", dir.display()));
    }
    let results = run_corpus(&entries, &cli.structure, limits, cli.range_cap);
    let mut out = String::new();
    let (mut passed, mut failed, mut errors, mut resource) = (0, 0, 0, Vec::new());
    for r in &results {
        let name = r.entry.name();
        let status = match &r.outcome {
            _ if r.passed => {
                passed += 1;
                "PASS"
            }
            Outcome::Resource(_) => {
                resource.push(name.clone());
                "LIMIT"
            }
            Outcome::Error(_) => {
                errors += 1;
                "ERROR"
            }
            Outcome::Report(_) => {
                failed += 1;
                "FAIL"
            }
        };
        match cli.format {
            Format::Json => {
                let body: serde_json::Value = serde_json::from_str(&render(&r.outcome, cli)).expect("rendered json");
                let line = json!({ "file": name, "status": status, "expect": r.entry.expect, "result": body });
                writeln!(out, "{line}").expect("write to string");
            }
            Format::Text => {
                let got = match &r.outcome {
                    Outcome::Report(rep) => rep.verdict_text(),
                    Outcome::Error(e) | Outcome::Resource(e) => e.clone(),
                };
                writeln!(out, "{status} {name}: expected {}, got {got}", r.entry.expect).expect("write to string");
            }
        }
    }
    let summary = json!({
        "total": results.len(),
        "passed": passed,
        "failed": failed,
        "errors": errors,
        "resource_limited": resource,
        "seed": cli.seed,
    });
    match cli.format {
        Format::Json => writeln!(out, "{summary}").expect("write to string"),
        Format::Text => writeln!(
            out,
            "{} entries: {passed} passed, {failed} failed, {errors} errors, {} over resource limits",
            results.len(),
            resource.len()
        )
        .expect("write to string"),
    }
    let code = if !resource.is_empty() {
        EXIT_RESOURCE
    } else if failed + errors > 0 {
        EXIT_FALSE
    } else {
        EXIT_TRUE
    };
    (code, out, String::new())
}

/// Resolves the single free variable, for callers that accept formulas
/// whose variable cancelled.
pub fn variable_of(text: &str) -> Result<Var, String> {
    the_variable(&parse(text)?).map_err(|e| e.to_string())
}
