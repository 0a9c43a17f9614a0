//! `odo`: command-line front end for the orbital debris knowledge base.
//!
//! Exit status: 0 success, 1 domain error, 2 usage error, 3 `validate`
//! found violations.

mod workspace;

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use odo_kb::federation::{
    merge_hub, read_catalog, sync_peer, write_catalog, ConflictRule, IdentityKey, MergePolicy,
    SchemaRule,
};
use odo_kb::kbstore::{
    export_odo, export_tsv, format_fact, format_tsv_row, parse_fact, Pattern, Quantity, TimeRef,
    Value,
};
use odo_kb::ontology::{RangeKind, INSTANCE_OF};
use odo_kb::reason::{classify_size, validate, violations_tsv};
use odo_kb::tle::{annotate_tle, read_tle_file, resolve_subject, ReadMode};

use workspace::Config;

#[derive(Parser)]
#[command(name = "odo", version, about = "Orbital debris knowledge base")]
struct Cli {
    /// KB directory holding schema.odo and facts.odo.
    #[arg(long, global = true, value_name = "DIR")]
    kb: Option<PathBuf>,
    /// Schema file; repeatable, later files override earlier terms.
    #[arg(long = "schema", global = true, value_name = "FILE")]
    schemas: Vec<PathBuf>,
    /// Include the bundled seed schema.
    #[arg(long, global = true)]
    seed: bool,
    /// Alternative location of the seed schema.
    #[arg(long, env = "ODO_SEED_PATH", hide = true)]
    seed_path: Option<PathBuf>,
    /// Reject facts whose subject is typed outside the relation's domain.
    #[arg(long, global = true)]
    strict: bool,
    /// Materialize types, closures and skolem individuals after loading.
    #[arg(long, global = true)]
    materialize: bool,
    /// Conflict rule for time-indexed facts when merging.
    #[arg(long, global = true, value_enum, default_value_t = PolicyArg::Latest)]
    policy: PolicyArg,
    /// Output format; defaults to tsv for query, odo for export.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Latest,
    KeepAll,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Tsv,
    Odo,
}

#[derive(Clone, Copy, ValueEnum)]
enum KeyArg {
    Designator,
    CatalogNumber,
    ExactId,
}

#[derive(Subcommand)]
enum Command {
    /// Report schema defects as term, rule, detail rows.
    SchemaCheck,
    /// Add facts in prefix notation to the KB.
    Assert {
        facts: Vec<String>,
        /// Read facts from a file, one per line.
        #[arg(long, value_name = "FILE")]
        file: Option<PathBuf>,
    },
    /// Annotate the element sets of a TLE file into the KB.
    IngestTle {
        #[arg(long, value_name = "FILE")]
        file: PathBuf,
        /// Attach every entry to this individual instead of resolving by
        /// designator or catalog number.
        #[arg(long)]
        subject: Option<String>,
        /// Skip malformed entries instead of failing.
        #[arg(long)]
        lenient: bool,
    },
    /// Print facts matching a pattern; omitted slots are wildcards.
    Query {
        #[arg(long)]
        subject: Option<String>,
        #[arg(long)]
        predicate: Option<String>,
        #[arg(long)]
        object: Option<String>,
        #[arg(long)]
        at: Option<String>,
    },
    /// Check the orbit and schema axioms; exits 3 when violations exist.
    Validate,
    /// Size class of one individual, or of every individual with a diameter.
    Classify {
        #[arg(long)]
        subject: Option<String>,
    },
    /// Merge catalog directories into a master, or sync two peers.
    Merge {
        #[arg(long = "catalog", value_name = "DIR", required = true)]
        catalogs: Vec<PathBuf>,
        /// Directory receiving <source_id>/ outputs.
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        /// Identity keys in order of preference.
        #[arg(long = "key", value_enum, value_delimiter = ',')]
        keys: Vec<KeyArg>,
        #[arg(long)]
        require_identical_schemas: bool,
        /// Sync exactly two catalogs as peers instead of building a master.
        #[arg(long)]
        peer: bool,
    },
    /// Print every fact of the KB.
    Export,
}

#[derive(Debug)]
struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

impl Cli {
    fn config(&self) -> Config {
        Config {
            kb_dir: self.kb.clone(),
            schema_paths: self.schemas.clone(),
            seed: self.seed,
            seed_path: self.seed_path.clone(),
            strict: self.strict,
            materialize: self.materialize,
        }
    }

    fn require_kb(&self) -> Result<()> {
        if self.kb.is_none() {
            return Err(usage("this command needs --kb <DIR>"));
        }
        Ok(())
    }

    fn policy(&self, keys: &[KeyArg], require_identical: bool) -> Result<MergePolicy> {
        let keys = if keys.is_empty() {
            MergePolicy::default().identity_keys().to_vec()
        } else {
            keys.iter()
                .map(|k| match k {
                    KeyArg::Designator => IdentityKey::InternationalDesignator,
                    KeyArg::CatalogNumber => IdentityKey::CatalogNumber,
                    KeyArg::ExactId => IdentityKey::ExactId,
                })
                .collect()
        };
        let conflict = match self.policy {
            PolicyArg::Latest => ConflictRule::LatestEpochWins,
            PolicyArg::KeepAll => ConflictRule::KeepAll,
        };
        let schema = if require_identical {
            SchemaRule::RequireIdentical
        } else {
            SchemaRule::UnionWithDefectReport
        };
        Ok(MergePolicy::new(keys, conflict, schema)?)
    }
}

/// Reads a query object: by the predicate's range when known, else quoted
/// text, a quantity, or an individual.
fn parse_object(kb: &odo_kb::KnowledgeBase, predicate: Option<&str>, raw: &str) -> Result<Value> {
    if let Some(def) = predicate.and_then(|p| kb.schema().relation(p)) {
        return Ok(Value::parse_for(raw, &def.range)?);
    }
    let raw = raw.trim();
    if raw.starts_with('"') || raw.starts_with('\u{201c}') {
        return Ok(Value::parse_for(raw, &RangeKind::Text)?);
    }
    if let Ok(q) = raw.parse::<Quantity>() {
        return Ok(Value::Quantity(q));
    }
    Ok(Value::individual(raw)?)
}

fn warn_all(kb: &odo_kb::KnowledgeBase, from: usize) {
    for w in &kb.warnings()[from..] {
        eprintln!("warning: {w}");
    }
}

fn run(cli: &Cli, out: &mut String) -> Result<u8> {
    let config = cli.config();
    match &cli.command {
        Command::SchemaCheck => {
            let (schema, _) = config.schema()?;
            let defects = schema.check();
            for d in &defects {
                out.push_str(&format!("{d}\n"));
            }
            if !defects.is_empty() {
                eprintln!("error: SchemaDefect: {} defect(s)", defects.len());
                return Ok(1);
            }
        }
        Command::Assert { facts, file } => {
            cli.require_kb()?;
            let mut lines: Vec<String> = facts.clone();
            if let Some(path) = file {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("cannot read {}", path.display()))?;
                lines.extend(
                    text.lines()
                        .map(str::trim)
                        .filter(|l| !l.is_empty() && !l.starts_with('#'))
                        .map(String::from),
                );
            }
            if lines.is_empty() {
                return Err(usage("assert needs facts as arguments or --file"));
            }
            let mut ws = config.load()?;
            let before = ws.kb.warnings().len();
            for line in &lines {
                let fact = parse_fact(ws.kb.schema(), line)
                    .map_err(|m| anyhow::anyhow!("{m}"))
                    .with_context(|| format!("in {line:?}"))?;
                ws.kb
                    .assert_fact(fact.clone())
                    .with_context(|| format!("in {line:?}"))?;
                out.push_str(&format!("{}\n", format_fact(&fact)));
            }
            warn_all(&ws.kb, before);
            ws.save()?;
        }
        Command::IngestTle {
            file,
            subject,
            lenient,
        } => {
            cli.require_kb()?;
            let text = fs::read_to_string(file)
                .with_context(|| format!("cannot read {}", file.display()))?;
            let mode = if *lenient {
                ReadMode::Lenient
            } else {
                ReadMode::Strict
            };
            let parsed = read_tle_file(&text, mode)
                .with_context(|| format!("TleError: {}", file.display()))?;
            for d in &parsed.diagnostics {
                eprintln!("warning: {}: {d}", file.display());
            }
            let mut ws = config.load()?;
            let before = ws.kb.warnings().len();
            for entry in &parsed.entries {
                let target = match subject {
                    Some(s) => s.clone(),
                    None => resolve_subject(&ws.kb, &entry.record),
                };
                let ann = annotate_tle(&mut ws.kb, &entry.record, &target)?;
                out.push_str(&format!(
                    "{target}\t{}\t{}\t{}\n",
                    ann.orbit,
                    ann.element_set,
                    ann.epoch.token()
                ));
            }
            warn_all(&ws.kb, before);
            if cli.materialize {
                workspace::materialize(&mut ws.kb)?;
            }
            ws.save()?;
        }
        Command::Query {
            subject,
            predicate,
            object,
            at,
        } => {
            cli.require_kb()?;
            let ws = config.load()?;
            let mut pattern = Pattern::any();
            if let Some(s) = subject {
                pattern = pattern.subject(s);
            }
            if let Some(p) = predicate {
                if p != INSTANCE_OF && ws.kb.schema().relation(p).is_none() {
                    return Err(anyhow::anyhow!("UnknownPredicate: {p:?}"));
                }
                pattern = pattern.predicate(p);
            }
            if let Some(o) = object {
                pattern = pattern.object(parse_object(&ws.kb, predicate.as_deref(), o)?);
            }
            if let Some(t) = at {
                pattern = pattern.at(TimeRef::new(t)?);
            }
            let format = cli.format.unwrap_or(Format::Tsv);
            for a in ws.kb.query(&pattern) {
                let line = match format {
                    Format::Tsv => format_tsv_row(&a.fact),
                    Format::Odo => format_fact(&a.fact),
                };
                out.push_str(&line);
                out.push('\n');
            }
        }
        Command::Validate => {
            cli.require_kb()?;
            let ws = config.load()?;
            let violations = validate(&ws.kb);
            out.push_str(&violations_tsv(&violations));
            if !violations.is_empty() {
                return Ok(3);
            }
        }
        Command::Classify { subject } => {
            cli.require_kb()?;
            let ws = config.load()?;
            let subjects: Vec<String> = match subject {
                Some(s) => vec![s.clone()],
                None => {
                    let mut v: Vec<String> = ws
                        .kb
                        .query(&Pattern::any().predicate(odo_kb::ontology::terms::HAS_DIAMETER))
                        .iter()
                        .map(|a| a.fact.subject().to_string())
                        .collect();
                    v.sort();
                    v.dedup();
                    v
                }
            };
            for s in subjects {
                let class = classify_size(&ws.kb, &s)?;
                let name = class.map(|c| c.as_str()).unwrap_or("none");
                out.push_str(&format!("{s}\t{name}\n"));
            }
        }
        Command::Merge {
            catalogs,
            out: out_dir,
            keys,
            require_identical_schemas,
            peer,
        } => {
            let policy = cli.policy(keys, *require_identical_schemas)?;
            let loaded = catalogs
                .iter()
                .map(|d| read_catalog(d))
                .collect::<Result<Vec<_>, _>>()?;
            if *peer {
                let [a, b] = loaded.as_slice() else {
                    return Err(usage("--peer needs exactly two --catalog directories"));
                };
                let (a2, b2) = sync_peer(a, b, &policy)?;
                for c in [&a2, &b2] {
                    let dir = write_catalog(out_dir, c)?;
                    out.push_str(&format!(
                        "{}\t{}\t{}\n",
                        c.source_id(),
                        c.kb().len(),
                        dir.display()
                    ));
                }
            } else {
                let outcome = merge_hub(&loaded, &policy)?;
                for d in &outcome.schema_defects {
                    eprintln!("warning: schema: {d}");
                }
                let dir = write_catalog(out_dir, &outcome.master)?;
                out.push_str(&format!(
                    "{}\t{}\t{}\n",
                    outcome.master.source_id(),
                    outcome.master.kb().len(),
                    dir.display()
                ));
            }
        }
        Command::Export => {
            cli.require_kb()?;
            let ws = config.load()?;
            match cli.format.unwrap_or(Format::Odo) {
                Format::Odo => out.push_str(&export_odo(&ws.kb)),
                Format::Tsv => out.push_str(&export_tsv(&ws.kb)),
            }
        }
    }
    Ok(0)
}

/// One line per error; causes already quoted by their wrapper are skipped.
fn render_chain(e: &anyhow::Error) -> String {
    let mut line = String::new();
    for cause in e.chain() {
        let msg = cause.to_string();
        if !line.contains(&msg) {
            if !line.is_empty() {
                line.push_str(": ");
            }
            line.push_str(&msg);
        }
    }
    line
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let mut out = String::new();
    let code = match run(&cli, &mut out) {
        Ok(code) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.as_bytes());
            let _ = stdout.flush();
            code
        }
        Err(e) => {
            eprintln!("error: {}", render_chain(&e));
            if e.is::<UsageError>() {
                2
            } else {
                1
            }
        }
    };
    ExitCode::from(code)
}
