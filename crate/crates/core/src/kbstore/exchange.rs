//! Prefix-notation fact files, one fact per line:
//!
//! ```text
//! is_an_instance_of (1993-036BLP, Orbital Debris Fragment)
//! has_altitude (1993-036BLP, 934 km)
//! has_label (1993-036BLP, "1993-036BLP")
//! has_orbital_parameter (O1, O1#inclination, 2009-02-10T00:00:00Z)
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use super::kb::{Fact, FactKind, KbError, KnowledgeBase};
use super::value::{TimeRef, Value};
use crate::ontology::{Schema, TermId, INSTANCE_OF};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExchangeError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Kb { line: usize, source: KbError },
}

/// Renders one fact in prefix notation.
pub fn format_fact(fact: &Fact) -> String {
    let mut out = String::new();
    match &fact.kind {
        FactKind::Instance { subject, category } => {
            let _ = write!(out, "{INSTANCE_OF} ({subject}, {category}");
        }
        FactKind::Relation {
            predicate,
            subject,
            object,
        } => {
            let _ = write!(out, "{predicate} ({subject}, {object}");
        }
    }
    if let Some(at) = &fact.at {
        let _ = write!(out, ", {at}");
    }
    out.push(')');
    out
}

/// Renders one fact as a `subject, predicate, object, at` TSV row.
pub fn format_tsv_row(fact: &Fact) -> String {
    let object = match &fact.kind {
        FactKind::Instance { category, .. } => category.to_string(),
        FactKind::Relation { object, .. } => object.to_string(),
    };
    let at = fact.at.as_ref().map(|t| t.token()).unwrap_or("");
    format!(
        "{}\t{}\t{}\t{}",
        fact.subject(),
        fact.predicate(),
        object,
        at
    )
}

/// Splits `a, "b, c", d` on commas outside double quotes.
fn split_args(inner: &str) -> Result<Vec<&str>, String> {
    let mut args = Vec::new();
    let mut start = 0;
    let mut in_quote = false;
    let mut escaped = false;
    for (i, c) in inner.char_indices() {
        if escaped {
            escaped = false;
            continue;
        }
        match c {
            '\\' if in_quote => escaped = true,
            '"' => in_quote = !in_quote,
            '\u{201c}' => in_quote = true,
            '\u{201d}' => in_quote = false,
            ',' if !in_quote => {
                args.push(inner[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    if in_quote {
        return Err("unterminated quoted text".into());
    }
    args.push(inner[start..].trim());
    Ok(args)
}

/// Parses one prefix-notation line into a fact. The schema decides how the
/// object argument is read (individual, text, quantity or time).
pub fn parse_fact(schema: &Schema, line: &str) -> Result<Fact, String> {
    let line = line.trim();
    let open = line.find('(').ok_or("expected '('")?;
    let inner = line[open + 1..]
        .strip_suffix(')')
        .ok_or("expected ')' at end of line")?;
    let predicate = line[..open].trim();
    let args = split_args(inner)?;
    if args.len() != 2 && args.len() != 3 {
        return Err(format!("expected 2 or 3 arguments, got {}", args.len()));
    }
    let subject = args[0];
    crate::ontology::check_name(subject).map_err(|e| e.to_string())?;
    let at = match args.get(2) {
        Some(t) => Some(TimeRef::new(t).map_err(|e| e.to_string())?),
        None => None,
    };
    let kind = if predicate == INSTANCE_OF {
        FactKind::Instance {
            subject: subject.to_string(),
            category: TermId::new(args[1]).map_err(|e| e.to_string())?,
        }
    } else {
        let def = schema
            .relation(predicate)
            .ok_or_else(|| format!("UnknownPredicate: {predicate:?}"))?;
        FactKind::Relation {
            predicate: def.id.clone(),
            subject: subject.to_string(),
            object: Value::parse_for(args[1], &def.range).map_err(|e| e.to_string())?,
        }
    };
    Ok(Fact { kind, at })
}

/// Every fact in ingest order, one per line.
pub fn export_odo(kb: &KnowledgeBase) -> String {
    let mut out = String::new();
    for a in kb.assertions() {
        out.push_str(&format_fact(&a.fact));
        out.push('\n');
    }
    out
}

/// Every fact in ingest order as `subject, predicate, object, at` rows.
pub fn export_tsv(kb: &KnowledgeBase) -> String {
    let mut out = String::new();
    for a in kb.assertions() {
        out.push_str(&format_tsv_row(&a.fact));
        out.push('\n');
    }
    out
}

/// Asserts every fact in `text` into `kb` under the KB's current source id.
/// Blank lines and `#` comments are skipped. Stops at the first bad line.
pub fn import_odo(kb: &mut KnowledgeBase, text: &str) -> Result<usize, ExchangeError> {
    let mut count = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fact = parse_fact(kb.schema(), line).map_err(|message| ExchangeError::Syntax {
            line: idx + 1,
            message,
        })?;
        let prov = kb.provenance(false);
        kb.insert_checked(fact, prov)
            .map_err(|source| ExchangeError::Kb {
                line: idx + 1,
                source,
            })?;
        count += 1;
    }
    Ok(count)
}
