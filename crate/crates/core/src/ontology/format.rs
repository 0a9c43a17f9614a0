//! Line-oriented schema files.
//!
//! ```text
//! category: Orbital Debris is_a: Space Debris def: "Debris in Earth orbit"
//! relation: part_of arity: 2 domain: Physical Object range: Physical Object props: transitive
//! ```
//!
//! Declarations may refer to terms declared later in the file; references
//! are resolved after all lines are read.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::schema::{CategoryDef, RangeKind, RelationDef, RelationProperty, Schema};
use super::term::{TermError, TermId};

/// A line's name followed by its `(key, value)` fields.
type Fields<'a> = (&'a str, Vec<(&'static str, &'a str)>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct SchemaFileError {
    pub line: usize,
    pub message: String,
}

const CATEGORY_KEYS: &[&str] = &["is_a", "def"];
const RELATION_KEYS: &[&str] = &["arity", "domain", "range", "props", "inverse"];

/// Parses a schema file. Only syntax is checked here; run
/// [`Schema::check`] on the result for reference and cycle defects.
pub fn parse_schema(text: &str) -> Result<Schema, SchemaFileError> {
    let mut categories: BTreeMap<TermId, CategoryDef> = BTreeMap::new();
    let mut relations: BTreeMap<TermId, RelationDef> = BTreeMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let err = |message: String| SchemaFileError {
            line: line_no,
            message,
        };
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("category:") {
            let (name, fields) = split_fields(rest, CATEGORY_KEYS).map_err(err)?;
            let id = TermId::new(name).map_err(|e| err(e.to_string()))?;
            let mut def = CategoryDef {
                id: id.clone(),
                nl_definition: String::new(),
                parents: Default::default(),
                primitive: true,
            };
            for (key, value) in fields {
                match key {
                    "is_a" => {
                        for p in value.split(',') {
                            let p = TermId::new(p.trim()).map_err(|e| err(e.to_string()))?;
                            def.parents.insert(p);
                        }
                    }
                    "def" => {
                        def.nl_definition = unquote(value).map_err(err)?;
                        def.primitive = def.nl_definition.is_empty();
                    }
                    _ => unreachable!(),
                }
            }
            if categories.insert(id.clone(), def).is_some() {
                return Err(err(format!("category {id:?} declared twice")));
            }
        } else if let Some(rest) = line.strip_prefix("relation:") {
            let (name, fields) = split_fields(rest, RELATION_KEYS).map_err(err)?;
            let id = TermId::new(name).map_err(|e| err(e.to_string()))?;
            let (mut arity, mut domain, mut range) = (None, None, None);
            let mut properties = Default::default();
            let mut inverse_of = None;
            let term = |s: &str| TermId::new(s).map_err(|e: TermError| err(e.to_string()));
            for (key, value) in fields {
                match key {
                    "arity" => {
                        arity = Some(match value {
                            "2" => 2,
                            "3" => 3,
                            other => {
                                return Err(err(format!("arity must be 2 or 3, got {other:?}")))
                            }
                        })
                    }
                    "domain" => domain = Some(term(value)?),
                    "range" => {
                        range = Some(RangeKind::parse(value).map_err(|e| err(e.to_string()))?)
                    }
                    "props" => {
                        properties = value
                            .split(',')
                            .map(|p| {
                                RelationProperty::parse(p.trim())
                                    .ok_or_else(|| err(format!("unknown property {:?}", p.trim())))
                            })
                            .collect::<Result<_, _>>()?
                    }
                    "inverse" => inverse_of = Some(term(value)?),
                    _ => unreachable!(),
                }
            }
            let def = RelationDef {
                id: id.clone(),
                arity: arity.ok_or_else(|| err("missing arity:".into()))?,
                domain: domain.ok_or_else(|| err("missing domain:".into()))?,
                range: range.ok_or_else(|| err("missing range:".into()))?,
                properties,
                inverse_of,
            };
            if relations.insert(id.clone(), def).is_some() {
                return Err(err(format!("relation {id:?} declared twice")));
            }
        } else {
            return Err(err(format!(
                "expected 'category:' or 'relation:', got {line:?}"
            )));
        }
    }
    Ok(Schema::from_parts(
        categories.into_values(),
        relations.into_values(),
    ))
}

/// Splits `Name key: value key: value` into the name and its keyed fields.
/// Keys are only recognized after whitespace and outside double quotes.
fn split_fields<'a>(rest: &'a str, keys: &[&'static str]) -> Result<Fields<'a>, String> {
    let mut marks: Vec<(usize, usize, &'static str)> = Vec::new();
    let bytes = rest.as_bytes();
    let mut in_quote = false;
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'\\' if in_quote => i += 1,
            b'"' => in_quote = !in_quote,
            _ if !in_quote && (i == 0 || bytes[i - 1].is_ascii_whitespace()) => {
                for key in keys {
                    let tail = &rest[i..];
                    if tail.starts_with(key) && tail[key.len()..].starts_with(':') {
                        marks.push((i, i + key.len() + 1, key));
                        break;
                    }
                }
            }
            _ => {}
        }
        i += 1;
    }
    let name_end = marks.first().map_or(rest.len(), |m| m.0);
    let name = rest[..name_end].trim();
    let mut fields = Vec::with_capacity(marks.len());
    for (n, &(_, value_start, key)) in marks.iter().enumerate() {
        let value_end = marks.get(n + 1).map_or(rest.len(), |m| m.0);
        if fields.iter().any(|(k, _)| *k == key) {
            return Err(format!("{key}: given twice"));
        }
        fields.push((key, rest[value_start..value_end].trim()));
    }
    Ok((name, fields))
}

fn unquote(value: &str) -> Result<String, String> {
    let inner = value
        .strip_prefix('"')
        .and_then(|v| v.strip_suffix('"'))
        .ok_or_else(|| format!("definition must be double-quoted: {value}"))?;
    let mut out = String::with_capacity(inner.len());
    let mut chars = inner.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            match chars.next() {
                Some('n') => out.push('\n'),
                Some('t') => out.push('\t'),
                Some(c @ ('"' | '\\')) => out.push(c),
                other => {
                    return Err(format!(
                        "bad escape \\{}",
                        other.map(String::from).unwrap_or_default()
                    ))
                }
            }
        } else if c == '"' {
            return Err("unescaped quote in definition".into());
        } else {
            out.push(c);
        }
    }
    Ok(out)
}

pub(crate) fn quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Renders a schema in the file format, categories then relations, each
/// sorted by name.
pub fn write_schema(schema: &Schema) -> String {
    let mut out = String::new();
    for c in schema.categories() {
        let _ = write!(out, "category: {}", c.id);
        if !c.parents.is_empty() {
            let parents: Vec<&str> = c.parents.iter().map(TermId::as_str).collect();
            let _ = write!(out, " is_a: {}", parents.join(", "));
        }
        if !c.nl_definition.is_empty() {
            let _ = write!(out, " def: {}", quote(&c.nl_definition));
        }
        out.push('\n');
    }
    for r in schema.relations() {
        let _ = write!(
            out,
            "relation: {} arity: {} domain: {} range: {}",
            r.id, r.arity, r.domain, r.range
        );
        if !r.properties.is_empty() {
            let props: Vec<&str> = r.properties.iter().map(|p| p.as_str()).collect();
            let _ = write!(out, " props: {}", props.join(","));
        }
        if let Some(inv) = &r.inverse_of {
            let _ = write!(out, " inverse: {inv}");
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_references_resolve() {
        let text = r#"
# comment
category: Fragmentation Debris is_a: Orbital Debris def: "Pieces from breakups, \"explosions\" too"
category: Orbital Debris is_a: Space Debris
category: Space Debris
relation: part_of arity: 2 domain: Space Debris range: Space Debris props: transitive
"#;
        let s = parse_schema(text).unwrap();
        assert!(s.check().is_empty());
        assert!(s
            .is_subclass_of("Fragmentation Debris", "Space Debris")
            .unwrap());
        assert_eq!(
            s.category("Fragmentation Debris").unwrap().nl_definition,
            "Pieces from breakups, \"explosions\" too"
        );
        assert!(s.category("Space Debris").unwrap().primitive);
        assert!(s
            .relation("part_of")
            .unwrap()
            .has(RelationProperty::Transitive));
    }

    #[test]
    fn write_then_parse_is_identity() {
        let text = "category: A def: \"first, letter\"\ncategory: B is_a: A\n\
                    relation: r arity: 3 domain: A range: quantity props: functional\n\
                    relation: s arity: 2 domain: A range: B inverse: t\n\
                    relation: t arity: 2 domain: B range: A inverse: s\n";
        let s = parse_schema(text).unwrap();
        assert_eq!(write_schema(&s), text);
        assert_eq!(parse_schema(&write_schema(&s)).unwrap(), s);
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let e = parse_schema("category: A\nbogus line\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_schema("relation: r arity: 4 domain: A range: A").unwrap_err();
        assert!(e.message.contains("arity"));
        let e = parse_schema("relation: r domain: A range: A").unwrap_err();
        assert!(e.message.contains("missing arity"));
        let e = parse_schema("category: A (x)").unwrap_err();
        assert!(e.message.contains("reserved"));
    }
}
