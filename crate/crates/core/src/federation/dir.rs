//! Catalog directories: `<source_id>/schema.odo`, `<source_id>/facts.odo`,
//! optional `*.tle` files, `provenance.tsv` (fact hash and sources) and
//! `same_as.tsv` (canonical id and a former id per row).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::{Catalog, FederationError};
use crate::kbstore::{export_odo, format_fact, import_odo, Fact, KnowledgeBase};
use crate::ontology::{parse_schema, seed_schema, write_schema};
use crate::tle::{annotate_tle, read_tle_file, resolve_subject, ReadMode};

pub const SCHEMA_FILE: &str = "schema.odo";
pub const FACTS_FILE: &str = "facts.odo";
pub const PROVENANCE_FILE: &str = "provenance.tsv";
pub const SAME_AS_FILE: &str = "same_as.tsv";

/// Hex SHA-256 of the fact's prefix-notation rendering.
pub fn fact_hash(fact: &Fact) -> String {
    hex::encode(Sha256::digest(format_fact(fact).as_bytes()))
}

fn io_err(path: &Path, e: std::io::Error) -> FederationError {
    FederationError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn read_optional(path: &Path) -> Result<Option<String>, FederationError> {
    match fs::read_to_string(path) {
        Ok(text) => Ok(Some(text)),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(io_err(path, e)),
    }
}

/// Loads a catalog whose source id is the directory name. A missing
/// schema file means the bundled seed schema.
pub fn read_catalog(dir: &Path) -> Result<Catalog, FederationError> {
    let source_id = dir
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| FederationError::Io {
            path: dir.display().to_string(),
            message: "directory name is not a valid source id".into(),
        })?
        .to_string();
    let schema_path = dir.join(SCHEMA_FILE);
    let schema = match read_optional(&schema_path)? {
        Some(text) => parse_schema(&text).map_err(|source| FederationError::Schema {
            path: schema_path.display().to_string(),
            source,
        })?,
        None => seed_schema(),
    };
    let mut kb = KnowledgeBase::new(schema);
    kb.set_source(&source_id);

    let facts_path = dir.join(FACTS_FILE);
    if let Some(text) = read_optional(&facts_path)? {
        import_odo(&mut kb, &text).map_err(|source| FederationError::Facts {
            path: facts_path.display().to_string(),
            source,
        })?;
    }
    let prov_path = dir.join(PROVENANCE_FILE);
    if let Some(text) = read_optional(&prov_path)? {
        restore_provenance(&mut kb, &text);
    }

    let mut tle_files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| io_err(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "tle"))
        .collect();
    tle_files.sort();
    for path in tle_files {
        let text = fs::read_to_string(&path).map_err(|e| io_err(&path, e))?;
        let file =
            read_tle_file(&text, ReadMode::Strict).map_err(|source| FederationError::Tle {
                path: path.display().to_string(),
                source,
            })?;
        for entry in &file.entries {
            let subject = resolve_subject(&kb, &entry.record);
            annotate_tle(&mut kb, &entry.record, &subject)?;
        }
    }
    let mut same_as: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let same_as_path = dir.join(SAME_AS_FILE);
    if let Some(text) = read_optional(&same_as_path)? {
        for line in text.lines().filter(|l| !l.starts_with('#')) {
            if let Some((canonical, former)) = line.split_once('\t') {
                same_as
                    .entry(canonical.to_string())
                    .or_default()
                    .insert(former.to_string());
            }
        }
    }
    Ok(Catalog::new(&source_id, kb)?.with_same_as(same_as))
}

fn restore_provenance(kb: &mut KnowledgeBase, text: &str) {
    let sources: HashMap<&str, Vec<&str>> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .filter_map(|l| l.split_once('\t'))
        .map(|(hash, list)| (hash, list.split(',').filter(|s| !s.is_empty()).collect()))
        .collect();
    let facts: Vec<Fact> = kb.assertions().iter().map(|a| a.fact.clone()).collect();
    for fact in facts {
        if let Some(list) = sources.get(fact_hash(&fact).as_str()) {
            let entries = list
                .iter()
                .map(|s| {
                    let mut p = kb.provenance(false);
                    p.source = s.to_string();
                    p
                })
                .collect();
            kb.replace_provenance(&fact, entries);
        }
    }
}

/// Writes `catalog` under `root/<source_id>/`, returning that directory.
pub fn write_catalog(root: &Path, catalog: &Catalog) -> Result<PathBuf, FederationError> {
    let dir = root.join(catalog.source_id());
    fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
    let kb = catalog.kb();
    let write = |name: &str, text: String| {
        let path = dir.join(name);
        fs::write(&path, text).map_err(|e| io_err(&path, e))
    };
    write(SCHEMA_FILE, write_schema(kb.schema()))?;
    write(FACTS_FILE, export_odo(kb))?;

    let mut prov = String::from("# fact_sha256\tsources\n");
    for a in kb.assertions() {
        let mut sources: Vec<&str> = Vec::new();
        for p in &a.provenance {
            if !sources.contains(&p.source.as_str()) {
                sources.push(&p.source);
            }
        }
        prov.push_str(&format!("{}\t{}\n", fact_hash(&a.fact), sources.join(",")));
    }
    write(PROVENANCE_FILE, prov)?;

    if !catalog.same_as().is_empty() {
        let mut same_as = String::from("# canonical\tformer_id\n");
        for (canonical, former) in catalog.same_as() {
            for id in former {
                same_as.push_str(&format!("{canonical}\t{id}\n"));
            }
        }
        write(SAME_AS_FILE, same_as)?;
    }
    Ok(dir)
}
