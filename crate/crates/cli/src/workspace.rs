//! Schema resolution and the on-disk KB: a directory holding `schema.odo`
//! and `facts.odo`.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use odo_kb::federation::{FACTS_FILE, SCHEMA_FILE};
use odo_kb::kbstore::{export_odo, import_odo, DomainMode};
use odo_kb::ontology::{parse_schema, seed_schema, write_schema};
use odo_kb::reason;
use odo_kb::{KnowledgeBase, Schema};

pub struct Config {
    pub kb_dir: Option<PathBuf>,
    pub schema_paths: Vec<PathBuf>,
    pub seed: bool,
    pub seed_path: Option<PathBuf>,
    pub strict: bool,
    pub materialize: bool,
}

fn read_schema_file(path: &Path) -> Result<Schema> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_schema(&text).with_context(|| format!("SchemaFileError: {}", path.display()))
}

impl Config {
    fn seed_schema(&self) -> Result<Schema> {
        match &self.seed_path {
            Some(p) => read_schema_file(p),
            None => Ok(seed_schema()),
        }
    }

    /// Explicit flags win, in order `--seed` then each `--schema`; later
    /// definitions of the same term replace earlier ones. Without flags the
    /// KB's own schema file is used, else the seed.
    pub fn schema(&self) -> Result<(Schema, bool)> {
        let mut parts = Vec::new();
        if self.seed {
            parts.push(self.seed_schema()?);
        }
        for p in &self.schema_paths {
            parts.push(read_schema_file(p)?);
        }
        if parts.is_empty() {
            if let Some(dir) = &self.kb_dir {
                let own = dir.join(SCHEMA_FILE);
                if own.exists() {
                    return Ok((read_schema_file(&own)?, false));
                }
            }
            return Ok((self.seed_schema()?, false));
        }
        if parts.len() == 1 {
            return Ok((parts.pop().unwrap(), true));
        }
        let categories: Vec<_> = parts.iter().flat_map(|s| s.categories().cloned()).collect();
        let relations: Vec<_> = parts.iter().flat_map(|s| s.relations().cloned()).collect();
        Ok((Schema::from_parts(categories, relations), true))
    }

    /// Loads the KB directory; a missing directory or fact file is an empty
    /// KB.
    pub fn load(&self) -> Result<Workspace> {
        let (schema, explicit_schema) = self.schema()?;
        let mut kb = KnowledgeBase::new(schema);
        if self.strict {
            kb.set_mode(DomainMode::Strict);
        }
        if let Some(dir) = &self.kb_dir {
            if let Some(name) = dir.file_name().and_then(|n| n.to_str()) {
                kb.set_source(name);
            }
            let facts = dir.join(FACTS_FILE);
            if facts.exists() {
                let text = fs::read_to_string(&facts)
                    .with_context(|| format!("cannot read {}", facts.display()))?;
                import_odo(&mut kb, &text)
                    .with_context(|| format!("ExchangeError: {}", facts.display()))?;
            }
        }
        if self.materialize {
            materialize(&mut kb)?;
        }
        Ok(Workspace {
            kb,
            dir: self.kb_dir.clone(),
            explicit_schema,
        })
    }
}

/// Types, transitive and symmetric closure, then skolem individuals.
pub fn materialize(kb: &mut KnowledgeBase) -> Result<()> {
    reason::materialize_types(kb);
    reason::close_transitive(kb);
    let created = reason::materialize_existentials(kb)?;
    reason::materialize_types(kb);
    for id in created {
        log::info!("created {id}");
    }
    Ok(())
}

pub struct Workspace {
    pub kb: KnowledgeBase,
    dir: Option<PathBuf>,
    explicit_schema: bool,
}

impl Workspace {
    /// Writes the fact file, and the schema file when the schema came from
    /// flags and the directory has none yet.
    pub fn save(&self) -> Result<()> {
        let dir = self.dir.as_ref().expect("save requires a KB directory");
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        let schema_path = dir.join(SCHEMA_FILE);
        if self.explicit_schema && !schema_path.exists() {
            fs::write(&schema_path, write_schema(self.kb.schema()))
                .with_context(|| format!("cannot write {}", schema_path.display()))?;
        }
        let facts = dir.join(FACTS_FILE);
        fs::write(&facts, export_odo(&self.kb))
            .with_context(|| format!("cannot write {}", facts.display()))?;
        Ok(())
    }
}
