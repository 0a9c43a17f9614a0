//! Sharing across catalogs: identity resolution, hub merge into a joint
//! master catalog, and pairwise peer synchronization.
//!
//! Merging works on logical fact sets. Catalogs are processed in
//! `source_id` order, so the master's fact set does not depend on the order
//! the catalogs are passed in.

mod dir;
mod merge;

pub use dir::{
    fact_hash, read_catalog, write_catalog, FACTS_FILE, PROVENANCE_FILE, SAME_AS_FILE, SCHEMA_FILE,
};
pub use merge::{merge_hub, resolve_identity, sync_peer, Cluster, MergeOutcome};

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::kbstore::{ExchangeError, KbError, KnowledgeBase};
use crate::ontology::SchemaFileError;
use crate::tle::TleFileError;

/// Source id of the master catalog produced by [`merge_hub`].
pub const HUB_SOURCE_ID: &str = "master";

#[derive(Debug, Error)]
pub enum FederationError {
    #[error("EmptySourceId: a catalog needs a non-empty source id")]
    EmptySourceId,
    #[error("EmptyIdentityKeys: a merge policy needs at least one identity key")]
    EmptyIdentityKeys,
    #[error("SchemaConflict: schemas of {first} and {second} differ")]
    SchemaConflict { first: String, second: String },
    #[error(transparent)]
    Kb(#[from] KbError),
    #[error("{path}: {source}")]
    Schema {
        path: String,
        source: SchemaFileError,
    },
    #[error("{path}: {source}")]
    Facts { path: String, source: ExchangeError },
    #[error("{path}: {source}")]
    Tle { path: String, source: TleFileError },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

/// A knowledge base published under a source identity.
#[derive(Debug, Clone)]
pub struct Catalog {
    source_id: String,
    kb: KnowledgeBase,
    same_as: BTreeMap<String, BTreeSet<String>>,
}

impl Catalog {
    /// Wraps `kb`; assertions made under the default source are attributed
    /// to `source_id`, as are later ones.
    pub fn new(source_id: &str, mut kb: KnowledgeBase) -> Result<Self, FederationError> {
        if source_id.trim().is_empty() {
            return Err(FederationError::EmptySourceId);
        }
        kb.restamp_default_source(source_id);
        kb.set_source(source_id);
        Ok(Catalog {
            source_id: source_id.to_string(),
            kb,
            same_as: BTreeMap::new(),
        })
    }

    /// Former ids of individuals renamed by earlier merges, keyed by the
    /// id they now carry. Identity resolution matches these as exact ids.
    pub fn same_as(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.same_as
    }

    pub fn with_same_as(mut self, same_as: BTreeMap<String, BTreeSet<String>>) -> Self {
        self.same_as = same_as;
        self
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn kb(&self) -> &KnowledgeBase {
        &self.kb
    }

    pub fn kb_mut(&mut self) -> &mut KnowledgeBase {
        &mut self.kb
    }

    pub fn into_kb(self) -> KnowledgeBase {
        self.kb
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IdentityKey {
    InternationalDesignator,
    CatalogNumber,
    ExactId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConflictRule {
    /// Among time-indexed facts sharing subject and predicate, keep those
    /// at the latest epoch.
    #[default]
    LatestEpochWins,
    KeepAll,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SchemaRule {
    RequireIdentical,
    #[default]
    UnionWithDefectReport,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergePolicy {
    identity_keys: Vec<IdentityKey>,
    pub conflict_rule: ConflictRule,
    pub schema_rule: SchemaRule,
}

impl MergePolicy {
    pub fn new(
        identity_keys: Vec<IdentityKey>,
        conflict_rule: ConflictRule,
        schema_rule: SchemaRule,
    ) -> Result<Self, FederationError> {
        if identity_keys.is_empty() {
            return Err(FederationError::EmptyIdentityKeys);
        }
        Ok(MergePolicy {
            identity_keys,
            conflict_rule,
            schema_rule,
        })
    }

    pub fn identity_keys(&self) -> &[IdentityKey] {
        &self.identity_keys
    }

    pub fn with_conflict_rule(mut self, rule: ConflictRule) -> Self {
        self.conflict_rule = rule;
        self
    }

    pub fn with_schema_rule(mut self, rule: SchemaRule) -> Self {
        self.schema_rule = rule;
        self
    }
}

impl Default for MergePolicy {
    /// Designator, then catalog number; latest epoch wins; schema union.
    fn default() -> Self {
        MergePolicy {
            identity_keys: vec![
                IdentityKey::InternationalDesignator,
                IdentityKey::CatalogNumber,
            ],
            conflict_rule: ConflictRule::default(),
            schema_rule: SchemaRule::default(),
        }
    }
}
