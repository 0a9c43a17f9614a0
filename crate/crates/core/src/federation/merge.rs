use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{
    Catalog, ConflictRule, FederationError, IdentityKey, MergePolicy, SchemaRule, HUB_SOURCE_ID,
};
use crate::kbstore::{Fact, FactKind, KnowledgeBase, Pattern, Value};
use crate::ontology::{terms, CategoryDef, RelationDef, Schema, TermId};

/// Individuals judged to be the same object, keyed by `(source_id, id)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Cluster {
    /// Lexicographically least member id.
    pub canonical: String,
    pub members: BTreeSet<(String, String)>,
}

/// Result of [`merge_hub`].
#[derive(Debug, Clone)]
pub struct MergeOutcome {
    pub master: Catalog,
    /// Every cluster, singletons included, ordered by canonical id.
    pub clusters: Vec<Cluster>,
    /// Schema union findings as `term\trule\tdetail` lines.
    pub schema_defects: Vec<String>,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn text_objects<'a>(kb: &'a KnowledgeBase, predicate: &str) -> Vec<(&'a str, &'a str)> {
    kb.query(&Pattern::any().predicate(predicate))
        .into_iter()
        .filter_map(|a| match &a.fact.kind {
            FactKind::Relation {
                subject,
                object: Value::Text(t),
                ..
            } => Some((subject.as_str(), t.as_str())),
            _ => None,
        })
        .collect()
}

/// Clusters individuals that share any identity key value, closed
/// transitively. Identical ids, counting former ids recorded in a
/// catalog's same-as map, always coincide: the master catalog has a single
/// namespace.
pub fn resolve_identity(catalogs: &[Catalog], policy: &MergePolicy) -> Vec<Cluster> {
    let mut members: Vec<(String, String)> = Vec::new();
    let mut index: HashMap<(String, String), usize> = HashMap::new();
    for c in catalogs {
        for ind in c.kb().individuals() {
            let key = (c.source_id().to_string(), ind.id.clone());
            if !index.contains_key(&key) {
                index.insert(key.clone(), members.len());
                members.push(key);
            }
        }
    }
    let mut uf = UnionFind::new(members.len());
    let mut link =
        |seen: &mut HashMap<(IdentityKey, String), usize>, key: (IdentityKey, String), m: usize| {
            match seen.get(&key) {
                Some(&first) => uf.union(first, m),
                None => {
                    seen.insert(key, m);
                }
            }
        };
    let mut seen = HashMap::new();
    for c in catalogs {
        for ind in c.kb().individuals() {
            let m = index[&(c.source_id().to_string(), ind.id.clone())];
            link(&mut seen, (IdentityKey::ExactId, ind.id.clone()), m);
            for alias in c.same_as().get(&ind.id).into_iter().flatten() {
                link(&mut seen, (IdentityKey::ExactId, alias.clone()), m);
            }
        }
    }
    for &key in policy.identity_keys() {
        let predicate = match key {
            IdentityKey::InternationalDesignator => terms::HAS_INTL_DESIGNATOR,
            IdentityKey::CatalogNumber => terms::HAS_CATALOG_NUMBER,
            IdentityKey::ExactId => continue,
        };
        for c in catalogs {
            for (subject, value) in text_objects(c.kb(), predicate) {
                let m = index[&(c.source_id().to_string(), subject.to_string())];
                link(&mut seen, (key, value.to_string()), m);
            }
        }
    }
    let mut groups: BTreeMap<usize, BTreeSet<(String, String)>> = BTreeMap::new();
    for (m, member) in members.iter().enumerate() {
        groups.entry(uf.find(m)).or_default().insert(member.clone());
    }
    let mut clusters: Vec<Cluster> = groups
        .into_values()
        .map(|members| Cluster {
            canonical: members.iter().map(|(_, id)| id).min().unwrap().clone(),
            members,
        })
        .collect();
    clusters.sort();
    clusters
}

fn merged_schema(
    ordered: &[&Catalog],
    rule: SchemaRule,
) -> Result<(Schema, Vec<String>), FederationError> {
    let Some(first) = ordered.first() else {
        return Ok((Schema::new(), Vec::new()));
    };
    if rule == SchemaRule::RequireIdentical {
        for c in &ordered[1..] {
            if c.kb().schema() != first.kb().schema() {
                return Err(FederationError::SchemaConflict {
                    first: first.source_id().to_string(),
                    second: c.source_id().to_string(),
                });
            }
        }
        return Ok((first.kb().schema().clone(), Vec::new()));
    }

    let mut notes = BTreeSet::new();
    let mut categories: BTreeMap<TermId, (CategoryDef, &str)> = BTreeMap::new();
    let mut relations: BTreeMap<TermId, (RelationDef, &str)> = BTreeMap::new();
    for c in ordered {
        for def in c.kb().schema().categories() {
            match categories.get_mut(&def.id) {
                None => {
                    categories.insert(def.id.clone(), (def.clone(), c.source_id()));
                }
                Some((kept, from)) => {
                    if kept.nl_definition != def.nl_definition {
                        notes.insert(format!(
                            "{}\tConflictingDefinition\t{} vs {}",
                            def.id,
                            from,
                            c.source_id()
                        ));
                    }
                    kept.parents.extend(def.parents.iter().cloned());
                    kept.primitive = kept.parents.is_empty();
                }
            }
        }
        for def in c.kb().schema().relations() {
            match relations.get(&def.id) {
                None => {
                    relations.insert(def.id.clone(), (def.clone(), c.source_id()));
                }
                Some((kept, from)) if kept != def => {
                    notes.insert(format!(
                        "{}\tConflictingSignature\t{} vs {}, kept {}",
                        def.id,
                        from,
                        c.source_id(),
                        from
                    ));
                }
                Some(_) => {}
            }
        }
    }
    let schema = Schema::from_parts(
        categories.into_values().map(|(d, _)| d),
        relations.into_values().map(|(d, _)| d),
    );
    notes.extend(schema.check().iter().map(|d| d.to_string()));
    Ok((schema, notes.into_iter().collect()))
}

/// Keeps, per relation `(subject, predicate)`, only the time-indexed facts
/// at the latest instant. Groups with opaque time tokens are left whole.
fn keep_latest(kb: &KnowledgeBase) -> KnowledgeBase {
    let mut latest: HashMap<(&str, &str), Option<chrono::DateTime<chrono::Utc>>> = HashMap::new();
    for a in kb.assertions() {
        if let (
            FactKind::Relation {
                predicate, subject, ..
            },
            Some(at),
        ) = (&a.fact.kind, &a.fact.at)
        {
            let slot = latest
                .entry((subject.as_str(), predicate.as_str()))
                .or_insert(at.instant());
            *slot = match (*slot, at.instant()) {
                (Some(x), Some(y)) => Some(x.max(y)),
                _ => None,
            };
        }
    }
    let mut out = KnowledgeBase::with_shared_schema(kb.shared_schema());
    out.set_source(kb.source());
    for ind in kb.individuals() {
        let _ = out.add_individual(&ind.id);
    }
    for a in kb.assertions() {
        if let (
            FactKind::Relation {
                predicate, subject, ..
            },
            Some(at),
        ) = (&a.fact.kind, &a.fact.at)
        {
            if let Some(max) = latest[&(subject.as_str(), predicate.as_str())] {
                if at.instant() != Some(max) {
                    continue;
                }
            }
        }
        for p in &a.provenance {
            out.insert_unchecked(a.fact.clone(), p.clone());
        }
    }
    out
}

/// Merges catalogs into a joint master: facts are rewritten onto canonical
/// ids and each master fact keeps one provenance entry per source that
/// asserted it.
pub fn merge_hub(
    catalogs: &[Catalog],
    policy: &MergePolicy,
) -> Result<MergeOutcome, FederationError> {
    let mut ordered: Vec<&Catalog> = catalogs.iter().collect();
    ordered.sort_by(|a, b| a.source_id().cmp(b.source_id()));
    let (schema, schema_defects) = merged_schema(&ordered, policy.schema_rule)?;
    let clusters = resolve_identity(catalogs, policy);
    let canonical: HashMap<(&str, &str), &str> = clusters
        .iter()
        .flat_map(|c| {
            c.members
                .iter()
                .map(move |(s, id)| ((s.as_str(), id.as_str()), c.canonical.as_str()))
        })
        .collect();

    let mut kb = KnowledgeBase::new(schema);
    kb.set_source(HUB_SOURCE_ID);
    for c in &ordered {
        let src = c.source_id();
        for ind in c.kb().individuals() {
            kb.add_individual(canonical[&(src, ind.id.as_str())])?;
        }
        for a in c.kb().assertions() {
            let fact: Fact = a
                .fact
                .map_individuals(|id| canonical[&(src, id)].to_string());
            for p in &a.provenance {
                let known = kb
                    .get(&fact)
                    .is_some_and(|m| m.provenance.iter().any(|q| q.source == p.source));
                if known {
                    continue;
                }
                let mut entry = kb.provenance(p.inferred);
                entry.source = p.source.clone();
                kb.insert_unchecked(fact.clone(), entry);
            }
        }
    }
    if policy.conflict_rule == ConflictRule::LatestEpochWins {
        kb = keep_latest(&kb);
    }
    let by_source: HashMap<&str, &Catalog> = ordered.iter().map(|c| (c.source_id(), *c)).collect();
    let mut same_as: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for c in &clusters {
        let mut former = BTreeSet::new();
        for (src, id) in &c.members {
            former.insert(id.clone());
            if let Some(aliases) = by_source[src.as_str()].same_as().get(id) {
                former.extend(aliases.iter().cloned());
            }
        }
        former.remove(&c.canonical);
        if !former.is_empty() {
            same_as
                .entry(c.canonical.clone())
                .or_default()
                .extend(former);
        }
    }
    Ok(MergeOutcome {
        master: Catalog {
            source_id: HUB_SOURCE_ID.to_string(),
            kb,
            same_as,
        },
        clusters,
        schema_defects,
    })
}

/// Brings two peers to the hub merge of both, each keeping its own source
/// id. Applying it again changes nothing.
pub fn sync_peer(
    a: &Catalog,
    b: &Catalog,
    policy: &MergePolicy,
) -> Result<(Catalog, Catalog), FederationError> {
    let merged = merge_hub(&[a.clone(), b.clone()], policy)?.master;
    let peer = |c: &Catalog| {
        let mut kb = merged.kb().clone();
        kb.set_source(c.source_id());
        Catalog {
            source_id: c.source_id().to_string(),
            kb,
            same_as: merged.same_as().clone(),
        }
    };
    Ok((peer(a), peer(b)))
}
