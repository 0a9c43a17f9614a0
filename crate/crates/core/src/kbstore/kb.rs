use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use thiserror::Error;

use super::value::{TimeRef, Value, ValueError};
use crate::ontology::{
    check_name, terms, RangeKind, Schema, SchemaError, TermError, TermId, INSTANCE_OF, IS_A,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KbError {
    #[error("UnknownCategory: {0:?}")]
    UnknownCategory(String),
    #[error("UnknownPredicate: {0:?}")]
    UnknownPredicate(String),
    #[error("UnknownIndividual: {0:?}")]
    UnknownIndividual(String),
    #[error("RangeKindMismatch: {predicate} expects {expected}, got {found}")]
    RangeKindMismatch {
        predicate: String,
        expected: String,
        found: &'static str,
    },
    #[error("ArityMismatch: {predicate} has arity {arity}, {detail}")]
    ArityMismatch {
        predicate: String,
        arity: u8,
        detail: &'static str,
    },
    #[error("DomainViolation: {subject} is not an instance of {domain} (domain of {predicate})")]
    DomainViolation {
        predicate: String,
        subject: String,
        domain: String,
    },
    #[error("BuiltinPredicate: {0:?} is structural and cannot be asserted as a fact")]
    BuiltinPredicate(String),
    #[error("InvalidName: {0}")]
    InvalidName(#[from] TermError),
    #[error("InvalidValue: {0}")]
    InvalidValue(#[from] ValueError),
}

impl From<SchemaError> for KbError {
    fn from(e: SchemaError) -> Self {
        match e {
            SchemaError::UnknownTerm(t) => KbError::UnknownCategory(t),
            SchemaError::Term(t) => KbError::InvalidName(t),
            other => KbError::UnknownCategory(other.to_string()),
        }
    }
}

/// How `assert_relation` treats a subject that is not (yet) an instance of
/// the predicate's domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DomainMode {
    /// Record a warning and accept.
    #[default]
    Lax,
    /// Reject with `DomainViolation`.
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceMode {
    Direct,
    Inferred,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FactKind {
    Instance {
        subject: String,
        category: TermId,
    },
    Relation {
        predicate: TermId,
        subject: String,
        object: Value,
    },
}

/// One logical fact. Equality ignores provenance.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fact {
    pub kind: FactKind,
    pub at: Option<TimeRef>,
}

impl Fact {
    pub fn subject(&self) -> &str {
        match &self.kind {
            FactKind::Instance { subject, .. } | FactKind::Relation { subject, .. } => subject,
        }
    }

    /// The predicate name; instantiations report `is_an_instance_of`.
    pub fn predicate(&self) -> &str {
        match &self.kind {
            FactKind::Instance { .. } => INSTANCE_OF,
            FactKind::Relation { predicate, .. } => predicate.as_str(),
        }
    }

    /// Individual ids mentioned by this fact.
    pub fn individuals(&self) -> impl Iterator<Item = &str> {
        let object = match &self.kind {
            FactKind::Relation {
                object: Value::Individual(o),
                ..
            } => Some(o.as_str()),
            _ => None,
        };
        std::iter::once(self.subject()).chain(object)
    }

    /// Same fact with every individual id passed through `f`.
    pub fn map_individuals(&self, mut f: impl FnMut(&str) -> String) -> Fact {
        let kind = match &self.kind {
            FactKind::Instance { subject, category } => FactKind::Instance {
                subject: f(subject),
                category: category.clone(),
            },
            FactKind::Relation {
                predicate,
                subject,
                object,
            } => FactKind::Relation {
                predicate: predicate.clone(),
                subject: f(subject),
                object: match object {
                    Value::Individual(o) => Value::Individual(f(o)),
                    other => other.clone(),
                },
            },
        };
        Fact {
            kind,
            at: self.at.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Provenance {
    pub source: String,
    pub seq: u64,
    /// Produced by the reasoner rather than asserted by a source.
    pub inferred: bool,
}

/// A stored fact with every provenance entry that asserted it.
#[derive(Debug, Clone, PartialEq)]
pub struct Assertion {
    pub fact: Fact,
    /// Ingest sequence number of the first assertion.
    pub seq: u64,
    pub provenance: Vec<Provenance>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Individual {
    pub id: String,
    pub labels: Vec<String>,
}

/// A single-slot-or-wildcard query pattern.
#[derive(Debug, Clone, Default)]
pub struct Pattern {
    pub subject: Option<String>,
    pub predicate: Option<String>,
    /// For instantiations, `Value::Individual(category)` matches the category.
    pub object: Option<Value>,
    pub at: Option<TimeRef>,
}

impl Pattern {
    pub fn any() -> Self {
        Pattern::default()
    }

    pub fn subject(mut self, s: &str) -> Self {
        self.subject = Some(s.to_string());
        self
    }

    pub fn predicate(mut self, p: &str) -> Self {
        self.predicate = Some(p.to_string());
        self
    }

    pub fn object(mut self, o: Value) -> Self {
        self.object = Some(o);
        self
    }

    pub fn at(mut self, t: TimeRef) -> Self {
        self.at = Some(t);
        self
    }

    pub fn matches(&self, fact: &Fact) -> bool {
        if self.subject.as_deref().is_some_and(|s| s != fact.subject()) {
            return false;
        }
        if self
            .predicate
            .as_deref()
            .is_some_and(|p| p != fact.predicate())
        {
            return false;
        }
        if let Some(at) = &self.at {
            if fact.at.as_ref() != Some(at) {
                return false;
            }
        }
        match (&self.object, &fact.kind) {
            (None, _) => true,
            (Some(Value::Individual(c)), FactKind::Instance { category, .. }) => {
                c == category.as_str()
            }
            (Some(_), FactKind::Instance { .. }) => false,
            (Some(o), FactKind::Relation { object, .. }) => o == object,
        }
    }
}

pub const DEFAULT_SOURCE: &str = "local";

/// A schema plus the individuals and assertions annotated with its terms.
///
/// Assertions keep set semantics: re-asserting a fact only appends a
/// provenance entry. Iteration and query results follow ingest order.
#[derive(Debug, Clone)]
pub struct KnowledgeBase {
    schema: Arc<Schema>,
    mode: DomainMode,
    source: String,
    individuals: BTreeMap<String, Individual>,
    assertions: Vec<Assertion>,
    lookup: HashMap<Fact, usize>,
    by_subject: HashMap<String, Vec<usize>>,
    by_predicate: HashMap<String, Vec<usize>>,
    by_category: HashMap<TermId, Vec<usize>>,
    warnings: Vec<String>,
    next_seq: u64,
}

impl KnowledgeBase {
    pub fn new(schema: Schema) -> Self {
        Self::with_shared_schema(Arc::new(schema))
    }

    pub fn with_shared_schema(schema: Arc<Schema>) -> Self {
        KnowledgeBase {
            schema,
            mode: DomainMode::default(),
            source: DEFAULT_SOURCE.to_string(),
            individuals: BTreeMap::new(),
            assertions: Vec::new(),
            lookup: HashMap::new(),
            by_subject: HashMap::new(),
            by_predicate: HashMap::new(),
            by_category: HashMap::new(),
            warnings: Vec::new(),
            next_seq: 0,
        }
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn shared_schema(&self) -> Arc<Schema> {
        Arc::clone(&self.schema)
    }

    pub fn mode(&self) -> DomainMode {
        self.mode
    }

    pub fn set_mode(&mut self, mode: DomainMode) {
        self.mode = mode;
    }

    /// Source id stamped into the provenance of new assertions.
    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn set_source(&mut self, source: &str) {
        self.source = source.to_string();
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn len(&self) -> usize {
        self.assertions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assertions.is_empty()
    }

    pub fn assertions(&self) -> &[Assertion] {
        &self.assertions
    }

    pub fn individuals(&self) -> impl Iterator<Item = &Individual> {
        self.individuals.values()
    }

    pub fn individual(&self, id: &str) -> Option<&Individual> {
        self.individuals.get(id)
    }

    pub fn contains(&self, fact: &Fact) -> bool {
        self.lookup.contains_key(fact)
    }

    pub fn get(&self, fact: &Fact) -> Option<&Assertion> {
        self.lookup.get(fact).map(|&i| &self.assertions[i])
    }

    /// The logical fact set, ignoring order and provenance.
    pub fn fact_set(&self) -> HashSet<Fact> {
        self.lookup.keys().cloned().collect()
    }

    pub fn assert_instance(
        &mut self,
        subject: &str,
        category: &str,
        at: Option<TimeRef>,
    ) -> Result<(), KbError> {
        let fact = self.instance_fact(subject, category, at)?;
        let prov = self.provenance(false);
        self.insert_checked(fact, prov)
    }

    pub fn assert_relation(
        &mut self,
        predicate: &str,
        subject: &str,
        object: Value,
        at: Option<TimeRef>,
    ) -> Result<(), KbError> {
        let fact = Fact {
            kind: FactKind::Relation {
                predicate: TermId::new(predicate)?,
                subject: subject.to_string(),
                object,
            },
            at,
        };
        let prov = self.provenance(false);
        self.insert_checked(fact, prov)
    }

    /// Checks and stores a parsed fact under the current source.
    pub fn assert_fact(&mut self, fact: Fact) -> Result<(), KbError> {
        if let FactKind::Instance { subject, category } = &fact.kind {
            return self.assert_instance(subject, category.as_str(), fact.at.clone());
        }
        let prov = self.provenance(false);
        self.insert_checked(fact, prov)
    }

    /// Validates `fact` against the schema and stores it with the given
    /// provenance entry.
    pub fn insert_checked(&mut self, fact: Fact, prov: Provenance) -> Result<(), KbError> {
        self.check_fact(&fact)?;
        self.insert_unchecked(fact, prov);
        Ok(())
    }

    fn instance_fact(
        &self,
        subject: &str,
        category: &str,
        at: Option<TimeRef>,
    ) -> Result<Fact, KbError> {
        Ok(Fact {
            kind: FactKind::Instance {
                subject: subject.to_string(),
                category: TermId::new(category)?,
            },
            at,
        })
    }

    /// Checks a fact against the schema and the domain mode. In lax mode a
    /// domain problem is recorded as a warning.
    pub fn check_fact(&mut self, fact: &Fact) -> Result<(), KbError> {
        for id in fact.individuals() {
            check_name(id)?;
        }
        match &fact.kind {
            FactKind::Instance { category, .. } => {
                if !self.schema.has_category(category.as_str()) {
                    return Err(KbError::UnknownCategory(category.to_string()));
                }
            }
            FactKind::Relation {
                predicate,
                subject,
                object,
            } => {
                let name = predicate.as_str();
                if name == INSTANCE_OF || name == IS_A {
                    return Err(KbError::BuiltinPredicate(name.to_string()));
                }
                let def = self
                    .schema
                    .relation(name)
                    .ok_or_else(|| KbError::UnknownPredicate(name.to_string()))?;
                if !object.fits(&def.range) {
                    return Err(KbError::RangeKindMismatch {
                        predicate: name.to_string(),
                        expected: match &def.range {
                            RangeKind::Category(c) => format!("individual of {c}"),
                            other => other.to_string(),
                        },
                        found: object.kind_name(),
                    });
                }
                match (def.arity, fact.at.is_some()) {
                    (3, false) => {
                        return Err(KbError::ArityMismatch {
                            predicate: name.to_string(),
                            arity: 3,
                            detail: "time argument missing",
                        })
                    }
                    (2, true) => {
                        return Err(KbError::ArityMismatch {
                            predicate: name.to_string(),
                            arity: 2,
                            detail: "unexpected time argument",
                        })
                    }
                    _ => {}
                }
                if !self.is_instance(subject, def.domain.as_str()) {
                    let domain = def.domain.to_string();
                    match self.mode {
                        DomainMode::Strict => {
                            return Err(KbError::DomainViolation {
                                predicate: name.to_string(),
                                subject: subject.clone(),
                                domain,
                            })
                        }
                        DomainMode::Lax => self.warnings.push(format!(
                            "DomainViolation: {subject} is not an instance of {domain} (domain of {name})"
                        )),
                    }
                }
            }
        }
        Ok(())
    }

    pub(crate) fn provenance(&mut self, inferred: bool) -> Provenance {
        let seq = self.next_seq;
        self.next_seq += 1;
        Provenance {
            source: self.source.clone(),
            seq,
            inferred,
        }
    }

    /// Stores a fact without schema checks. Returns true if the logical
    /// fact is new.
    pub(crate) fn insert_unchecked(&mut self, fact: Fact, prov: Provenance) -> bool {
        self.next_seq = self.next_seq.max(prov.seq + 1);
        if let Some(&idx) = self.lookup.get(&fact) {
            self.assertions[idx].provenance.push(prov);
            return false;
        }
        for id in fact.individuals() {
            self.individuals
                .entry(id.to_string())
                .or_insert_with(|| Individual {
                    id: id.to_string(),
                    labels: Vec::new(),
                });
        }
        if let FactKind::Relation {
            predicate,
            subject,
            object: Value::Text(label),
        } = &fact.kind
        {
            if predicate.as_str() == terms::HAS_LABEL || predicate.as_str() == terms::HAS_NAME {
                if let Some(ind) = self.individuals.get_mut(subject) {
                    if !ind.labels.contains(label) {
                        ind.labels.push(label.clone());
                    }
                }
            }
        }
        let idx = self.assertions.len();
        self.by_subject
            .entry(fact.subject().to_string())
            .or_default()
            .push(idx);
        self.by_predicate
            .entry(fact.predicate().to_string())
            .or_default()
            .push(idx);
        if let FactKind::Instance { category, .. } = &fact.kind {
            self.by_category
                .entry(category.clone())
                .or_default()
                .push(idx);
        }
        self.lookup.insert(fact.clone(), idx);
        self.assertions.push(Assertion {
            seq: prov.seq,
            fact,
            provenance: vec![prov],
        });
        true
    }

    /// Re-attributes entries made under the default source to `source`.
    pub(crate) fn restamp_default_source(&mut self, source: &str) {
        for a in &mut self.assertions {
            for p in &mut a.provenance {
                if p.source == DEFAULT_SOURCE {
                    p.source = source.to_string();
                }
            }
        }
    }

    /// Replaces the provenance list of a stored fact. No-op if absent or
    /// `provenance` is empty.
    pub(crate) fn replace_provenance(&mut self, fact: &Fact, provenance: Vec<Provenance>) {
        if provenance.is_empty() {
            return;
        }
        if let Some(&idx) = self.lookup.get(fact) {
            self.assertions[idx].provenance = provenance;
        }
    }

    /// Registers an individual with no facts.
    pub fn add_individual(&mut self, id: &str) -> Result<(), KbError> {
        check_name(id)?;
        self.individuals
            .entry(id.to_string())
            .or_insert_with(|| Individual {
                id: id.to_string(),
                labels: Vec::new(),
            });
        Ok(())
    }

    /// Categories directly asserted for `subject`.
    pub fn direct_types(&self, subject: &str) -> BTreeSet<&TermId> {
        self.by_subject
            .get(subject)
            .into_iter()
            .flatten()
            .filter_map(|&i| match &self.assertions[i].fact.kind {
                FactKind::Instance { category, .. } => Some(category),
                _ => None,
            })
            .collect()
    }

    /// True if some asserted type of `subject` is subsumed by `category`.
    pub fn is_instance(&self, subject: &str, category: &str) -> bool {
        self.direct_types(subject).into_iter().any(|t| {
            self.schema
                .is_subclass_of(t.as_str(), category)
                .unwrap_or(false)
        })
    }

    pub fn instances_of(
        &self,
        category: &str,
        mode: InstanceMode,
    ) -> Result<BTreeSet<String>, KbError> {
        if !self.schema.has_category(category) {
            return Err(KbError::UnknownCategory(category.to_string()));
        }
        let cats: Vec<TermId> = match mode {
            InstanceMode::Direct => vec![TermId::new(category)?],
            InstanceMode::Inferred => self.schema.descendants(category)?.into_iter().collect(),
        };
        Ok(cats
            .iter()
            .filter_map(|c| self.by_category.get(c))
            .flatten()
            .map(|&i| self.assertions[i].fact.subject().to_string())
            .collect())
    }

    /// All assertions matching the pattern, in ingest order.
    pub fn query(&self, pattern: &Pattern) -> Vec<&Assertion> {
        let candidates: Option<&Vec<usize>> = match (&pattern.subject, &pattern.predicate) {
            (Some(s), Some(p)) => {
                let a = self.by_subject.get(s);
                let b = self.by_predicate.get(p);
                match (a, b) {
                    (Some(a), Some(b)) => Some(if a.len() <= b.len() { a } else { b }),
                    _ => return Vec::new(),
                }
            }
            (Some(s), None) => match self.by_subject.get(s) {
                Some(v) => Some(v),
                None => return Vec::new(),
            },
            (None, Some(p)) => match self.by_predicate.get(p) {
                Some(v) => Some(v),
                None => return Vec::new(),
            },
            (None, None) => None,
        };
        match candidates {
            Some(idx) => idx
                .iter()
                .map(|&i| &self.assertions[i])
                .filter(|a| pattern.matches(&a.fact))
                .collect(),
            None => self
                .assertions
                .iter()
                .filter(|a| pattern.matches(&a.fact))
                .collect(),
        }
    }

    /// Gives a raw data element ontology semantics: the individual
    /// `data:<external_key>` becomes an instance of `category`.
    pub fn annotate(&mut self, external_key: &str, category: &str) -> Result<String, KbError> {
        let id = format!("data:{external_key}");
        self.assert_instance(&id, category, None)?;
        Ok(id)
    }

    /// Referential integrity problems; empty for a consistent store.
    pub fn audit(&self) -> Vec<String> {
        let mut problems = Vec::new();
        for (idx, a) in self.assertions.iter().enumerate() {
            let f = &a.fact;
            for id in f.individuals() {
                if !self.individuals.contains_key(id) {
                    problems.push(format!("{idx}: unknown individual {id}"));
                }
            }
            match &f.kind {
                FactKind::Instance { category, .. } => {
                    if !self.schema.has_category(category.as_str()) {
                        problems.push(format!("{idx}: unknown category {category}"));
                    }
                }
                FactKind::Relation {
                    predicate, object, ..
                } => match self.schema.relation(predicate.as_str()) {
                    None => problems.push(format!("{idx}: unknown predicate {predicate}")),
                    Some(def) => {
                        if !object.fits(&def.range) {
                            problems.push(format!("{idx}: object kind mismatch for {predicate}"));
                        }
                        if def.is_time_indexed() != f.at.is_some() {
                            problems.push(format!("{idx}: arity mismatch for {predicate}"));
                        }
                    }
                },
            }
            if self.lookup.get(f) != Some(&idx) {
                problems.push(format!("{idx}: lookup index out of sync"));
            }
            if a.provenance.is_empty() {
                problems.push(format!("{idx}: no provenance"));
            }
        }
        if self.lookup.len() != self.assertions.len() {
            problems.push("duplicate logical facts stored".to_string());
        }
        problems
    }
}
