use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use super::term::{TermError, TermId};

/// Built-in instantiation predicate. Not redefinable.
pub const INSTANCE_OF: &str = "is_an_instance_of";
/// Built-in subsumption predicate. Not redefinable.
pub const IS_A: &str = "Is a";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("{kind} {name:?} is already defined")]
    DuplicateTerm { kind: TermKind, name: String },
    #[error("category {category:?} names unknown parent {parent:?}")]
    UnknownParent { category: String, parent: String },
    #[error("relation {relation:?} names unknown domain {domain:?}")]
    UnknownDomain { relation: String, domain: String },
    #[error("relation {relation:?} names unknown range {range:?}")]
    UnknownRange { relation: String, range: String },
    #[error("relation {relation:?} names unknown inverse {inverse:?}")]
    UnknownInverse { relation: String, inverse: String },
    #[error("relation {relation:?} is not a valid inverse of {inverse:?}: {detail}")]
    InverseMismatch {
        relation: String,
        inverse: String,
        detail: String,
    },
    #[error("transitive relation {relation:?} needs a range comparable with its domain")]
    TransitiveRange { relation: String },
    #[error("{0:?} is a built-in relation")]
    ReservedTerm(String),
    #[error("unknown term {0:?}")]
    UnknownTerm(String),
    #[error(transparent)]
    Term(#[from] TermError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TermKind {
    Category,
    Relation,
}

impl fmt::Display for TermKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TermKind::Category => f.write_str("category"),
            TermKind::Relation => f.write_str("relation"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryDef {
    pub id: TermId,
    pub nl_definition: String,
    pub parents: BTreeSet<TermId>,
    pub primitive: bool,
}

impl CategoryDef {
    /// A category with the given parents. An empty definition marks it primitive.
    pub fn new<I, S>(id: &str, nl_definition: &str, parents: I) -> Result<Self, TermError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let parents = parents
            .into_iter()
            .map(|p| TermId::new(p.as_ref()))
            .collect::<Result<_, _>>()?;
        Ok(CategoryDef {
            id: TermId::new(id)?,
            nl_definition: nl_definition.to_string(),
            parents,
            primitive: nl_definition.is_empty(),
        })
    }

    /// A category with no parents and no definition.
    pub fn root(id: &str) -> Result<Self, TermError> {
        CategoryDef::new::<_, &str>(id, "", [])
    }
}

/// What the object slot of a relation holds.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RangeKind {
    Category(TermId),
    Quantity,
    Text,
    Time,
}

impl RangeKind {
    pub fn parse(s: &str) -> Result<Self, TermError> {
        Ok(match s {
            "quantity" => RangeKind::Quantity,
            "text" => RangeKind::Text,
            "time" => RangeKind::Time,
            other => RangeKind::Category(TermId::new(other)?),
        })
    }

    pub fn category(&self) -> Option<&TermId> {
        match self {
            RangeKind::Category(c) => Some(c),
            _ => None,
        }
    }
}

impl fmt::Display for RangeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RangeKind::Category(c) => write!(f, "{c}"),
            RangeKind::Quantity => f.write_str("quantity"),
            RangeKind::Text => f.write_str("text"),
            RangeKind::Time => f.write_str("time"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelationProperty {
    Transitive,
    Symmetric,
    Functional,
}

impl RelationProperty {
    pub fn as_str(self) -> &'static str {
        match self {
            RelationProperty::Transitive => "transitive",
            RelationProperty::Symmetric => "symmetric",
            RelationProperty::Functional => "functional",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "transitive" => Some(RelationProperty::Transitive),
            "symmetric" => Some(RelationProperty::Symmetric),
            "functional" => Some(RelationProperty::Functional),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationDef {
    pub id: TermId,
    /// 2, or 3 when the third slot is a time reference.
    pub arity: u8,
    pub domain: TermId,
    pub range: RangeKind,
    pub properties: BTreeSet<RelationProperty>,
    pub inverse_of: Option<TermId>,
}

impl RelationDef {
    pub fn new(id: &str, arity: u8, domain: &str, range: &str) -> Result<Self, TermError> {
        Ok(RelationDef {
            id: TermId::new(id)?,
            arity,
            domain: TermId::new(domain)?,
            range: RangeKind::parse(range)?,
            properties: BTreeSet::new(),
            inverse_of: None,
        })
    }

    pub fn with_property(mut self, prop: RelationProperty) -> Self {
        self.properties.insert(prop);
        self
    }

    pub fn with_inverse(mut self, inverse: &str) -> Result<Self, TermError> {
        self.inverse_of = Some(TermId::new(inverse)?);
        Ok(self)
    }

    pub fn has(&self, prop: RelationProperty) -> bool {
        self.properties.contains(&prop)
    }

    pub fn is_time_indexed(&self) -> bool {
        self.arity == 3
    }
}

/// One problem found by [`Schema::check`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SchemaDefect {
    pub term: String,
    pub rule: DefectRule,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DefectRule {
    /// Members of an Is-a cycle, sorted.
    Cycle(Vec<String>),
    UnknownParent(String),
    UnknownDomain(String),
    UnknownRange(String),
    UnknownInverse(String),
    InverseMismatch(String),
    PrimitiveFlag,
    BadArity(u8),
    TransitiveRange,
    ReservedName,
}

impl DefectRule {
    pub fn name(&self) -> &'static str {
        match self {
            DefectRule::Cycle(_) => "Cycle",
            DefectRule::UnknownParent(_) => "UnknownParent",
            DefectRule::UnknownDomain(_) => "UnknownDomain",
            DefectRule::UnknownRange(_) => "UnknownRange",
            DefectRule::UnknownInverse(_) => "UnknownInverse",
            DefectRule::InverseMismatch(_) => "InverseMismatch",
            DefectRule::PrimitiveFlag => "PrimitiveFlag",
            DefectRule::BadArity(_) => "BadArity",
            DefectRule::TransitiveRange => "TransitiveRange",
            DefectRule::ReservedName => "ReservedName",
        }
    }

    pub fn detail(&self) -> String {
        match self {
            DefectRule::Cycle(members) => members.join(", "),
            DefectRule::UnknownParent(t)
            | DefectRule::UnknownDomain(t)
            | DefectRule::UnknownRange(t)
            | DefectRule::UnknownInverse(t)
            | DefectRule::InverseMismatch(t) => t.clone(),
            DefectRule::PrimitiveFlag => "primitive flag disagrees with empty definition".into(),
            DefectRule::BadArity(a) => format!("arity {a}"),
            DefectRule::TransitiveRange => "range not comparable with domain".into(),
            DefectRule::ReservedName => "built-in relation name".into(),
        }
    }
}

impl fmt::Display for SchemaDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\t{}\t{}",
            self.term,
            self.rule.name(),
            self.rule.detail()
        )
    }
}

/// Category and relation terms plus the Is-a taxonomy.
///
/// Values are immutable: `add_category` and `add_relation` return a new
/// schema and leave the receiver untouched.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Schema {
    categories: BTreeMap<TermId, CategoryDef>,
    relations: BTreeMap<TermId, RelationDef>,
}

impl Schema {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a schema without checking references. Use [`Schema::check`]
    /// on the result; forward references and cycles are only detectable there.
    pub fn from_parts(
        categories: impl IntoIterator<Item = CategoryDef>,
        relations: impl IntoIterator<Item = RelationDef>,
    ) -> Self {
        Schema {
            categories: categories.into_iter().map(|c| (c.id.clone(), c)).collect(),
            relations: relations.into_iter().map(|r| (r.id.clone(), r)).collect(),
        }
    }

    pub fn categories(&self) -> impl Iterator<Item = &CategoryDef> {
        self.categories.values()
    }

    pub fn relations(&self) -> impl Iterator<Item = &RelationDef> {
        self.relations.values()
    }

    pub fn category(&self, name: &str) -> Option<&CategoryDef> {
        self.categories.get(name)
    }

    pub fn relation(&self, name: &str) -> Option<&RelationDef> {
        self.relations.get(name)
    }

    pub fn has_category(&self, name: &str) -> bool {
        self.categories.contains_key(name)
    }

    pub fn add_category(&self, def: CategoryDef) -> Result<Schema, SchemaError> {
        if self.categories.contains_key(&def.id) {
            return Err(SchemaError::DuplicateTerm {
                kind: TermKind::Category,
                name: def.id.to_string(),
            });
        }
        if let Some(p) = def
            .parents
            .iter()
            .find(|p| !self.categories.contains_key(*p))
        {
            return Err(SchemaError::UnknownParent {
                category: def.id.to_string(),
                parent: p.to_string(),
            });
        }
        let mut next = self.clone();
        next.categories.insert(def.id.clone(), def);
        Ok(next)
    }

    pub fn add_relation(&self, def: RelationDef) -> Result<Schema, SchemaError> {
        let name = def.id.to_string();
        if name == INSTANCE_OF || name == IS_A {
            return Err(SchemaError::ReservedTerm(name));
        }
        if self.relations.contains_key(&def.id) {
            return Err(SchemaError::DuplicateTerm {
                kind: TermKind::Relation,
                name,
            });
        }
        if !self.categories.contains_key(&def.domain) {
            return Err(SchemaError::UnknownDomain {
                relation: name,
                domain: def.domain.to_string(),
            });
        }
        if let RangeKind::Category(r) = &def.range {
            if !self.categories.contains_key(r) {
                return Err(SchemaError::UnknownRange {
                    relation: name,
                    range: r.to_string(),
                });
            }
        }
        if def.has(RelationProperty::Transitive) && !self.transitive_range_ok(&def) {
            return Err(SchemaError::TransitiveRange { relation: name });
        }
        let mut next = self.clone();
        if let Some(inv) = &def.inverse_of {
            let other = self
                .relations
                .get(inv)
                .ok_or_else(|| SchemaError::UnknownInverse {
                    relation: name.clone(),
                    inverse: inv.to_string(),
                })?;
            if let Err(detail) = inverse_compatible(&def, other) {
                return Err(SchemaError::InverseMismatch {
                    relation: name,
                    inverse: inv.to_string(),
                    detail,
                });
            }
            if other.inverse_of.as_ref().is_some_and(|o| *o != def.id) {
                return Err(SchemaError::InverseMismatch {
                    relation: name,
                    inverse: inv.to_string(),
                    detail: format!("{inv} is already the inverse of another relation"),
                });
            }
            let mut other = other.clone();
            other.inverse_of = Some(def.id.clone());
            next.relations.insert(other.id.clone(), other);
        }
        next.relations.insert(def.id.clone(), def);
        Ok(next)
    }

    fn transitive_range_ok(&self, def: &RelationDef) -> bool {
        match &def.range {
            RangeKind::Category(r) => {
                self.reaches(def.domain.as_str(), r.as_str())
                    || self.reaches(r.as_str(), def.domain.as_str())
            }
            _ => false,
        }
    }

    fn require(&self, name: &str) -> Result<&CategoryDef, SchemaError> {
        self.categories
            .get(name)
            .ok_or_else(|| SchemaError::UnknownTerm(name.to_string()))
    }

    /// Reflexive-transitive Is-a test.
    pub fn is_subclass_of(&self, a: &str, b: &str) -> Result<bool, SchemaError> {
        self.require(a)?;
        self.require(b)?;
        Ok(self.reaches(a, b))
    }

    /// Walks parent edges from `from`; tolerates cycles and dangling parents.
    fn reaches(&self, from: &str, to: &str) -> bool {
        if from == to {
            return true;
        }
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        let mut stack = vec![from];
        while let Some(cur) = stack.pop() {
            if !seen.insert(cur) {
                continue;
            }
            if let Some(def) = self.categories.get(cur) {
                for p in &def.parents {
                    if p.as_str() == to {
                        return true;
                    }
                    stack.push(p.as_str());
                }
            }
        }
        false
    }

    /// Every category `c` is a subclass of, including `c`.
    pub fn ancestors(&self, c: &str) -> Result<BTreeSet<TermId>, SchemaError> {
        let start = self.require(c)?;
        let mut out = BTreeSet::new();
        let mut stack = vec![start.id.clone()];
        while let Some(cur) = stack.pop() {
            if !out.insert(cur.clone()) {
                continue;
            }
            if let Some(def) = self.categories.get(&cur) {
                stack.extend(def.parents.iter().cloned());
            }
        }
        Ok(out)
    }

    /// Every category that is a subclass of `c`, including `c`.
    pub fn descendants(&self, c: &str) -> Result<BTreeSet<TermId>, SchemaError> {
        self.require(c)?;
        Ok(self
            .categories
            .keys()
            .filter(|k| self.reaches(k.as_str(), c))
            .cloned()
            .collect())
    }

    /// Lists every defect; an empty result means the schema is well formed.
    pub fn check(&self) -> Vec<SchemaDefect> {
        let mut defects = BTreeSet::new();
        let mut push = |term: &TermId, rule| {
            defects.insert(SchemaDefect {
                term: term.to_string(),
                rule,
            });
        };

        for def in self.categories.values() {
            for p in &def.parents {
                if !self.categories.contains_key(p) {
                    push(&def.id, DefectRule::UnknownParent(p.to_string()));
                }
            }
            if def.primitive != def.nl_definition.is_empty() {
                push(&def.id, DefectRule::PrimitiveFlag);
            }
        }
        for members in self.cycles() {
            let first = TermId::new(members[0].clone()).expect("member names are valid terms");
            push(&first, DefectRule::Cycle(members));
        }

        for def in self.relations.values() {
            if def.id.as_str() == INSTANCE_OF || def.id.as_str() == IS_A {
                push(&def.id, DefectRule::ReservedName);
            }
            if def.arity != 2 && def.arity != 3 {
                push(&def.id, DefectRule::BadArity(def.arity));
            }
            let domain_ok = self.categories.contains_key(&def.domain);
            if !domain_ok {
                push(&def.id, DefectRule::UnknownDomain(def.domain.to_string()));
            }
            let range_ok = match &def.range {
                RangeKind::Category(r) if !self.categories.contains_key(r) => {
                    push(&def.id, DefectRule::UnknownRange(r.to_string()));
                    false
                }
                _ => true,
            };
            if def.has(RelationProperty::Transitive)
                && domain_ok
                && range_ok
                && !self.transitive_range_ok(def)
            {
                push(&def.id, DefectRule::TransitiveRange);
            }
            if let Some(inv) = &def.inverse_of {
                match self.relations.get(inv) {
                    None => push(&def.id, DefectRule::UnknownInverse(inv.to_string())),
                    Some(other) => {
                        if let Err(detail) = inverse_compatible(def, other) {
                            push(&def.id, DefectRule::InverseMismatch(detail));
                        } else if other.inverse_of.as_ref() != Some(&def.id) {
                            push(
                                &def.id,
                                DefectRule::InverseMismatch(format!(
                                    "{inv} does not name {} as its inverse",
                                    def.id
                                )),
                            );
                        }
                    }
                }
            }
        }
        defects.into_iter().collect()
    }

    /// Strongly connected Is-a components with more than one member, plus
    /// self-parented categories.
    fn cycles(&self) -> Vec<Vec<String>> {
        let mut groups: BTreeSet<Vec<String>> = BTreeSet::new();
        for def in self.categories.values() {
            let on_cycle = def
                .parents
                .iter()
                .any(|p| self.reaches(p.as_str(), def.id.as_str()));
            if !on_cycle {
                continue;
            }
            let members: Vec<String> = self
                .categories
                .keys()
                .filter(|k| {
                    self.reaches(def.id.as_str(), k.as_str())
                        && self.reaches(k.as_str(), def.id.as_str())
                })
                .map(|k| k.to_string())
                .collect();
            groups.insert(members);
        }
        groups.into_iter().collect()
    }
}

/// `def` may be the inverse of `other` only when domain and range swap and
/// both ranges are categories.
fn inverse_compatible(def: &RelationDef, other: &RelationDef) -> Result<(), String> {
    match (&def.range, &other.range) {
        (RangeKind::Category(r), RangeKind::Category(or)) => {
            if *r != other.domain {
                Err(format!(
                    "range {r} differs from domain {} of {}",
                    other.domain, other.id
                ))
            } else if *or != def.domain {
                Err(format!(
                    "domain {} differs from range {or} of {}",
                    def.domain, other.id
                ))
            } else if def.arity != other.arity {
                Err(format!("arity {} differs from {}", def.arity, other.arity))
            } else {
                Ok(())
            }
        }
        _ => Err("inverse relations need category ranges".to_string()),
    }
}
