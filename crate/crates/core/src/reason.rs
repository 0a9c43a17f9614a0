//! Forward materialization of inherited types and transitive/symmetric
//! relations, the orbit axioms, and size classification.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::kbstore::{
    Assertion, Fact, FactKind, InstanceMode, KbError, KnowledgeBase, Pattern, TimeRef, Unit, Value,
    ValueError,
};
use crate::ontology::{terms, RangeKind, RelationProperty, TermId};

/// Adjacency of one relation at one time index.
type TimedGraph = (Option<TimeRef>, BTreeMap<String, BTreeSet<String>>);

/// Objects of one functional relation per (subject, time index).
type FunctionalGroup<'a> = ((&'a str, Option<&'a TimeRef>), Vec<&'a Value>);

/// Adds `(x, D)` for every instantiation `(x, C)` and every strict ancestor
/// `D` of `C`, keeping the time index. Returns the number of new facts.
pub fn materialize_types(kb: &mut KnowledgeBase) -> usize {
    let instances: Vec<(String, TermId, Option<TimeRef>)> = kb
        .assertions()
        .iter()
        .filter_map(|a| match &a.fact.kind {
            FactKind::Instance { subject, category } => {
                Some((subject.clone(), category.clone(), a.fact.at.clone()))
            }
            _ => None,
        })
        .collect();
    let mut ancestors: HashMap<TermId, BTreeSet<TermId>> = HashMap::new();
    let mut added = 0;
    for (subject, category, at) in instances {
        let anc = ancestors
            .entry(category.clone())
            .or_insert_with(|| kb.schema().ancestors(category.as_str()).unwrap_or_default());
        for parent in anc.iter().filter(|p| **p != category) {
            let fact = Fact {
                kind: FactKind::Instance {
                    subject: subject.clone(),
                    category: parent.clone(),
                },
                at: at.clone(),
            };
            if !kb.contains(&fact) {
                let prov = kb.provenance(true);
                kb.insert_unchecked(fact, prov);
                added += 1;
            }
        }
    }
    added
}

/// Closes every symmetric relation under swapping and every transitive
/// relation under chaining, over individual-valued facts sharing a time
/// index. Returns the number of new facts.
pub fn close_transitive(kb: &mut KnowledgeBase) -> usize {
    let closable: Vec<(TermId, bool, bool)> = kb
        .schema()
        .relations()
        .filter(|r| matches!(r.range, RangeKind::Category(_)))
        .map(|r| {
            (
                r.id.clone(),
                r.has(RelationProperty::Symmetric),
                r.has(RelationProperty::Transitive),
            )
        })
        .filter(|(_, s, t)| *s || *t)
        .collect();

    let mut added = 0;
    for (predicate, symmetric, transitive) in closable {
        // time index -> adjacency
        let mut graphs: Vec<TimedGraph> = Vec::new();
        for a in kb.query(&Pattern::any().predicate(predicate.as_str())) {
            let FactKind::Relation {
                subject,
                object: Value::Individual(object),
                ..
            } = &a.fact.kind
            else {
                continue;
            };
            let pos = match graphs.iter().position(|(t, _)| *t == a.fact.at) {
                Some(p) => p,
                None => {
                    graphs.push((a.fact.at.clone(), BTreeMap::new()));
                    graphs.len() - 1
                }
            };
            let g = &mut graphs[pos].1;
            g.entry(subject.clone()).or_default().insert(object.clone());
            if symmetric {
                g.entry(object.clone()).or_default().insert(subject.clone());
            }
        }
        for (at, graph) in graphs {
            let closed = if transitive {
                reachability(&graph)
            } else {
                graph
            };
            for (s, objects) in closed {
                for o in objects {
                    let fact = Fact {
                        kind: FactKind::Relation {
                            predicate: predicate.clone(),
                            subject: s.clone(),
                            object: Value::Individual(o),
                        },
                        at: at.clone(),
                    };
                    if !kb.contains(&fact) {
                        let prov = kb.provenance(true);
                        kb.insert_unchecked(fact, prov);
                        added += 1;
                    }
                }
            }
        }
    }
    added
}

/// Nodes reachable in one or more steps, per source node.
fn reachability(graph: &BTreeMap<String, BTreeSet<String>>) -> BTreeMap<String, BTreeSet<String>> {
    let mut out = BTreeMap::new();
    for start in graph.keys() {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<&String> = graph[start].iter().collect();
        while let Some(n) = stack.pop() {
            if seen.insert(n.clone()) {
                if let Some(next) = graph.get(n) {
                    stack.extend(next.iter());
                }
            }
        }
        out.insert(start.clone(), seen);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AxiomId {
    /// Every orbital debris object has an orbit.
    DebrisHasOrbit,
    /// Every orbit has its six parameters or is described by a TLE.
    OrbitHasParameters,
    DomainRange,
    FunctionalUniqueness,
}

impl AxiomId {
    pub fn as_str(self) -> &'static str {
        match self {
            AxiomId::DebrisHasOrbit => "A1-debris-has-orbit",
            AxiomId::OrbitHasParameters => "A2-orbit-has-parameters",
            AxiomId::DomainRange => "A3-domain-range",
            AxiomId::FunctionalUniqueness => "A4-functional-uniqueness",
        }
    }
}

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AxiomViolation {
    pub axiom: AxiomId,
    pub subject: String,
    pub detail: String,
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}\t{}", self.axiom, self.subject, self.detail)
    }
}

/// Renders violations as `axiom_id, subject, detail` TSV rows.
pub fn violations_tsv(violations: &[AxiomViolation]) -> String {
    violations.iter().map(|v| format!("{v}\n")).collect()
}

/// Checks the orbit axioms, a domain/range audit and functional
/// uniqueness. Sorted by axiom, subject, detail; empty when all hold.
///
/// The domain/range audit only judges typed individuals: an individual
/// with no asserted category is unknown rather than wrong.
pub fn validate(kb: &KnowledgeBase) -> Vec<AxiomViolation> {
    let mut out = BTreeSet::new();
    for s in debris_without_orbit(kb) {
        out.insert(AxiomViolation {
            axiom: AxiomId::DebrisHasOrbit,
            subject: s,
            detail: format!(
                "missing {} fact linking it to an {}",
                terms::HAS_ORBIT,
                terms::ORBIT
            ),
        });
    }
    for (orbit, missing) in undescribed_orbits(kb) {
        out.insert(AxiomViolation {
            axiom: AxiomId::OrbitHasParameters,
            subject: orbit,
            detail: format!(
                "missing {} for: {}; and no {} link to a {}",
                terms::HAS_ORBITAL_PARAMETER,
                missing.join(", "),
                terms::IS_DESCRIBED_BY,
                terms::TLE
            ),
        });
    }
    audit_domain_range(kb, &mut out);
    audit_functional(kb, &mut out);
    out.into_iter().collect()
}

fn debris_without_orbit(kb: &KnowledgeBase) -> Vec<String> {
    let schema = kb.schema();
    if !schema.has_category(terms::ORBITAL_DEBRIS) || schema.relation(terms::HAS_ORBIT).is_none() {
        return Vec::new();
    }
    let debris = kb
        .instances_of(terms::ORBITAL_DEBRIS, InstanceMode::Inferred)
        .unwrap_or_default();
    debris
        .into_iter()
        .filter(|d| {
            kb.query(&Pattern::any().subject(d).predicate(terms::HAS_ORBIT))
                .is_empty()
        })
        .collect()
}

/// Orbits failing both ways of satisfying the parameter axiom, with the
/// parameter categories they lack.
fn undescribed_orbits(kb: &KnowledgeBase) -> Vec<(String, Vec<&'static str>)> {
    let schema = kb.schema();
    if !schema.has_category(terms::ORBIT) {
        return Vec::new();
    }
    let orbits = kb
        .instances_of(terms::ORBIT, InstanceMode::Inferred)
        .unwrap_or_default();
    let mut out = Vec::new();
    for orbit in orbits {
        let described = schema.has_category(terms::TLE)
            && kb
                .query(
                    &Pattern::any()
                        .subject(&orbit)
                        .predicate(terms::IS_DESCRIBED_BY),
                )
                .iter()
                .filter_map(|a| object_individual(a))
                .any(|t| kb.is_instance(t, terms::TLE));
        if described {
            continue;
        }
        let params: Vec<&str> = kb
            .query(
                &Pattern::any()
                    .subject(&orbit)
                    .predicate(terms::HAS_ORBITAL_PARAMETER),
            )
            .iter()
            .filter_map(|a| object_individual(a))
            .collect();
        let missing: Vec<&'static str> = terms::KEPLERIAN
            .into_iter()
            .filter(|cat| schema.has_category(cat))
            .filter(|cat| !params.iter().any(|p| kb.is_instance(p, cat)))
            .collect();
        if !missing.is_empty() {
            out.push((orbit, missing));
        }
    }
    out
}

fn object_individual(a: &Assertion) -> Option<&str> {
    match &a.fact.kind {
        FactKind::Relation {
            object: Value::Individual(o),
            ..
        } => Some(o),
        _ => None,
    }
}

fn audit_domain_range(kb: &KnowledgeBase, out: &mut BTreeSet<AxiomViolation>) {
    let schema = kb.schema();
    for a in kb.assertions() {
        let FactKind::Relation {
            predicate,
            subject,
            object,
        } = &a.fact.kind
        else {
            continue;
        };
        let Some(def) = schema.relation(predicate.as_str()) else {
            continue;
        };
        let mismatch = |ind: &str, category: &TermId| {
            let types = kb.direct_types(ind);
            (!types.is_empty() && !kb.is_instance(ind, category.as_str())).then(|| {
                types
                    .iter()
                    .map(|t| t.as_str())
                    .collect::<Vec<_>>()
                    .join(", ")
            })
        };
        if let Some(types) = mismatch(subject, &def.domain) {
            out.insert(AxiomViolation {
                axiom: AxiomId::DomainRange,
                subject: subject.clone(),
                detail: format!("{predicate}: subject typed {types} is not a {}", def.domain),
            });
        }
        match (&def.range, object) {
            (RangeKind::Category(range), Value::Individual(o)) => {
                if let Some(types) = mismatch(o, range) {
                    out.insert(AxiomViolation {
                        axiom: AxiomId::DomainRange,
                        subject: subject.clone(),
                        detail: format!("{predicate}: object {o} typed {types} is not a {range}"),
                    });
                }
            }
            (range, object) if !object.fits(range) => {
                out.insert(AxiomViolation {
                    axiom: AxiomId::DomainRange,
                    subject: subject.clone(),
                    detail: format!("{predicate}: object {object} is not of kind {range}"),
                });
            }
            _ => {}
        }
    }
}

fn audit_functional(kb: &KnowledgeBase, out: &mut BTreeSet<AxiomViolation>) {
    for def in kb
        .schema()
        .relations()
        .filter(|r| r.has(RelationProperty::Functional))
    {
        let mut groups: Vec<FunctionalGroup<'_>> = Vec::new();
        for a in kb.query(&Pattern::any().predicate(def.id.as_str())) {
            let FactKind::Relation {
                subject, object, ..
            } = &a.fact.kind
            else {
                continue;
            };
            let key = (subject.as_str(), a.fact.at.as_ref());
            match groups.iter_mut().find(|(k, _)| *k == key) {
                Some((_, objs)) => {
                    if !objs.contains(&object) {
                        objs.push(object)
                    }
                }
                None => groups.push((key, vec![object])),
            }
        }
        for ((subject, at), objects) in groups {
            if objects.len() > 1 {
                let listed: Vec<String> = objects.iter().map(|o| o.to_string()).collect();
                let when = at.map(|t| format!(" at {t}")).unwrap_or_default();
                out.insert(AxiomViolation {
                    axiom: AxiomId::FunctionalUniqueness,
                    subject: subject.to_string(),
                    detail: format!(
                        "{} has {} distinct objects{when}: {}",
                        def.id,
                        objects.len(),
                        listed.join(", ")
                    ),
                });
            }
        }
    }
}

/// Repairs existential failures with deterministic placeholder individuals:
/// `<subject>#orbit` for debris without an orbit, then `<orbit>#tle` for
/// orbits with neither parameters nor a TLE. Returns the created ids.
pub fn materialize_existentials(kb: &mut KnowledgeBase) -> Result<Vec<String>, KbError> {
    let mut created = Vec::new();
    for subject in debris_without_orbit(kb) {
        let orbit = format!("{subject}#orbit");
        insert_inferred(kb, instance(&orbit, terms::ORBIT)?)?;
        insert_inferred(
            kb,
            relation(terms::HAS_ORBIT, &subject, Value::individual(&orbit)?)?,
        )?;
        created.push(orbit);
    }
    if kb.schema().has_category(terms::TLE)
        && kb.schema().relation(terms::IS_DESCRIBED_BY).is_some()
    {
        for (orbit, _) in undescribed_orbits(kb) {
            let tle = format!("{orbit}#tle");
            insert_inferred(kb, instance(&tle, terms::TLE)?)?;
            insert_inferred(
                kb,
                relation(terms::IS_DESCRIBED_BY, &orbit, Value::individual(&tle)?)?,
            )?;
            created.push(tle);
        }
    }
    Ok(created)
}

fn instance(subject: &str, category: &str) -> Result<Fact, KbError> {
    Ok(Fact {
        kind: FactKind::Instance {
            subject: subject.to_string(),
            category: TermId::new(category)?,
        },
        at: None,
    })
}

fn relation(predicate: &str, subject: &str, object: Value) -> Result<Fact, KbError> {
    Ok(Fact {
        kind: FactKind::Relation {
            predicate: TermId::new(predicate)?,
            subject: subject.to_string(),
            object,
        },
        at: None,
    })
}

fn insert_inferred(kb: &mut KnowledgeBase, fact: Fact) -> Result<(), KbError> {
    if kb.contains(&fact) {
        return Ok(());
    }
    let prov = kb.provenance(true);
    kb.insert_checked(fact, prov)
}

/// Size buckets by diameter: Small below 1 cm, Medium 1 to 10 cm
/// inclusive, Large above 10 cm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SizeClass {
    Small,
    Medium,
    Large,
}

impl SizeClass {
    pub fn from_diameter_cm(d: f64) -> SizeClass {
        if d < 1.0 {
            SizeClass::Small
        } else if d <= 10.0 {
            SizeClass::Medium
        } else {
            SizeClass::Large
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SizeClass::Small => "Small",
            SizeClass::Medium => "Medium",
            SizeClass::Large => "Large",
        }
    }
}

impl fmt::Display for SizeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Buckets the latest `has_diameter` of `subject`. Later time index wins;
/// ties and incomparable times fall back to ingest order.
pub fn classify_size(kb: &KnowledgeBase, subject: &str) -> Result<Option<SizeClass>, KbError> {
    if kb.individual(subject).is_none() {
        return Err(KbError::UnknownIndividual(subject.to_string()));
    }
    let facts = kb.query(
        &Pattern::any()
            .subject(subject)
            .predicate(terms::HAS_DIAMETER),
    );
    let latest = facts.into_iter().max_by(|a, b| {
        let by_time = match (&a.fact.at, &b.fact.at) {
            (Some(x), Some(y)) => x.temporal_cmp(y).unwrap_or(Ordering::Equal),
            (Some(_), None) => Ordering::Greater,
            (None, Some(_)) => Ordering::Less,
            (None, None) => Ordering::Equal,
        };
        by_time.then(a.seq.cmp(&b.seq))
    });
    let Some(latest) = latest else {
        return Ok(None);
    };
    let FactKind::Relation {
        object: Value::Quantity(q),
        ..
    } = &latest.fact.kind
    else {
        return Ok(None);
    };
    let cm = q.to_unit(Unit::Cm).ok_or_else(|| {
        KbError::InvalidValue(ValueError::Quantity(format!(
            "diameter {q} is not a length"
        )))
    })?;
    Ok(Some(SizeClass::from_diameter_cm(cm.magnitude())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kbstore::import_odo;
    use crate::ontology::seed_schema;

    fn kb_from(text: &str) -> KnowledgeBase {
        let mut kb = KnowledgeBase::new(seed_schema());
        import_odo(&mut kb, text).unwrap();
        kb
    }

    #[test]
    fn materializes_ancestors() {
        let mut kb = kb_from("is_an_instance_of (1993-036BLP, Orbital Debris Fragment)\n");
        let added = materialize_types(&mut kb);
        for c in [
            "Orbital Debris",
            "Space Debris",
            "Debris",
            "Fragmentation Debris",
        ] {
            assert!(kb
                .instances_of(c, InstanceMode::Direct)
                .unwrap()
                .contains("1993-036BLP"));
        }
        // Fragmentation Debris, Orbital Debris, Space Debris, Debris, Physical Object, Entity
        assert_eq!(added, 6);
        assert_eq!(materialize_types(&mut kb), 0);
        let inferred = kb
            .assertions()
            .iter()
            .filter(|a| a.provenance.iter().all(|p| p.inferred))
            .count();
        assert_eq!(inferred, 6);
    }

    #[test]
    fn root_only_instances_unchanged() {
        let mut kb = kb_from("is_an_instance_of (x, Entity)\n");
        assert_eq!(materialize_types(&mut kb), 0);
        assert_eq!(kb.len(), 1);
    }

    #[test]
    fn part_of_chain_closes() {
        let mut kb = kb_from("part_of (a, b)\npart_of (b, c)\n");
        assert_eq!(close_transitive(&mut kb), 1);
        assert!(!kb
            .query(
                &Pattern::any()
                    .subject("a")
                    .object(Value::individual("c").unwrap())
            )
            .is_empty());
        assert_eq!(close_transitive(&mut kb), 0);
    }

    #[test]
    fn empty_kb_is_valid() {
        let kb = KnowledgeBase::new(seed_schema());
        assert!(validate(&kb).is_empty());
    }

    #[test]
    fn a1_and_a2() {
        let mut kb = kb_from(
            "is_an_instance_of (d, Rocket Body)\nis_an_instance_of (o, Orbit)\n\
             is_an_instance_of (p, Inclination)\nhas_orbital_parameter (o, p, t)\n",
        );
        let v = validate(&kb);
        assert_eq!(v.len(), 2);
        assert_eq!(v[0].axiom, AxiomId::DebrisHasOrbit);
        assert_eq!(v[0].subject, "d");
        assert_eq!(v[1].axiom, AxiomId::OrbitHasParameters);
        assert!(v[1].detail.contains("Eccentricity"));
        assert!(!v[1].detail.contains("Inclination,"));

        let created = materialize_existentials(&mut kb).unwrap();
        assert_eq!(created, ["d#orbit", "d#orbit#tle", "o#tle"]);
        assert!(validate(&kb).is_empty());
    }

    #[test]
    fn a3_flags_typed_mismatches_only() {
        let kb =
            kb_from("is_an_instance_of (e, Explosion Event)\norbits (e, Earth)\norbits (x, y)\n");
        let v = validate(&kb);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].axiom, AxiomId::DomainRange);
        assert_eq!(v[0].subject, "e");

        let kb = kb_from("is_an_instance_of (m, Orbit)\norbits (x, m)\n");
        let v: Vec<_> = validate(&kb)
            .into_iter()
            .filter(|v| v.axiom == AxiomId::DomainRange)
            .collect();
        assert_eq!(v.len(), 1);
        assert!(v[0].detail.contains("object m"));
    }

    #[test]
    fn a4_functional() {
        let kb = kb_from(
            "has_international_designator (x, \"1993-036BLP\")\n\
             has_international_designator (x, \"1993-036BLQ\")\n\
             has_international_designator (y, \"1993-036BLP\")\n",
        );
        let v = validate(&kb);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].axiom, AxiomId::FunctionalUniqueness);
        assert_eq!(v[0].subject, "x");
        assert_eq!(
            violations_tsv(&v),
            "A4-functional-uniqueness\tx\thas_international_designator has 2 distinct objects: \"1993-036BLP\", \"1993-036BLQ\"\n"
        );
    }

    #[test]
    fn size_classes() {
        let kb = kb_from(
            "has_diameter (a, 5 cm, 2009-02-10)\nhas_diameter (b, 0.5 cm, t)\n\
             has_diameter (c, 10 cm, t)\nhas_diameter (d, 0.05 m, t)\n\
             has_diameter (e, 1 cm, t)\nhas_diameter (f, 10.5 cm, t)\n\
             has_diameter (g, 50 cm, 2010-01-01)\nhas_diameter (g, 2 cm, 2009-01-01)\n\
             has_diameter (h, 3 kg, t)\nhas_label (n, \"none\")\n",
        );
        let class = |s| classify_size(&kb, s).unwrap();
        assert_eq!(class("a"), Some(SizeClass::Medium));
        assert_eq!(class("b"), Some(SizeClass::Small));
        assert_eq!(class("c"), Some(SizeClass::Medium));
        assert_eq!(class("d"), Some(SizeClass::Medium));
        assert_eq!(class("e"), Some(SizeClass::Medium));
        assert_eq!(class("f"), Some(SizeClass::Large));
        assert_eq!(class("g"), Some(SizeClass::Large));
        assert_eq!(class("n"), None);
        assert!(classify_size(&kb, "h").is_err());
        assert_eq!(
            classify_size(&kb, "zz"),
            Err(KbError::UnknownIndividual("zz".into()))
        );
    }
}
