use super::record::TleRecord;
use crate::kbstore::{KbError, KnowledgeBase, Pattern, Quantity, TimeRef, Unit, Value};
use crate::ontology::terms;

/// Individuals created or reused by [`annotate_tle`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TleAnnotation {
    pub orbit: String,
    pub element_set: String,
    /// One per Keplerian parameter, in [`terms::KEPLERIAN`] order.
    pub parameters: Vec<String>,
    pub epoch: TimeRef,
}

const SHORT_NAMES: [&str; 6] = [
    "inclination",
    "eccentricity",
    "raan",
    "arg_perigee",
    "mean_anomaly",
    "mean_motion",
];

/// The individual a record describes: an existing holder of its
/// designator, else of its catalog number, else the long-form designator
/// (or `NORAD-<catalog number>` when the designator is blank).
pub fn resolve_subject(kb: &KnowledgeBase, rec: &TleRecord) -> String {
    let designator = rec.intl_designator.as_ref().map(|d| d.to_string());
    let catalog = format!("{:05}", rec.catalog_number);
    let holder = |predicate: &str, key: &str| {
        kb.query(&Pattern::any().predicate(predicate).object(Value::text(key)))
            .first()
            .map(|a| a.fact.subject().to_string())
    };
    designator
        .as_deref()
        .and_then(|d| holder(terms::HAS_INTL_DESIGNATOR, d))
        .or_else(|| holder(terms::HAS_CATALOG_NUMBER, &catalog))
        .or(designator)
        .unwrap_or_else(|| format!("NORAD-{catalog}"))
}

/// Records `rec` against `subject`: the subject's orbit (reused when a
/// `has_orbit` fact exists, else `<subject>#orbit`), an element-set
/// individual describing it, six epoch-indexed parameters with values, and
/// the catalog identifiers. An untyped subject is typed with the domain of
/// `has_orbit`.
pub fn annotate_tle(
    kb: &mut KnowledgeBase,
    rec: &TleRecord,
    subject: &str,
) -> Result<TleAnnotation, KbError> {
    kb.add_individual(subject)?;
    if kb.direct_types(subject).is_empty() {
        let domain = kb
            .schema()
            .relation(terms::HAS_ORBIT)
            .map(|r| r.domain.to_string());
        if let Some(domain) = domain {
            kb.assert_instance(subject, &domain, None)?;
        }
    }
    let epoch = rec.epoch();
    let stamp = format!("{:02}{:012.8}", rec.epoch_year, rec.epoch_day);

    let existing = kb
        .query(&Pattern::any().subject(subject).predicate(terms::HAS_ORBIT))
        .into_iter()
        .find_map(|a| match &a.fact.kind {
            crate::kbstore::FactKind::Relation { object, .. } => {
                object.as_individual().map(str::to_string)
            }
            _ => None,
        });
    let orbit = match existing {
        Some(o) => o,
        None => {
            let o = format!("{subject}#orbit");
            kb.assert_instance(&o, terms::ORBIT, None)?;
            kb.assert_relation(terms::HAS_ORBIT, subject, Value::individual(&o)?, None)?;
            o
        }
    };

    let element_set = format!("{subject}#tle@{stamp}");
    kb.assert_instance(&element_set, terms::TLE, None)?;
    kb.assert_relation(
        terms::HAS_EPOCH,
        &element_set,
        Value::Time(epoch.clone()),
        None,
    )?;
    kb.assert_relation(
        terms::IS_DESCRIBED_BY,
        &orbit,
        Value::individual(&element_set)?,
        None,
    )?;

    let values = [
        (rec.inclination, Unit::Deg),
        (rec.eccentricity, Unit::Dimensionless),
        (rec.raan, Unit::Deg),
        (rec.arg_perigee, Unit::Deg),
        (rec.mean_anomaly, Unit::Deg),
        (rec.mean_motion, Unit::RevPerDay),
    ];
    let mut parameters = Vec::with_capacity(6);
    for ((category, short), (magnitude, unit)) in
        terms::KEPLERIAN.iter().zip(SHORT_NAMES).zip(values)
    {
        let param = format!("{orbit}#{short}@{stamp}");
        kb.assert_instance(&param, category, None)?;
        kb.assert_relation(
            terms::HAS_VALUE,
            &param,
            Value::Quantity(Quantity::new(magnitude, unit)?),
            None,
        )?;
        kb.assert_relation(
            terms::HAS_ORBITAL_PARAMETER,
            &orbit,
            Value::individual(&param)?,
            Some(epoch.clone()),
        )?;
        parameters.push(param);
    }

    if let Some(d) = &rec.intl_designator {
        kb.assert_relation(
            terms::HAS_INTL_DESIGNATOR,
            subject,
            Value::text(d.to_string()),
            None,
        )?;
    }
    kb.assert_relation(
        terms::HAS_CATALOG_NUMBER,
        subject,
        Value::text(format!("{:05}", rec.catalog_number)),
        None,
    )?;

    Ok(TleAnnotation {
        orbit,
        element_set,
        parameters,
        epoch,
    })
}
