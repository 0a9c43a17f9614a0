mod common;

use std::collections::BTreeSet;

use odo_kb::federation::{
    merge_hub, read_catalog, resolve_identity, sync_peer, write_catalog, Catalog, ConflictRule,
    FederationError, IdentityKey, MergePolicy, SchemaRule, PROVENANCE_FILE,
};
use odo_kb::kbstore::{import_odo, KnowledgeBase, Pattern, TimeRef, Unit, Value};
use odo_kb::ontology::{CategoryDef, Schema};
use odo_kb::seed_schema;

fn catalog(source: &str, facts: &str) -> Catalog {
    let mut kb = KnowledgeBase::new(seed_schema());
    import_odo(&mut kb, facts).unwrap();
    Catalog::new(source, kb).unwrap()
}

fn keep_all() -> MergePolicy {
    MergePolicy::default().with_conflict_rule(ConflictRule::KeepAll)
}

#[test]
fn shared_designator_forms_one_cluster() {
    let a = catalog(
        "A",
        "has_international_designator (frag, \"1993-036BLP\")\n",
    );
    let b = catalog(
        "B",
        "has_international_designator (debris-17, \"1993-036BLP\")\n",
    );
    let clusters = resolve_identity(&[a, b], &MergePolicy::default());
    assert_eq!(clusters.len(), 1);
    assert_eq!(clusters[0].members.len(), 2);
    assert_eq!(clusters[0].canonical, "debris-17");
}

#[test]
fn disjoint_keys_give_singletons() {
    let a = catalog("A", "has_international_designator (x, \"1993-036A\")\n");
    let b = catalog("B", "has_international_designator (y, \"1993-036B\")\n");
    let clusters = resolve_identity(&[a, b], &MergePolicy::default());
    assert_eq!(clusters.len(), 2);
    assert!(clusters.iter().all(|c| c.members.len() == 1));
}

#[test]
fn catalog_number_key_links_when_designators_absent() {
    let a = catalog("A", "has_catalog_number (x, \"25544\")\n");
    let b = catalog("B", "has_catalog_number (zarya, \"25544\")\n");
    let only_designator = MergePolicy::new(
        vec![IdentityKey::InternationalDesignator],
        ConflictRule::KeepAll,
        SchemaRule::UnionWithDefectReport,
    )
    .unwrap();
    assert_eq!(
        resolve_identity(&[a.clone(), b.clone()], &only_designator).len(),
        2
    );
    assert_eq!(resolve_identity(&[a, b], &MergePolicy::default()).len(), 1);
}

#[test]
fn overlapping_catalogs_union_with_provenance() {
    let a = catalog(
        "A",
        "is_an_instance_of (frag, Orbital Debris Fragment)\n\
         orbits (frag, Earth)\n\
         has_label (frag, \"fragment\")\n",
    );
    let b = catalog(
        "B",
        "orbits (frag, Earth)\n\
         has_altitude (frag, 934 km)\n",
    );
    let master = merge_hub(&[a, b], &keep_all()).unwrap().master;
    assert_eq!(master.kb().len(), 4);
    let shared = master
        .kb()
        .query(&Pattern::any().predicate("orbits"))
        .into_iter()
        .next()
        .unwrap();
    let sources: BTreeSet<&str> = shared
        .provenance
        .iter()
        .map(|p| p.source.as_str())
        .collect();
    assert_eq!(sources, BTreeSet::from(["A", "B"]));
    assert_eq!(shared.provenance.len(), 2);
}

#[test]
fn merge_with_empty_is_identity() {
    let a = catalog("A", "orbits (frag, Earth)\nhas_altitude (frag, 934 km)\n");
    let empty = catalog("Z", "");
    let master = merge_hub(&[a.clone(), empty], &MergePolicy::default())
        .unwrap()
        .master;
    assert_eq!(master.kb().fact_set(), a.kb().fact_set());
}

#[test]
fn identical_schema_rule() {
    let a = catalog("A", "orbits (x, Earth)\n");
    let other = Schema::new()
        .add_category(CategoryDef::root("Thing").unwrap())
        .unwrap();
    let b = Catalog::new("B", KnowledgeBase::new(other)).unwrap();
    let strict = MergePolicy::default().with_schema_rule(SchemaRule::RequireIdentical);
    assert!(matches!(
        merge_hub(&[a.clone(), b.clone()], &strict),
        Err(FederationError::SchemaConflict { .. })
    ));
    let union = merge_hub(&[a, b], &MergePolicy::default()).unwrap();
    assert!(union.master.kb().schema().has_category("Thing"));
    assert!(union.master.kb().schema().has_category("Orbital Debris"));
}

#[test]
fn latest_epoch_wins_only_for_time_indexed_facts() {
    let a = catalog(
        "A",
        "has_diameter (x, 5 cm, 2009-02-10T00:00:00Z)\nhas_label (x, \"old\")\n",
    );
    let b = catalog(
        "B",
        "has_diameter (x, 12 cm, 2010-02-10T00:00:00Z)\nhas_label (x, \"new\")\n",
    );
    let latest = merge_hub(&[a.clone(), b.clone()], &MergePolicy::default())
        .unwrap()
        .master;
    let diameters = latest.kb().query(&Pattern::any().predicate("has_diameter"));
    assert_eq!(diameters.len(), 1);
    assert_eq!(
        diameters[0].fact.at,
        Some(TimeRef::new("2010-02-10T00:00:00Z").unwrap())
    );
    assert_eq!(
        latest
            .kb()
            .query(&Pattern::any().predicate("has_label"))
            .len(),
        2
    );
    let all = merge_hub(&[a, b], &keep_all()).unwrap().master;
    assert_eq!(
        all.kb()
            .query(&Pattern::any().predicate("has_diameter"))
            .len(),
        2
    );
}

#[test]
fn latest_epoch_ties_and_opaque_tokens_keep_all() {
    let a = catalog("A", "has_diameter (x, 5 cm, 2009-02-10T00:00:00Z)\n");
    let b = catalog("B", "has_diameter (x, 6 cm, 2009-02-10T00:00:00Z)\n");
    let c = catalog("C", "has_diameter (x, 7 cm, t-old)\n");
    let tie = merge_hub(&[a.clone(), b], &MergePolicy::default())
        .unwrap()
        .master;
    assert_eq!(tie.kb().len(), 2);
    let opaque = merge_hub(&[a, c], &MergePolicy::default()).unwrap().master;
    assert_eq!(opaque.kb().len(), 2);
}

#[test]
fn sync_with_copy_changes_nothing() {
    let a = catalog("A", "orbits (x, Earth)\nhas_diameter (x, 5 cm, t1)\n");
    let copy = Catalog::new("A-copy", a.kb().clone()).unwrap();
    let (a2, b2) = sync_peer(&a, &copy, &MergePolicy::default()).unwrap();
    assert_eq!(a2.kb().fact_set(), a.kb().fact_set());
    assert_eq!(b2.kb().fact_set(), a.kb().fact_set());
    assert_eq!(a2.source_id(), "A");
    let (a3, b3) = sync_peer(&a2, &b2, &MergePolicy::default()).unwrap();
    assert_eq!(a3.kb().fact_set(), a2.kb().fact_set());
    assert_eq!(b3.kb().fact_set(), b2.kb().fact_set());
}

#[test]
fn synced_peers_answer_queries_alike() {
    let a = catalog(
        "A",
        "has_international_designator (x, \"1993-036A\")\norbits (x, Earth)\n",
    );
    let b = catalog(
        "B",
        "has_international_designator (y, \"1993-036A\")\nhas_altitude (y, 790 km)\n",
    );
    let (a2, b2) = sync_peer(&a, &b, &MergePolicy::default()).unwrap();
    for pattern in [
        Pattern::any(),
        Pattern::any().subject("x"),
        Pattern::any().predicate("has_altitude"),
        Pattern::any().object(Value::quantity(790.0, Unit::Km).unwrap()),
    ] {
        let qa: BTreeSet<String> = a2
            .kb()
            .query(&pattern)
            .iter()
            .map(|a| odo_kb::kbstore::format_fact(&a.fact))
            .collect();
        let qb: BTreeSet<String> = b2
            .kb()
            .query(&pattern)
            .iter()
            .map(|a| odo_kb::kbstore::format_fact(&a.fact))
            .collect();
        assert_eq!(qa, qb);
    }
    assert_eq!(a2.kb().query(&Pattern::any().subject("x")).len(), 3);
}

#[test]
fn policy_and_catalog_invariants() {
    assert!(matches!(
        MergePolicy::new(vec![], ConflictRule::KeepAll, SchemaRule::RequireIdentical),
        Err(FederationError::EmptyIdentityKeys)
    ));
    assert!(matches!(
        Catalog::new(" ", KnowledgeBase::new(seed_schema())),
        Err(FederationError::EmptySourceId)
    ));
    let mut kb = KnowledgeBase::new(seed_schema());
    import_odo(&mut kb, "orbits (x, Earth)\n").unwrap();
    let c = Catalog::new("ESA", kb).unwrap();
    assert!(c
        .kb()
        .assertions()
        .iter()
        .all(|a| a.provenance.iter().all(|p| p.source == "ESA")));
}

#[test]
fn directory_round_trip_keeps_provenance_and_aliases() {
    let a = catalog(
        "A",
        "has_international_designator (x, \"1993-036A\")\norbits (x, Earth)\n",
    );
    let b = catalog(
        "B",
        "has_international_designator (y, \"1993-036A\")\norbits (y, Earth)\n",
    );
    let outcome = merge_hub(&[a, b], &MergePolicy::default()).unwrap();
    let root = std::env::temp_dir().join(format!("odo-fed-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&root);
    let dir = write_catalog(&root, &outcome.master).unwrap();
    assert!(dir.join(PROVENANCE_FILE).exists());
    let back = read_catalog(&dir).unwrap();
    assert_eq!(back.kb().fact_set(), outcome.master.kb().fact_set());
    assert_eq!(back.same_as(), outcome.master.same_as());
    assert_eq!(
        back.same_as().get("x"),
        Some(&BTreeSet::from(["y".to_string()]))
    );
    for fact in back.kb().assertions() {
        let sources: BTreeSet<&str> = fact.provenance.iter().map(|p| p.source.as_str()).collect();
        assert_eq!(sources, BTreeSet::from(["A", "B"]));
    }
    std::fs::remove_dir_all(&root).unwrap();
}

#[test]
fn tle_files_in_a_catalog_directory_are_annotated() {
    let root = std::env::temp_dir().join(format!("odo-tle-{}", std::process::id()));
    let dir = root.join("NORAD");
    std::fs::create_dir_all(&dir).unwrap();
    let (l1, l2) = &common::corpus_pairs()[0];
    std::fs::write(dir.join("objects.tle"), format!("{l1}\n{l2}\n")).unwrap();
    let c = read_catalog(&dir).unwrap();
    assert_eq!(c.source_id(), "NORAD");
    assert_eq!(
        c.kb()
            .query(&Pattern::any().predicate("has_orbital_parameter"))
            .len(),
        6
    );
    std::fs::remove_dir_all(&root).unwrap();
}
