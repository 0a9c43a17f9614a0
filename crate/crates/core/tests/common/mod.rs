//! Independent oracles and fixture generators shared by the integration
//! targets. Nothing here calls the library's own closure, checksum or
//! clustering code.

#![allow(clippy::needless_range_loop)]
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use odo_kb::federation::Catalog;
use odo_kb::kbstore::{Fact, FactKind, KnowledgeBase, TimeRef, Unit, Value};
use odo_kb::ontology::{CategoryDef, Schema};
use odo_kb::seed_schema;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

pub const CORPUS: &str = include_str!("../fixtures/corpus.tle");

/// Pairs of the corpus fixture, in file order.
pub fn corpus_pairs() -> Vec<(String, String)> {
    let lines: Vec<&str> = CORPUS.lines().filter(|l| !l.trim().is_empty()).collect();
    lines
        .chunks(2)
        .map(|p| (p[0].to_string(), p[1].to_string()))
        .collect()
}

/// Mod-10 sum of the first 68 columns, `-` counting one.
pub fn checksum_oracle(line: &str) -> u32 {
    line.bytes()
        .take(68)
        .map(|b| match b {
            b'0'..=b'9' => (b - b'0') as u32,
            b'-' => 1,
            _ => 0,
        })
        .sum::<u32>()
        % 10
}

/// Replaces columns `start..start+text.len()` (1-based) and refreshes the
/// checksum digit.
pub fn patch_line(line: &str, start: usize, text: &str) -> String {
    let mut s = line.to_string();
    s.replace_range(start - 1..start - 1 + text.len(), text);
    s.truncate(68);
    let c = checksum_oracle(&s);
    s.push(char::from(b'0' + c as u8));
    s
}

/// Two-body mean motion in rev/day for a semi-major axis in km.
pub fn mean_motion_oracle(a_km: f64) -> f64 {
    let mu = 398_600.441_8_f64;
    (mu / a_km.powi(3)).sqrt() * 86_400.0 / (2.0 * std::f64::consts::PI)
}

/// A random DAG taxonomy with shuffled names, plus its parent lists.
pub struct RandomTaxonomy {
    pub schema: Schema,
    pub names: Vec<String>,
    /// `parents[i]` holds indexes into `names`, all lower than `i`.
    pub parents: Vec<Vec<usize>>,
}

pub fn random_taxonomy(rng: &mut StdRng, max_terms: usize) -> RandomTaxonomy {
    let n = rng.gen_range(1..=max_terms);
    let mut labels: Vec<usize> = (0..n).collect();
    labels.shuffle(rng);
    let names: Vec<String> = labels.iter().map(|l| format!("Term {l:02}")).collect();
    let density: f64 = rng.gen_range(0.02..0.25);
    let mut parents = Vec::with_capacity(n);
    let mut defs = Vec::with_capacity(n);
    for i in 0..n {
        let ps: Vec<usize> = (0..i).filter(|_| rng.gen_bool(density)).take(4).collect();
        let def = CategoryDef::new(&names[i], "", ps.iter().map(|&p| names[p].as_str())).unwrap();
        defs.push(def);
        parents.push(ps);
    }
    RandomTaxonomy {
        schema: Schema::from_parts(defs, Vec::new()),
        names,
        parents,
    }
}

/// Floyd-Warshall reflexive-transitive closure: `m[a][b]` iff a ⊑ b.
pub fn closure_oracle(parents: &[Vec<usize>]) -> Vec<Vec<bool>> {
    let n = parents.len();
    let mut m = vec![vec![false; n]; n];
    for (i, ps) in parents.iter().enumerate() {
        m[i][i] = true;
        for &p in ps {
            m[i][p] = true;
        }
    }
    for k in 0..n {
        for i in 0..n {
            if m[i][k] {
                for j in 0..n {
                    if m[k][j] {
                        m[i][j] = true;
                    }
                }
            }
        }
    }
    m
}

pub const DESIGNATORS: [&str; 6] = [
    "1993-036BLP",
    "1993-036A",
    "2009-005C",
    "1999-025AAB",
    "2007-004X",
    "1982-092AV",
];

pub const EPOCHS: [&str; 3] = [
    "2009-02-10T16:56:00Z",
    "2010-01-01T00:00:00Z",
    "2021-06-30T12:00:00Z",
];

/// Catalog `s<idx>` with individuals sharing designators and ids with
/// other catalogs built from the same generator.
pub fn random_catalog(rng: &mut StdRng, idx: usize) -> Catalog {
    let source = format!("s{idx}");
    let mut kb = KnowledgeBase::new(seed_schema());
    kb.set_source(&source);
    let kinds = ["Orbital Debris Fragment", "Rocket Body", "Satellite"];
    let count = rng.gen_range(0..6);
    for j in 0..count {
        let id = if rng.gen_bool(0.25) {
            format!("shared-{}", rng.gen_range(0..3))
        } else {
            format!("{source}-obj{j}")
        };
        kb.assert_instance(&id, kinds[rng.gen_range(0..kinds.len())], None)
            .unwrap();
        if rng.gen_bool(0.7) {
            let d = DESIGNATORS[rng.gen_range(0..DESIGNATORS.len())];
            kb.assert_relation("has_international_designator", &id, Value::text(d), None)
                .unwrap();
        }
        if rng.gen_bool(0.5) {
            kb.assert_relation("orbits", &id, Value::individual("Earth").unwrap(), None)
                .unwrap();
        }
        if rng.gen_bool(0.5) {
            let cm = rng.gen_range(1..30) as f64;
            let at = TimeRef::new(EPOCHS[rng.gen_range(0..EPOCHS.len())]).unwrap();
            kb.assert_relation(
                "has_diameter",
                &id,
                Value::quantity(cm, Unit::Cm).unwrap(),
                Some(at),
            )
            .unwrap();
        }
        if rng.gen_bool(0.3) {
            kb.assert_relation("has_label", &id, Value::text(format!("obj {j}")), None)
                .unwrap();
        }
    }
    Catalog::new(&source, kb).unwrap()
}

/// Identity clusters by breadth-first search over the graph whose edges
/// join equal ids and equal designator values.
pub fn cluster_oracle(catalogs: &[Catalog]) -> BTreeMap<(String, String), String> {
    let mut nodes: Vec<(String, String)> = Vec::new();
    let mut keys: Vec<BTreeSet<String>> = Vec::new();
    for c in catalogs {
        for ind in c.kb().individuals() {
            let node = (c.source_id().to_string(), ind.id.clone());
            if nodes.contains(&node) {
                continue;
            }
            let mut k = BTreeSet::from([format!("id:{}", ind.id)]);
            for a in c.kb().assertions() {
                if let FactKind::Relation {
                    predicate,
                    subject,
                    object: Value::Text(t),
                } = &a.fact.kind
                {
                    if subject == &ind.id && predicate.as_str() == "has_international_designator" {
                        k.insert(format!("designator:{t}"));
                    }
                }
            }
            nodes.push(node);
            keys.push(k);
        }
    }
    let n = nodes.len();
    let mut component = vec![usize::MAX; n];
    for start in 0..n {
        if component[start] != usize::MAX {
            continue;
        }
        let mut queue = VecDeque::from([start]);
        component[start] = start;
        while let Some(x) = queue.pop_front() {
            for y in 0..n {
                if component[y] == usize::MAX && !keys[x].is_disjoint(&keys[y]) {
                    component[y] = start;
                    queue.push_back(y);
                }
            }
        }
    }
    let mut canonical: BTreeMap<usize, String> = BTreeMap::new();
    for (i, (_, id)) in nodes.iter().enumerate() {
        let e = canonical.entry(component[i]).or_insert_with(|| id.clone());
        if id < e {
            *e = id.clone();
        }
    }
    nodes
        .iter()
        .enumerate()
        .map(|(i, node)| (node.clone(), canonical[&component[i]].clone()))
        .collect()
}

/// Every source fact rewritten onto oracle canonical ids, with the set of
/// catalogs asserting it.
pub fn union_oracle(catalogs: &[Catalog]) -> BTreeMap<String, BTreeSet<String>> {
    let canon = cluster_oracle(catalogs);
    let mut out: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for c in catalogs {
        for a in c.kb().assertions() {
            let f = a
                .fact
                .map_individuals(|id| canon[&(c.source_id().to_string(), id.to_string())].clone());
            out.entry(odo_kb::kbstore::format_fact(&f))
                .or_default()
                .insert(c.source_id().to_string());
        }
    }
    out
}

pub fn fact_set(kb: &KnowledgeBase) -> HashSet<Fact> {
    kb.fact_set()
}

/// Sorted prefix-notation lines: an order-insensitive fingerprint.
pub fn fingerprint(kb: &KnowledgeBase) -> Vec<String> {
    let mut v: Vec<String> = kb
        .assertions()
        .iter()
        .map(|a| odo_kb::kbstore::format_fact(&a.fact))
        .collect();
    v.sort();
    v
}

/// A KB exercising every value kind, ternary time-indexed facts and
/// awkward text.
pub fn random_kb(rng: &mut StdRng) -> KnowledgeBase {
    let mut kb = KnowledgeBase::new(seed_schema());
    let n = rng.gen_range(0..12);
    let texts = [
        "plain",
        "with, comma",
        "quote \" inside",
        "back\\slash",
        "",
        "ünïcode",
    ];
    let units = [Unit::Km, Unit::M, Unit::Cm];
    for i in 0..n {
        let id = format!("x{i}");
        kb.assert_instance(&id, "Orbital Debris Fragment", None)
            .unwrap();
        let t = texts[rng.gen_range(0..texts.len())];
        kb.assert_relation("has_name", &id, Value::text(t), None)
            .unwrap();
        let mag = rng.gen_range(-1e6..1e6) / 7.0;
        let unit = units[rng.gen_range(0..units.len())];
        kb.assert_relation(
            "has_altitude",
            &id,
            Value::quantity(mag, unit).unwrap(),
            None,
        )
        .unwrap();
        let at = if rng.gen_bool(0.5) {
            TimeRef::new(EPOCHS[rng.gen_range(0..EPOCHS.len())]).unwrap()
        } else {
            TimeRef::new(&format!("epoch-{}", rng.gen_range(0..3))).unwrap()
        };
        kb.assert_relation(
            "has_diameter",
            &id,
            Value::quantity(rng.gen_range(0.1..50.0), Unit::Cm).unwrap(),
            Some(at.clone()),
        )
        .unwrap();
        let orbit = format!("{id}#orbit");
        kb.assert_instance(&orbit, "Orbit", None).unwrap();
        let param = format!("{orbit}#inclination");
        kb.assert_instance(&param, "Inclination", None).unwrap();
        kb.assert_relation(
            "has_orbital_parameter",
            &orbit,
            Value::individual(&param).unwrap(),
            Some(at),
        )
        .unwrap();
        kb.assert_relation(
            "has_value",
            &param,
            Value::quantity(rng.gen_range(0.0..180.0), Unit::Deg).unwrap(),
            None,
        )
        .unwrap();
    }
    kb
}
