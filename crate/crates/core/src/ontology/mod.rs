//! Schema layer: category and relation terms and the Is-a taxonomy.

mod format;
mod schema;
mod term;

pub(crate) use format::quote;
pub use format::{parse_schema, write_schema, SchemaFileError};
pub use schema::{
    CategoryDef, DefectRule, RangeKind, RelationDef, RelationProperty, Schema, SchemaDefect,
    SchemaError, TermKind, INSTANCE_OF, IS_A,
};
pub use term::{check_name, TermError, TermId};

/// Source text of the bundled schema.
pub const SEED_SCHEMA_TEXT: &str = include_str!("seed.odo");

/// The bundled orbital debris schema.
pub fn seed_schema() -> Schema {
    parse_schema(SEED_SCHEMA_TEXT).expect("bundled seed schema parses")
}

/// Category names the reasoner and TLE annotator rely on.
pub mod terms {
    pub const ORBITAL_DEBRIS: &str = "Orbital Debris";
    pub const ORBIT: &str = "Orbit";
    pub const TLE: &str = "Two-line Element Set";
    pub const INCLINATION: &str = "Inclination";
    pub const ECCENTRICITY: &str = "Eccentricity";
    pub const RAAN: &str = "Right Ascension of the Ascending Node";
    pub const ARG_PERIGEE: &str = "Argument of Perigee";
    pub const MEAN_ANOMALY: &str = "Mean Anomaly";
    pub const MEAN_MOTION: &str = "Mean Motion";
    pub const KEPLERIAN: [&str; 6] = [
        INCLINATION,
        ECCENTRICITY,
        RAAN,
        ARG_PERIGEE,
        MEAN_ANOMALY,
        MEAN_MOTION,
    ];

    pub const HAS_ORBIT: &str = "has_orbit";
    pub const IS_DESCRIBED_BY: &str = "is_described_by";
    pub const HAS_ORBITAL_PARAMETER: &str = "has_orbital_parameter";
    pub const HAS_VALUE: &str = "has_value";
    pub const HAS_EPOCH: &str = "has_epoch";
    pub const HAS_DIAMETER: &str = "has_diameter";
    pub const HAS_LABEL: &str = "has_label";
    pub const HAS_NAME: &str = "has_name";
    pub const HAS_INTL_DESIGNATOR: &str = "has_international_designator";
    pub const HAS_CATALOG_NUMBER: &str = "has_catalog_number";
}
