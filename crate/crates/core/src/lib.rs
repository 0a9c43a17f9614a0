//! Knowledge base for orbital debris cataloging.
//!
//! - [`ontology`]: category and relation terms, the Is-a taxonomy, the bundled seed schema.
//! - [`kbstore`]: instance data and pattern queries.
//! - [`reason`]: type materialization, transitive closure, orbit axioms, size classes.
//! - [`tle`]: NORAD two-line element sets and their annotation into a KB.
//! - [`federation`]: identity resolution, hub merge and peer sync across catalogs.

pub mod federation;
pub mod kbstore;
pub mod ontology;
pub mod reason;
pub mod tle;

pub use kbstore::{KnowledgeBase, Value};
pub use ontology::{seed_schema, Schema};
