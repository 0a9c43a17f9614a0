//! Individuals and assertions over a schema, with pattern queries and the
//! prefix-notation exchange format.

mod exchange;
mod kb;
mod value;

pub use exchange::{
    export_odo, export_tsv, format_fact, format_tsv_row, import_odo, parse_fact, ExchangeError,
};
pub use kb::{
    Assertion, DomainMode, Fact, FactKind, Individual, InstanceMode, KbError, KnowledgeBase,
    Pattern, Provenance, DEFAULT_SOURCE,
};
pub use value::{Quantity, TimeRef, Unit, Value, ValueError};
