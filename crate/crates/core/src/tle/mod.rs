//! NORAD two-line element sets: fixed-column codec, derived orbital
//! elements, file reading, and annotation into a knowledge base.
//!
//! Parsing records formatting choices that the column layout leaves open
//! (blank versus zero padding, `+` versus blank signs), so any pair that
//! parses serializes back to the same bytes.

mod annotate;
mod elements;
mod file;
mod record;

pub use annotate::{annotate_tle, resolve_subject, TleAnnotation};
pub use elements::{
    semi_major_axis_km, to_elements, OrbitalElements, EARTH_RADIUS_KM, MU_EARTH, SECONDS_PER_DAY,
};
pub use file::{
    read_tle_file, write_tle_file, ReadMode, TleEntry, TleFile, TleFileError, MAX_NAME_LEN,
};
pub use record::{
    checksum, parse_tle, pivot_year, serialize_tle, ExpField, IntlDesignator, Layout, Sign,
    TleError, TleRecord, ZeroPad, LINE_LEN,
};
