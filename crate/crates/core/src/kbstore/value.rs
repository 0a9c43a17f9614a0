use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use chrono::{DateTime, NaiveDate, NaiveDateTime, Utc};
use thiserror::Error;

use crate::ontology::{check_name, quote, RangeKind, TermError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValueError {
    #[error("unknown unit {0:?}")]
    UnknownUnit(String),
    #[error("quantity magnitude must be finite")]
    NonFinite,
    #[error("malformed quantity {0:?}")]
    Quantity(String),
    #[error(transparent)]
    Term(#[from] TermError),
}

/// The fixed unit table. Only the length family converts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Unit {
    Km,
    M,
    Cm,
    Kg,
    Deg,
    RevPerDay,
    Dimensionless,
}

impl Unit {
    pub const ALL: [Unit; 7] = [
        Unit::Km,
        Unit::M,
        Unit::Cm,
        Unit::Kg,
        Unit::Deg,
        Unit::RevPerDay,
        Unit::Dimensionless,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Unit::Km => "km",
            Unit::M => "m",
            Unit::Cm => "cm",
            Unit::Kg => "kg",
            Unit::Deg => "deg",
            Unit::RevPerDay => "rev/day",
            Unit::Dimensionless => "dimensionless",
        }
    }

    /// Metres per unit for lengths.
    fn length_scale(self) -> Option<f64> {
        match self {
            Unit::Km => Some(1000.0),
            Unit::M => Some(1.0),
            Unit::Cm => Some(0.01),
            _ => None,
        }
    }

    pub fn is_length(self) -> bool {
        self.length_scale().is_some()
    }
}

impl FromStr for Unit {
    type Err = ValueError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Unit::ALL
            .into_iter()
            .find(|u| u.symbol() == s)
            .ok_or_else(|| ValueError::UnknownUnit(s.to_string()))
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// A magnitude with a unit. Equality compares after normalizing lengths
/// to metres, at 12 significant digits.
#[derive(Debug, Clone, Copy)]
pub struct Quantity {
    magnitude: f64,
    unit: Unit,
}

impl Quantity {
    pub fn new(magnitude: f64, unit: Unit) -> Result<Self, ValueError> {
        if !magnitude.is_finite() {
            return Err(ValueError::NonFinite);
        }
        Ok(Quantity { magnitude, unit })
    }

    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    /// Converts within the length family; `None` across families.
    pub fn to_unit(&self, unit: Unit) -> Option<Quantity> {
        if unit == self.unit {
            return Some(*self);
        }
        let from = self.unit.length_scale()?;
        let to = unit.length_scale()?;
        Some(Quantity {
            magnitude: self.magnitude * from / to,
            unit,
        })
    }

    fn canonical(&self) -> (Unit, String) {
        let (unit, value) = match self.unit.length_scale() {
            Some(scale) => (Unit::M, self.magnitude * scale),
            None => (self.unit, self.magnitude),
        };
        // +0.0 folds negative zero
        (unit, format!("{:.11e}", value + 0.0))
    }
}

impl PartialEq for Quantity {
    fn eq(&self, other: &Self) -> bool {
        self.canonical() == other.canonical()
    }
}

impl Eq for Quantity {}

impl Hash for Quantity {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.canonical().hash(state);
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.magnitude, self.unit)
    }
}

impl FromStr for Quantity {
    type Err = ValueError;

    /// `<magnitude> <unit>`, e.g. `934 km`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (mag, unit) = s
            .trim()
            .split_once(char::is_whitespace)
            .ok_or_else(|| ValueError::Quantity(s.to_string()))?;
        let magnitude: f64 = mag
            .parse()
            .map_err(|_| ValueError::Quantity(s.to_string()))?;
        Quantity::new(magnitude, unit.trim().parse()?)
    }
}

/// A time reference: an ISO-8601 instant, or an opaque token such as `t`.
///
/// Two ISO references are equal when they denote the same instant; opaque
/// tokens are equal when the strings are.
#[derive(Debug, Clone)]
pub struct TimeRef {
    token: String,
    instant: Option<DateTime<Utc>>,
}

impl TimeRef {
    pub fn new(token: &str) -> Result<Self, TermError> {
        check_name(token)?;
        Ok(TimeRef {
            token: token.to_string(),
            instant: parse_iso(token),
        })
    }

    pub fn from_instant(instant: DateTime<Utc>) -> Self {
        TimeRef {
            token: instant.format("%Y-%m-%dT%H:%M:%S%.6fZ").to_string(),
            instant: Some(instant),
        }
    }

    pub fn token(&self) -> &str {
        &self.token
    }

    pub fn instant(&self) -> Option<DateTime<Utc>> {
        self.instant
    }

    /// Ordering for ISO instants; `None` when either side is opaque and the
    /// two are not equal.
    pub fn temporal_cmp(&self, other: &TimeRef) -> Option<Ordering> {
        match (self.instant, other.instant) {
            (Some(a), Some(b)) => Some(a.cmp(&b)),
            _ if self == other => Some(Ordering::Equal),
            _ => None,
        }
    }
}

fn parse_iso(s: &str) -> Option<DateTime<Utc>> {
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.with_timezone(&Utc));
    }
    if let Ok(dt) = NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S%.f") {
        return Some(dt.and_utc());
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .ok()
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .map(|dt| dt.and_utc())
}

impl PartialEq for TimeRef {
    fn eq(&self, other: &Self) -> bool {
        match (self.instant, other.instant) {
            (Some(a), Some(b)) => a == b,
            (None, None) => self.token == other.token,
            _ => false,
        }
    }
}

impl Eq for TimeRef {}

impl Hash for TimeRef {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self.instant {
            Some(i) => {
                0u8.hash(state);
                i.hash(state);
            }
            None => {
                1u8.hash(state);
                self.token.hash(state);
            }
        }
    }
}

impl fmt::Display for TimeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.token)
    }
}

/// The object slot of a relation assertion.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Individual(String),
    Text(String),
    Quantity(Quantity),
    Time(TimeRef),
}

impl Value {
    pub fn individual(id: &str) -> Result<Self, TermError> {
        check_name(id)?;
        Ok(Value::Individual(id.to_string()))
    }

    pub fn text(s: impl Into<String>) -> Self {
        Value::Text(s.into())
    }

    pub fn quantity(magnitude: f64, unit: Unit) -> Result<Self, ValueError> {
        Ok(Value::Quantity(Quantity::new(magnitude, unit)?))
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Value::Individual(_) => "individual",
            Value::Text(_) => "text",
            Value::Quantity(_) => "quantity",
            Value::Time(_) => "time",
        }
    }

    pub fn as_individual(&self) -> Option<&str> {
        match self {
            Value::Individual(id) => Some(id),
            _ => None,
        }
    }

    pub fn fits(&self, range: &RangeKind) -> bool {
        matches!(
            (self, range),
            (Value::Individual(_), RangeKind::Category(_))
                | (Value::Text(_), RangeKind::Text)
                | (Value::Quantity(_), RangeKind::Quantity)
                | (Value::Time(_), RangeKind::Time)
        )
    }

    /// Parses an exchange-format argument for a slot of the given range.
    pub fn parse_for(raw: &str, range: &RangeKind) -> Result<Self, ValueError> {
        let raw = raw.trim();
        match range {
            RangeKind::Category(_) => Ok(Value::individual(raw)?),
            RangeKind::Text => parse_text(raw)
                .map(Value::Text)
                .ok_or_else(|| ValueError::Quantity(format!("expected quoted text, got {raw}"))),
            RangeKind::Quantity => Ok(Value::Quantity(raw.parse()?)),
            RangeKind::Time => Ok(Value::Time(TimeRef::new(raw)?)),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Individual(id) => f.write_str(id),
            Value::Text(t) => f.write_str(&quote(t)),
            Value::Quantity(q) => write!(f, "{q}"),
            Value::Time(t) => write!(f, "{t}"),
        }
    }
}

/// Unquotes `"..."` (or curly-quoted) text with `\"`, `\\`, `\n`, `\t` escapes.
pub(crate) fn parse_text(raw: &str) -> Option<String> {
    let inner = raw
        .strip_prefix('"')
        .and_then(|r| r.strip_suffix('"'))
        .or_else(|| {
            raw.strip_prefix('\u{201c}')
                .and_then(|r| r.strip_suffix('\u{201d}'))
        })?;
    let mut out = String::with_capacity(inner.len());
    let mut chars = inner.chars();
    while let Some(c) = chars.next() {
        match c {
            '\\' => match chars.next()? {
                'n' => out.push('\n'),
                't' => out.push('\t'),
                c @ ('"' | '\\') => out.push(c),
                _ => return None,
            },
            c => out.push(c),
        }
    }
    Some(out)
}
