use std::fmt;

use chrono::{Duration, NaiveDate};
use thiserror::Error;

use crate::kbstore::TimeRef;

pub const LINE_LEN: usize = 69;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TleError {
    #[error("BadLength: line {line} has {len} characters, expected 69")]
    BadLength { line: u8, len: usize },
    #[error("BadLineNumber: line {line} starts with {found:?}")]
    BadLineNumber { line: u8, found: char },
    #[error("ChecksumMismatch: line {line} checksum is {found}, computed {expected}")]
    ChecksumMismatch { line: u8, expected: u8, found: u8 },
    #[error("FieldSyntax: line {line} columns {start}-{end} ({field})")]
    FieldSyntax {
        line: u8,
        start: usize,
        end: usize,
        field: &'static str,
    },
    #[error("CatalogNumberMismatch: line 1 has {line1}, line 2 has {line2}")]
    CatalogNumberMismatch { line1: u32, line2: u32 },
    #[error("RangeViolation: {field} = {value}")]
    RangeViolation { field: &'static str, value: f64 },
    #[error("UnrepresentableField: {field}")]
    UnrepresentableField { field: &'static str },
}

/// Mod-10 checksum over the first 68 columns: digits count their value,
/// `-` counts 1, everything else 0. Accepts the 68 data columns alone or a
/// full 69-column line.
pub fn checksum(line: &str) -> Result<u8, TleError> {
    let len = line.chars().count();
    if len != LINE_LEN && len != LINE_LEN - 1 {
        return Err(TleError::BadLength { line: 0, len });
    }
    let sum: u32 = line
        .chars()
        .take(LINE_LEN - 1)
        .map(|c| match c {
            '0'..='9' => c as u32 - '0' as u32,
            '-' => 1,
            _ => 0,
        })
        .sum();
    Ok((sum % 10) as u8)
}

/// Sign column of a signed field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Sign {
    #[default]
    Space,
    Plus,
    Minus,
}

impl Sign {
    fn parse(c: u8) -> Option<Sign> {
        match c {
            b' ' => Some(Sign::Space),
            b'+' => Some(Sign::Plus),
            b'-' => Some(Sign::Minus),
            _ => None,
        }
    }

    fn as_char(self) -> char {
        match self {
            Sign::Space => ' ',
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }

    fn is_negative(self) -> bool {
        self == Sign::Minus
    }
}

/// An eight-column field `±MMMMM±E` meaning ±0.MMMMM × 10^±E.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ExpField {
    pub sign: Sign,
    /// Five implied-decimal digits, 0..=99999.
    pub mantissa: u32,
    pub exponent_negative: bool,
    pub exponent: u8,
}

impl ExpField {
    pub fn value(&self) -> f64 {
        // Decimal text goes through the float parser so the result is the
        // correctly rounded literal, e.g. " 34060-4" is exactly 0.3406e-4.
        let text = format!(
            "{}0.{:05}e{}{}",
            if self.sign.is_negative() { "-" } else { "" },
            self.mantissa,
            if self.exponent_negative { "-" } else { "" },
            self.exponent
        );
        text.parse().expect("formatted decimal parses")
    }

    /// Normalized field (leading mantissa digit non-zero) for `v`, rounded
    /// to five significant digits.
    pub fn from_value(v: f64) -> Result<ExpField, TleError> {
        let err = TleError::UnrepresentableField {
            field: "exponent field",
        };
        if !v.is_finite() {
            return Err(err);
        }
        let sign = if v < 0.0 { Sign::Minus } else { Sign::Space };
        let a = v.abs();
        if a == 0.0 {
            return Ok(ExpField {
                sign,
                mantissa: 0,
                exponent_negative: true,
                exponent: 0,
            });
        }
        let mut exp = a.log10().floor() as i32 + 1;
        let mut mantissa = (a / 10f64.powi(exp - 5)).round() as u32;
        if mantissa >= 100_000 {
            mantissa /= 10;
            exp += 1;
        }
        if !(-9..=9).contains(&exp) {
            return Err(err);
        }
        Ok(ExpField {
            sign,
            mantissa,
            exponent_negative: exp < 0,
            exponent: exp.unsigned_abs() as u8,
        })
    }

    fn render(&self) -> Result<String, TleError> {
        if self.mantissa > 99_999 || self.exponent > 9 {
            return Err(TleError::UnrepresentableField {
                field: "exponent field",
            });
        }
        Ok(format!(
            "{}{:05}{}{}",
            self.sign.as_char(),
            self.mantissa,
            if self.exponent_negative { '-' } else { '+' },
            self.exponent
        ))
    }
}

/// Formatting choices the standard leaves open. Recorded on parse so that
/// serialization reproduces the input byte for byte.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Layout {
    /// Non-negative first derivative written with `+` rather than a blank.
    pub mean_motion_dot_plus: bool,
    pub zero_pad: ZeroPad,
}

/// Which right-justified numeric fields are padded with zeros instead of
/// blanks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ZeroPad {
    pub epoch_day: bool,
    pub element_set_number: bool,
    pub inclination: bool,
    pub raan: bool,
    pub arg_perigee: bool,
    pub mean_anomaly: bool,
    pub mean_motion: bool,
    pub rev_number: bool,
}

impl Default for Layout {
    fn default() -> Self {
        Layout {
            mean_motion_dot_plus: false,
            zero_pad: ZeroPad {
                epoch_day: true,
                element_set_number: false,
                inclination: false,
                raan: false,
                arg_perigee: false,
                mean_anomaly: false,
                mean_motion: false,
                rev_number: false,
            },
        }
    }
}

/// Launch year, launch number of the year, and piece.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntlDesignator {
    pub launch_year: u8,
    pub launch_number: u16,
    pub piece: String,
}

impl IntlDesignator {
    pub fn full_year(&self) -> i32 {
        pivot_year(self.launch_year)
    }
}

impl fmt::Display for IntlDesignator {
    /// The long form, e.g. `1993-036BLP`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}-{:03}{}",
            self.full_year(),
            self.launch_number,
            self.piece
        )
    }
}

/// Two-digit years: 57..=99 are 1957..=1999, 00..=56 are 2000..=2056.
pub fn pivot_year(yy: u8) -> i32 {
    if yy >= 57 {
        1900 + yy as i32
    } else {
        2000 + yy as i32
    }
}

/// All fields of a NORAD two-line element set.
#[derive(Debug, Clone, PartialEq)]
pub struct TleRecord {
    pub catalog_number: u32,
    pub classification: char,
    pub intl_designator: Option<IntlDesignator>,
    pub epoch_year: u8,
    /// Day of year with fraction, 1.0 = January 1 00:00 UTC.
    pub epoch_day: f64,
    /// First derivative of mean motion over two, rev/day².
    pub mean_motion_dot: f64,
    /// Second derivative of mean motion over six, rev/day³.
    pub mean_motion_ddot: ExpField,
    /// Drag term, 1/earth radii.
    pub bstar: ExpField,
    pub ephemeris_type: u8,
    pub element_set_number: u16,
    pub checksum1: u8,
    pub inclination: f64,
    pub raan: f64,
    pub eccentricity: f64,
    pub arg_perigee: f64,
    pub mean_anomaly: f64,
    pub mean_motion: f64,
    pub rev_number: u32,
    pub checksum2: u8,
    pub layout: Layout,
}

struct Cursor<'a> {
    line: &'a str,
    no: u8,
}

impl<'a> Cursor<'a> {
    /// Columns are 1-based and inclusive, as in the format description.
    fn field(&self, start: usize, end: usize) -> &'a str {
        &self.line[start - 1..end]
    }

    fn syntax(&self, start: usize, end: usize, field: &'static str) -> TleError {
        TleError::FieldSyntax {
            line: self.no,
            start,
            end,
            field,
        }
    }

    fn blank(&self, col: usize) -> Result<(), TleError> {
        if self.field(col, col) == " " {
            Ok(())
        } else {
            Err(self.syntax(col, col, "separator"))
        }
    }

    fn digit(&self, col: usize, field: &'static str) -> Result<u8, TleError> {
        let b = self.line.as_bytes()[col - 1];
        if b.is_ascii_digit() {
            Ok(b - b'0')
        } else {
            Err(self.syntax(col, col, field))
        }
    }

    /// Right-justified unsigned integer; returns the value and whether it
    /// was zero-padded.
    fn integer(
        &self,
        start: usize,
        end: usize,
        field: &'static str,
    ) -> Result<(u32, bool), TleError> {
        let raw = self.field(start, end);
        let err = || self.syntax(start, end, field);
        let trimmed = raw.trim_start_matches(' ');
        if trimmed.is_empty() || !trimmed.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let value: u32 = trimmed.parse().map_err(|_| err())?;
        let width = raw.len();
        if format!("{value:>width$}") == raw {
            Ok((value, false))
        } else if format!("{value:0width$}") == raw {
            Ok((value, true))
        } else {
            Err(err())
        }
    }

    /// Right-justified unsigned decimal with a fixed number of places.
    fn decimal(
        &self,
        start: usize,
        end: usize,
        places: usize,
        field: &'static str,
    ) -> Result<(f64, bool), TleError> {
        let raw = self.field(start, end);
        let err = || self.syntax(start, end, field);
        let trimmed = raw.trim_start_matches(' ');
        if trimmed.is_empty() || !trimmed.bytes().all(|b| b.is_ascii_digit() || b == b'.') {
            return Err(err());
        }
        let value: f64 = trimmed.parse().map_err(|_| err())?;
        match render_decimal(value, raw.len(), places) {
            (space, _) if space == raw => Ok((value, false)),
            (_, zero) if zero == raw => Ok((value, true)),
            _ => Err(err()),
        }
    }

    fn exp_field(&self, start: usize, field: &'static str) -> Result<ExpField, TleError> {
        let raw = self.field(start, start + 7).as_bytes();
        let err = || self.syntax(start, start + 7, field);
        let sign = Sign::parse(raw[0]).ok_or_else(err)?;
        if !raw[1..6].iter().all(u8::is_ascii_digit) || !raw[7].is_ascii_digit() {
            return Err(err());
        }
        let exponent_negative = match raw[6] {
            b'-' => true,
            b'+' => false,
            _ => return Err(err()),
        };
        Ok(ExpField {
            sign,
            mantissa: std::str::from_utf8(&raw[1..6]).unwrap().parse().unwrap(),
            exponent_negative,
            exponent: raw[7] - b'0',
        })
    }
}

/// (blank-padded, zero-padded) renderings.
fn render_decimal(value: f64, width: usize, places: usize) -> (String, String) {
    (
        format!("{value:>width$.places$}"),
        format!("{value:0width$.places$}"),
    )
}

fn check_line(line: &str, no: u8) -> Result<Cursor<'_>, TleError> {
    let len = line.chars().count();
    if len != LINE_LEN || !line.is_ascii() {
        return Err(TleError::BadLength { line: no, len });
    }
    let first = line.as_bytes()[0];
    if first != b'0' + no {
        return Err(TleError::BadLineNumber {
            line: no,
            found: first as char,
        });
    }
    let cur = Cursor { line, no };
    let found = cur.digit(69, "checksum")?;
    let expected = checksum(line)?;
    if found != expected {
        return Err(TleError::ChecksumMismatch {
            line: no,
            expected,
            found,
        });
    }
    cur.blank(2)?;
    Ok(cur)
}

fn in_range(field: &'static str, value: f64, ok: bool) -> Result<(), TleError> {
    if ok {
        Ok(())
    } else {
        Err(TleError::RangeViolation { field, value })
    }
}

/// Parses a two-line element set by the NORAD fixed column layout.
pub fn parse_tle(line1: &str, line2: &str) -> Result<TleRecord, TleError> {
    let l1 = check_line(line1, 1)?;
    let l2 = check_line(line2, 2)?;
    let mut layout = Layout::default();

    let (catalog_number, _) = l1.integer(3, 7, "catalog number")?;
    if l1.field(3, 7).starts_with(' ') {
        return Err(l1.syntax(3, 7, "catalog number"));
    }
    let classification = l1.field(8, 8).chars().next().unwrap();
    if !matches!(classification, 'U' | 'C' | 'S') {
        return Err(l1.syntax(8, 8, "classification"));
    }
    l1.blank(9)?;
    let intl_designator = if l1.field(10, 17).trim().is_empty() {
        None
    } else {
        let year = l1.field(10, 11);
        let number = l1.field(12, 14);
        let piece = l1.field(15, 17);
        let piece_trim = piece.trim_end();
        if !year.bytes().all(|b| b.is_ascii_digit())
            || !number.bytes().all(|b| b.is_ascii_digit())
            || piece_trim.is_empty()
            || !piece_trim.bytes().all(|b| b.is_ascii_uppercase())
        {
            return Err(l1.syntax(10, 17, "international designator"));
        }
        Some(IntlDesignator {
            launch_year: year.parse().unwrap(),
            launch_number: number.parse().unwrap(),
            piece: piece_trim.to_string(),
        })
    };
    l1.blank(18)?;
    let epoch_year = l1.field(19, 20);
    if !epoch_year.bytes().all(|b| b.is_ascii_digit()) {
        return Err(l1.syntax(19, 20, "epoch year"));
    }
    let epoch_year: u8 = epoch_year.parse().unwrap();
    let (epoch_day, pad) = l1.decimal(21, 32, 8, "epoch day")?;
    layout.zero_pad.epoch_day = pad;
    l1.blank(33)?;

    let ndot = l1.field(34, 43).as_bytes();
    let ndot_sign = Sign::parse(ndot[0]).ok_or_else(|| l1.syntax(34, 43, "mean motion dot"))?;
    if ndot[1] != b'.' || !ndot[2..].iter().all(u8::is_ascii_digit) {
        return Err(l1.syntax(34, 43, "mean motion dot"));
    }
    let magnitude: f64 = l1.field(35, 43).parse().unwrap();
    let mean_motion_dot = if ndot_sign.is_negative() {
        -magnitude
    } else {
        magnitude
    };
    layout.mean_motion_dot_plus = ndot_sign == Sign::Plus;
    l1.blank(44)?;
    let mean_motion_ddot = l1.exp_field(45, "mean motion ddot")?;
    l1.blank(53)?;
    let bstar = l1.exp_field(54, "bstar")?;
    l1.blank(62)?;
    let ephemeris_type = l1.digit(63, "ephemeris type")?;
    l1.blank(64)?;
    let (esn, pad) = l1.integer(65, 68, "element set number")?;
    layout.zero_pad.element_set_number = pad;
    let checksum1 = l1.digit(69, "checksum")?;

    let (catalog2, _) = l2.integer(3, 7, "catalog number")?;
    if catalog2 != catalog_number {
        return Err(TleError::CatalogNumberMismatch {
            line1: catalog_number,
            line2: catalog2,
        });
    }
    if l2.field(3, 7) != l1.field(3, 7) {
        return Err(l2.syntax(3, 7, "catalog number"));
    }
    l2.blank(8)?;
    let (inclination, pad) = l2.decimal(9, 16, 4, "inclination")?;
    layout.zero_pad.inclination = pad;
    l2.blank(17)?;
    let (raan, pad) = l2.decimal(18, 25, 4, "raan")?;
    layout.zero_pad.raan = pad;
    l2.blank(26)?;
    let ecc = l2.field(27, 33);
    if !ecc.bytes().all(|b| b.is_ascii_digit()) {
        return Err(l2.syntax(27, 33, "eccentricity"));
    }
    let eccentricity: f64 = format!("0.{ecc}").parse().unwrap();
    l2.blank(34)?;
    let (arg_perigee, pad) = l2.decimal(35, 42, 4, "argument of perigee")?;
    layout.zero_pad.arg_perigee = pad;
    l2.blank(43)?;
    let (mean_anomaly, pad) = l2.decimal(44, 51, 4, "mean anomaly")?;
    layout.zero_pad.mean_anomaly = pad;
    l2.blank(52)?;
    let (mean_motion, pad) = l2.decimal(53, 63, 8, "mean motion")?;
    layout.zero_pad.mean_motion = pad;
    let (rev_number, pad) = l2.integer(64, 68, "revolution number")?;
    layout.zero_pad.rev_number = pad;
    let checksum2 = l2.digit(69, "checksum")?;

    let rec = TleRecord {
        catalog_number,
        classification,
        intl_designator,
        epoch_year,
        epoch_day,
        mean_motion_dot,
        mean_motion_ddot,
        bstar,
        ephemeris_type,
        element_set_number: esn as u16,
        checksum1,
        inclination,
        raan,
        eccentricity,
        arg_perigee,
        mean_anomaly,
        mean_motion,
        rev_number,
        checksum2,
        layout,
    };
    rec.check_ranges()?;
    Ok(rec)
}

fn fixed(
    value: f64,
    width: usize,
    places: usize,
    zero_pad: bool,
    field: &'static str,
) -> Result<String, TleError> {
    let (space, zero) = render_decimal(value, width, places);
    let s = if zero_pad { zero } else { space };
    if s.len() != width || value < 0.0 {
        return Err(TleError::UnrepresentableField { field });
    }
    Ok(s)
}

fn int(value: u32, width: usize, zero_pad: bool, field: &'static str) -> Result<String, TleError> {
    let s = if zero_pad {
        format!("{value:0width$}")
    } else {
        format!("{value:>width$}")
    };
    if s.len() != width {
        return Err(TleError::UnrepresentableField { field });
    }
    Ok(s)
}

impl TleRecord {
    /// Field ranges required of a valid record.
    pub fn check_ranges(&self) -> Result<(), TleError> {
        let c = self.catalog_number as f64;
        in_range(
            "catalog number",
            c,
            (1..=99_999).contains(&self.catalog_number),
        )?;
        in_range(
            "epoch day",
            self.epoch_day,
            (1.0..367.0).contains(&self.epoch_day),
        )?;
        in_range(
            "inclination",
            self.inclination,
            (0.0..=180.0).contains(&self.inclination),
        )?;
        in_range("raan", self.raan, (0.0..360.0).contains(&self.raan))?;
        in_range(
            "eccentricity",
            self.eccentricity,
            (0.0..1.0).contains(&self.eccentricity),
        )?;
        in_range(
            "argument of perigee",
            self.arg_perigee,
            (0.0..360.0).contains(&self.arg_perigee),
        )?;
        in_range(
            "mean anomaly",
            self.mean_anomaly,
            (0.0..360.0).contains(&self.mean_anomaly),
        )?;
        in_range("mean motion", self.mean_motion, self.mean_motion > 0.0)?;
        Ok(())
    }

    pub fn epoch_full_year(&self) -> i32 {
        pivot_year(self.epoch_year)
    }

    /// The epoch as an ISO-8601 instant, microsecond resolution.
    pub fn epoch(&self) -> TimeRef {
        let jan1 = NaiveDate::from_yo_opt(self.epoch_full_year(), 1)
            .expect("valid year")
            .and_hms_opt(0, 0, 0)
            .expect("midnight");
        let micros = ((self.epoch_day - 1.0) * 86_400e6).round() as i64;
        TimeRef::from_instant((jan1 + Duration::microseconds(micros)).and_utc())
    }

    pub fn bstar(&self) -> f64 {
        self.bstar.value()
    }

    pub fn mean_motion_ddot(&self) -> f64 {
        self.mean_motion_ddot.value()
    }

    /// Renders both lines with freshly computed checksums.
    pub fn serialize(&self) -> Result<(String, String), TleError> {
        if !(1..=99_999).contains(&self.catalog_number) {
            return Err(TleError::UnrepresentableField {
                field: "catalog number",
            });
        }
        if self.epoch_year > 99 {
            return Err(TleError::UnrepresentableField {
                field: "epoch year",
            });
        }
        if self.ephemeris_type > 9 {
            return Err(TleError::UnrepresentableField {
                field: "ephemeris type",
            });
        }
        let zp = &self.layout.zero_pad;
        let designator = match &self.intl_designator {
            None => "        ".to_string(),
            Some(d) => {
                if d.launch_year > 99
                    || d.launch_number > 999
                    || d.piece.is_empty()
                    || d.piece.len() > 3
                {
                    return Err(TleError::UnrepresentableField {
                        field: "international designator",
                    });
                }
                format!("{:02}{:03}{:<3}", d.launch_year, d.launch_number, d.piece)
            }
        };
        let ndot_digits = (self.mean_motion_dot.abs() * 1e8).round();
        if !ndot_digits.is_finite() || ndot_digits >= 1e8 {
            return Err(TleError::UnrepresentableField {
                field: "mean motion dot",
            });
        }
        let ndot_sign = if self.mean_motion_dot.is_sign_negative() {
            '-'
        } else if self.layout.mean_motion_dot_plus {
            '+'
        } else {
            ' '
        };
        let mut line1 = format!(
            "1 {:05}{} {} {:02}{} {}.{:08} {} {} {} {}",
            self.catalog_number,
            self.classification,
            designator,
            self.epoch_year,
            fixed(self.epoch_day, 12, 8, zp.epoch_day, "epoch day")?,
            ndot_sign,
            ndot_digits as u64,
            self.mean_motion_ddot.render()?,
            self.bstar.render()?,
            self.ephemeris_type,
            int(
                self.element_set_number as u32,
                4,
                zp.element_set_number,
                "element set number"
            )?,
        );
        let ecc_digits = (self.eccentricity * 1e7).round();
        if !(0.0..1e7).contains(&ecc_digits) {
            return Err(TleError::UnrepresentableField {
                field: "eccentricity",
            });
        }
        let mut line2 = format!(
            "2 {:05} {} {} {:07} {} {} {}{}",
            self.catalog_number,
            fixed(self.inclination, 8, 4, zp.inclination, "inclination")?,
            fixed(self.raan, 8, 4, zp.raan, "raan")?,
            ecc_digits as u32,
            fixed(
                self.arg_perigee,
                8,
                4,
                zp.arg_perigee,
                "argument of perigee"
            )?,
            fixed(self.mean_anomaly, 8, 4, zp.mean_anomaly, "mean anomaly")?,
            fixed(self.mean_motion, 11, 8, zp.mean_motion, "mean motion")?,
            int(self.rev_number, 5, zp.rev_number, "revolution number")?,
        );
        if line1.len() != LINE_LEN - 1 || line2.len() != LINE_LEN - 1 || !line1.is_ascii() {
            return Err(TleError::UnrepresentableField { field: "line" });
        }
        let c1 = checksum(&line1)?;
        let c2 = checksum(&line2)?;
        line1.push((b'0' + c1) as char);
        line2.push((b'0' + c2) as char);
        Ok((line1, line2))
    }
}

/// Free-function form of [`TleRecord::serialize`].
pub fn serialize_tle(rec: &TleRecord) -> Result<(String, String), TleError> {
    rec.serialize()
}

#[cfg(test)]
mod tests {
    use super::*;

    const ISS1: &str = "1 25544U 98067A   08264.51782528 -.00002182  00000-0 -11606-4 0  2927";
    const ISS2: &str = "2 25544  51.6416 247.4627 0006703 130.5360 325.0288 15.72125391563537";

    #[test]
    fn checksum_basics() {
        assert_eq!(checksum(&" ".repeat(68)).unwrap(), 0);
        assert_eq!(checksum(&format!("1{}", " ".repeat(67))).unwrap(), 1);
        assert_eq!(checksum(ISS1).unwrap(), 7);
        assert_eq!(checksum(ISS2).unwrap(), 7);
        assert!(matches!(checksum("1 2"), Err(TleError::BadLength { .. })));
    }

    #[test]
    fn parses_reference_pair() {
        let r = parse_tle(ISS1, ISS2).unwrap();
        assert_eq!(r.catalog_number, 25544);
        assert_eq!(r.classification, 'U');
        let d = r.intl_designator.as_ref().unwrap();
        assert_eq!(d.to_string(), "1998-067A");
        assert_eq!(r.epoch_full_year(), 2008);
        assert_eq!(r.epoch_day, 264.51782528);
        assert_eq!(r.mean_motion_dot, -0.00002182);
        assert_eq!(r.mean_motion_ddot(), 0.0);
        assert_eq!(r.bstar(), -0.11606e-4);
        assert_eq!(r.element_set_number, 292);
        assert_eq!(r.inclination, 51.6416);
        assert_eq!(r.raan, 247.4627);
        assert_eq!(r.eccentricity, 0.0006703);
        assert_eq!(r.arg_perigee, 130.5360);
        assert_eq!(r.mean_anomaly, 325.0288);
        assert_eq!(r.mean_motion, 15.72125391);
        assert_eq!(r.rev_number, 56353);
        assert_eq!(r.epoch().token(), "2008-09-20T12:25:40.104192Z");
        let (a, b) = r.serialize().unwrap();
        assert_eq!(a, ISS1);
        assert_eq!(b, ISS2);
    }

    #[test]
    fn implied_decimal_rules() {
        let f = ExpField {
            sign: Sign::Space,
            mantissa: 34060,
            exponent_negative: true,
            exponent: 4,
        };
        assert_eq!(f.value(), 0.3406e-4);
        assert_eq!(ExpField::from_value(0.3406e-4).unwrap(), f);
        assert_eq!(
            ExpField::from_value(-0.11606e-4).unwrap().value(),
            -0.11606e-4
        );
        assert_eq!(
            ExpField::from_value(0.0).unwrap().render().unwrap(),
            " 00000-0"
        );
    }

    #[test]
    fn epoch_pivot() {
        assert_eq!(pivot_year(57), 1957);
        assert_eq!(pivot_year(56), 2056);
        assert_eq!(pivot_year(0), 2000);
        assert_eq!(pivot_year(99), 1999);
    }

    fn with_checksum(mut body: String) -> String {
        body.truncate(68);
        let c = checksum(&body).unwrap();
        body.push((b'0' + c) as char);
        body
    }

    #[test]
    fn error_paths() {
        assert!(matches!(
            parse_tle(&ISS1[..68], ISS2),
            Err(TleError::BadLength { line: 1, len: 68 })
        ));
        assert!(matches!(
            parse_tle(ISS2, ISS2),
            Err(TleError::BadLineNumber {
                line: 1,
                found: '2'
            })
        ));
        let bad = format!("{}8", &ISS1[..68]);
        assert_eq!(
            parse_tle(&bad, ISS2),
            Err(TleError::ChecksumMismatch {
                line: 1,
                expected: 7,
                found: 8
            })
        );
        let other = with_checksum(ISS2.replacen("25544", "25545", 1));
        assert_eq!(
            parse_tle(ISS1, &other),
            Err(TleError::CatalogNumberMismatch {
                line1: 25544,
                line2: 25545
            })
        );
        let syntax = with_checksum(ISS2.replacen(" 51.6416", " 51.64x6", 1));
        assert!(matches!(
            parse_tle(ISS1, &syntax),
            Err(TleError::FieldSyntax {
                line: 2,
                start: 9,
                end: 16,
                ..
            })
        ));
        let range = with_checksum(ISS2.replacen(" 51.6416", "181.6416", 1));
        assert!(matches!(
            parse_tle(ISS1, &range),
            Err(TleError::RangeViolation {
                field: "inclination",
                ..
            })
        ));
    }

    #[test]
    fn unrepresentable_catalog_number() {
        let mut r = parse_tle(ISS1, ISS2).unwrap();
        r.catalog_number = 123_456;
        assert_eq!(
            r.serialize(),
            Err(TleError::UnrepresentableField {
                field: "catalog number"
            })
        );
    }

    #[test]
    fn alternate_layouts_round_trip() {
        let l1 = "1 28485U 04047A   20010.76403232 +.00000826 +00000-0 +25992-4 0  9999";
        let l2 = "2 28485 020.5579 055.7027 0010957 208.9479 151.0347 15.04516653829549";
        let r = parse_tle(l1, l2).unwrap();
        assert!(r.layout.mean_motion_dot_plus);
        assert!(r.layout.zero_pad.inclination);
        assert_eq!(r.serialize().unwrap(), (l1.to_string(), l2.to_string()));
    }
}
