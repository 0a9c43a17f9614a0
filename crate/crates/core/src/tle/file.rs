use thiserror::Error;

use super::record::{parse_tle, TleError, TleRecord};

/// Longest accepted name line.
pub const MAX_NAME_LEN: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReadMode {
    /// The first malformed entry fails the whole read.
    #[default]
    Strict,
    /// Malformed entries are skipped and reported as diagnostics.
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TleFileError {
    #[error("line {line}: {source}")]
    Record { line: usize, source: TleError },
    #[error("line {line}: {message}")]
    Structure { line: usize, message: String },
}

impl TleFileError {
    pub fn line(&self) -> usize {
        match self {
            TleFileError::Record { line, .. } | TleFileError::Structure { line, .. } => *line,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TleEntry {
    pub name: Option<String>,
    pub record: TleRecord,
    /// 1-based line number of line 1.
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TleFile {
    pub entries: Vec<TleEntry>,
    /// Skipped entries; empty in strict mode.
    pub diagnostics: Vec<TleFileError>,
}

/// Reads two- or three-line element files. Blank lines are ignored and an
/// optional name line of at most 24 characters may precede each pair.
pub fn read_tle_file(text: &str, mode: ReadMode) -> Result<TleFile, TleFileError> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    let mut out = TleFile::default();
    let report = |err: TleFileError, out: &mut TleFile| -> Result<(), TleFileError> {
        match mode {
            ReadMode::Strict => Err(err),
            ReadMode::Lenient => {
                log::warn!("skipping TLE entry: {err}");
                out.diagnostics.push(err);
                Ok(())
            }
        }
    };

    let mut name: Option<(usize, &str)> = None;
    let mut i = 0;
    while i < lines.len() {
        let (no, line) = lines[i];
        if line.starts_with("1 ") {
            let next = lines.get(i + 1).filter(|(_, l)| l.starts_with("2 "));
            let Some(&(_, line2)) = next else {
                let err = TleFileError::Structure {
                    line: no,
                    message: "line 1 without a following line 2".into(),
                };
                report(err, &mut out)?;
                name = None;
                i += 1;
                continue;
            };
            match parse_tle(line, line2) {
                Ok(record) => out.entries.push(TleEntry {
                    name: name.take().map(|(_, n)| n.trim().to_string()),
                    record,
                    line: no,
                }),
                Err(source) => {
                    name = None;
                    report(TleFileError::Record { line: no, source }, &mut out)?;
                }
            }
            i += 2;
        } else if line.starts_with("2 ") {
            report(
                TleFileError::Structure {
                    line: no,
                    message: "line 2 without a preceding line 1".into(),
                },
                &mut out,
            )?;
            name = None;
            i += 1;
        } else {
            if let Some((prev, _)) = name {
                report(
                    TleFileError::Structure {
                        line: prev,
                        message: "name line not followed by an element set".into(),
                    },
                    &mut out,
                )?;
            }
            let stripped = line.strip_prefix("0 ").unwrap_or(line);
            if stripped.chars().count() > MAX_NAME_LEN {
                report(
                    TleFileError::Structure {
                        line: no,
                        message: format!("name line longer than {MAX_NAME_LEN} characters"),
                    },
                    &mut out,
                )?;
                name = None;
            } else {
                name = Some((no, stripped));
            }
            i += 1;
        }
    }
    if let Some((prev, _)) = name {
        report(
            TleFileError::Structure {
                line: prev,
                message: "name line not followed by an element set".into(),
            },
            &mut out,
        )?;
    }
    Ok(out)
}

/// Renders entries back to text, name lines first where present.
pub fn write_tle_file(entries: &[TleEntry]) -> Result<String, TleError> {
    let mut out = String::new();
    for e in entries {
        if let Some(n) = &e.name {
            out.push_str(n);
            out.push('\n');
        }
        let (a, b) = e.record.serialize()?;
        out.push_str(&a);
        out.push('\n');
        out.push_str(&b);
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const L1: &str = "1 25544U 98067A   08264.51782528 -.00002182  00000-0 -11606-4 0  2927";
    const L2: &str = "2 25544  51.6416 247.4627 0006703 130.5360 325.0288 15.72125391563537";

    #[test]
    fn names_and_blank_lines() {
        let text = format!("ISS (ZARYA)\n{L1}\n{L2}\n\n{L1}\r\n{L2}\r\n");
        let f = read_tle_file(&text, ReadMode::Strict).unwrap();
        assert_eq!(f.entries.len(), 2);
        assert_eq!(f.entries[0].name.as_deref(), Some("ISS (ZARYA)"));
        assert_eq!(f.entries[1].name, None);
        assert_eq!(f.entries[1].line, 5);
        assert_eq!(
            read_tle_file(&write_tle_file(&f.entries).unwrap(), ReadMode::Strict)
                .unwrap()
                .entries
                .len(),
            2
        );
    }

    #[test]
    fn strict_fails_lenient_skips() {
        let bad = format!("{}0", &L1[..68]);
        let text = format!("{bad}\n{L2}\n{}\n{L1}\n{L2}\n", "X".repeat(30));
        let err = read_tle_file(&text, ReadMode::Strict).unwrap_err();
        assert_eq!(err.line(), 1);
        let f = read_tle_file(&text, ReadMode::Lenient).unwrap();
        assert_eq!(f.entries.len(), 1);
        assert_eq!(f.diagnostics.len(), 2);
    }
}
