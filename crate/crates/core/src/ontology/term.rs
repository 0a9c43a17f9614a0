use std::borrow::Borrow;
use std::fmt;

use thiserror::Error;

/// Lexical problems with a term or individual name.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("name is empty")]
    Empty,
    #[error("name {0:?} has leading or trailing whitespace")]
    Whitespace(String),
    #[error("name {0:?} contains reserved character {1:?}")]
    Reserved(String, char),
}

/// Characters the exchange grammar uses as delimiters.
pub const RESERVED_CHARS: [char; 5] = [',', '(', ')', '\t', '\n'];

/// Checks the lexical rules shared by category names, relation names,
/// individual ids and opaque time tokens.
pub fn check_name(name: &str) -> Result<(), TermError> {
    if name.is_empty() {
        return Err(TermError::Empty);
    }
    if name.trim() != name {
        return Err(TermError::Whitespace(name.to_string()));
    }
    if let Some(c) = name
        .chars()
        .find(|c| RESERVED_CHARS.contains(c) || *c == '\r')
    {
        return Err(TermError::Reserved(name.to_string(), c));
    }
    Ok(())
}

/// The name of a category or relation term. Identity is the exact,
/// case-sensitive string.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermId(String);

impl TermId {
    pub fn new(name: impl Into<String>) -> Result<Self, TermError> {
        let name = name.into();
        check_name(&name)?;
        Ok(TermId(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TermId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Borrow<str> for TermId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl AsRef<str> for TermId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl TryFrom<&str> for TermId {
    type Error = TermError;

    fn try_from(value: &str) -> Result<Self, Self::Error> {
        TermId::new(value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_internal_spaces() {
        let t = TermId::new("Orbital Debris Fragment").unwrap();
        assert_eq!(t.as_str(), "Orbital Debris Fragment");
    }

    #[test]
    fn rejects_bad_names() {
        assert_eq!(TermId::new(""), Err(TermError::Empty));
        assert!(matches!(
            TermId::new(" Debris"),
            Err(TermError::Whitespace(_))
        ));
        assert!(matches!(
            TermId::new("Debris "),
            Err(TermError::Whitespace(_))
        ));
        assert!(matches!(
            TermId::new("Orbital Debris (Fragment)"),
            Err(TermError::Reserved(_, '('))
        ));
        assert!(matches!(
            TermId::new("a,b"),
            Err(TermError::Reserved(_, ','))
        ));
    }

    #[test]
    fn case_sensitive() {
        assert_ne!(TermId::new("Orbit").unwrap(), TermId::new("orbit").unwrap());
    }
}
