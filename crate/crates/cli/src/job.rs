//! Line-oriented `key: value` job documents.
//!
//! Blank lines and lines starting with `#` are ignored. Each command declares
//! the keys it accepts; anything else is rejected with its line number.

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct JobDoc {
    pub source: String,
    entries: Vec<Entry>,
}

impl JobDoc {
    pub fn parse(source: &str, text: &str) -> Result<Self, CliError> {
        let mut entries = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once(':')
                .ok_or_else(|| CliError::input(format!("{source}:{}: expected `key: value`", n + 1)))?;
            let key = key.trim();
            if key.is_empty() {
                return Err(CliError::input(format!("{source}:{}: empty key", n + 1)));
            }
            entries.push(Entry { line: n + 1, key: key.into(), value: value.trim().into() });
        }
        Ok(JobDoc { source: source.into(), entries })
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    /// Rejects keys not accepted by `allowed` and repeats of keys outside `repeatable`.
    pub fn check_keys(&self, allowed: impl Fn(&str) -> bool, repeatable: &[&str]) -> Result<(), CliError> {
        let mut seen = std::collections::BTreeSet::new();
        for e in &self.entries {
            if !allowed(&e.key) {
                return Err(self.error(e, format!("unknown key `{}`", e.key)));
            }
            if !seen.insert(e.key.as_str()) && !repeatable.contains(&e.key.as_str()) {
                return Err(self.error(e, format!("key `{}` given twice", e.key)));
            }
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }

    pub fn all<'a>(&'a self, key: &'a str) -> impl Iterator<Item = &'a Entry> + 'a {
        self.entries.iter().filter(move |e| e.key == key)
    }

    pub fn require(&self, key: &str) -> Result<&Entry, CliError> {
        self.get(key).ok_or_else(|| CliError::input(format!("{}: missing key `{key}`", self.source)))
    }

    pub fn error(&self, e: &Entry, message: impl std::fmt::Display) -> CliError {
        CliError::input(format!("{}:{}: {message}", self.source, e.line))
    }
}
