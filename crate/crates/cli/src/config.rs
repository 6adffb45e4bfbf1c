//! Flat `key = value` configuration files.
//!
//! Grammar: one `key = value` pair per line; blank lines and lines whose
//! first non-blank character is `#` are ignored; keys are `[a-z0-9_]+`;
//! a key may appear once. Every key must be consumed by the command, so
//! typos are reported with their line number.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug)]
pub struct FlatConfig {
    path: PathBuf,
    entries: BTreeMap<String, (usize, String)>,
    used: Vec<String>,
}

impl FlatConfig {
    pub fn parse(path: &Path, text: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |m: String| CliError::Input(format!("{}:{line_no}: {m}", path.display()));
            let (k, v) = line.split_once('=').ok_or_else(|| err(format!("expected key = value, got {line:?}")))?;
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() || !k.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_') {
                return Err(err(format!("invalid key {k:?}")));
            }
            if let Some((first, _)) = entries.get(k) {
                return Err(err(format!("duplicate key {k:?} (first set on line {first})")));
            }
            entries.insert(k.to_string(), (line_no, v.to_string()));
        }
        Ok(FlatConfig {
            path: path.to_path_buf(),
            entries,
            used: Vec::new(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        Self::parse(path, &text)
    }

    /// Directory that relative paths in the file are resolved against.
    pub fn base_dir(&self) -> &Path {
        self.path.parent().unwrap_or(Path::new("."))
    }

    /// Replace or add a value, as a command-line override does.
    pub fn set(&mut self, key: &str, value: impl Display) {
        let line = self.entries.get(key).map_or(0, |e| e.0);
        self.entries.insert(key.to_string(), (line, value.to_string()));
    }

    fn err_at(&self, key: &str, msg: impl Display) -> CliError {
        match self.entries.get(key) {
            Some((line, _)) if *line > 0 => CliError::Input(format!("{}:{line}: {key}: {msg}", self.path.display())),
            _ => CliError::Input(format!("{}: {key}: {msg}", self.path.display())),
        }
    }

    pub fn get<T: FromStr>(&mut self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: Display,
    {
        let Some((_, v)) = self.entries.get(key) else { return Ok(None) };
        self.used.push(key.to_string());
        let v = v.clone();
        v.parse::<T>().map(Some).map_err(|e| self.err_at(key, format!("cannot parse {v:?}: {e}")))
    }

    pub fn get_or<T: FromStr>(&mut self, key: &str, default: T) -> Result<T, CliError>
    where
        T::Err: Display,
    {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&mut self, key: &str) -> Result<T, CliError>
    where
        T::Err: Display,
    {
        self.get(key)?
            .ok_or_else(|| CliError::Input(format!("{}: missing required key {key:?}", self.path.display())))
    }

    /// Error on the first key nobody asked for.
    pub fn finish(&self) -> Result<(), CliError> {
        match self.entries.keys().find(|k| !self.used.contains(k)) {
            Some(k) => Err(self.err_at(k, "unknown key")),
            None => Ok(()),
        }
    }

    /// Attach a line number to an error about `key`.
    pub fn blame(&self, key: &str, msg: impl Display) -> CliError {
        self.err_at(key, msg)
    }

    /// SHA-256 over the sorted `key=value` lines, first 16 hex digits.
    /// Keys that cannot change results (`threads`, `output`) are left out.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for (k, (_, v)) in self.entries.iter().filter(|(k, _)| !matches!(k.as_str(), "threads" | "output")) {
            h.update(format!("{k}={v}\n").as_bytes());
        }
        h.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> Result<FlatConfig, CliError> {
        FlatConfig::parse(Path::new("c.conf"), text)
    }

    #[test]
    fn parses_and_reports_lines() {
        let mut c = cfg("# comment\n\nqubits_per_cell = 2\nacceptance_probability=0.5\n").unwrap();
        assert_eq!(c.get::<usize>("qubits_per_cell").unwrap(), Some(2));
        let e = c.finish().unwrap_err().to_string();
        assert!(e.contains("c.conf:4"), "{e}");
        assert_eq!(c.get::<f64>("acceptance_probability").unwrap(), Some(0.5));
        c.finish().unwrap();

        let mut c = cfg("a = x\n").unwrap();
        assert!(c.get::<u32>("a").unwrap_err().to_string().contains("c.conf:1"));
        assert!(cfg("a = 1\na = 2\n").unwrap_err().to_string().contains(":2:"));
        assert!(cfg("just words\n").is_err());
        assert!(cfg("Bad-Key = 1\n").is_err());
    }

    #[test]
    fn hash_tracks_values_not_layout() {
        let a = cfg("a = 1\nb = 2\n").unwrap();
        let b = cfg("# x\nb=2\na=1\n").unwrap();
        assert_eq!(a.hash(), b.hash());
        let mut c = cfg("a = 1\nb = 2\n").unwrap();
        c.set("a", 3);
        assert_ne!(a.hash(), c.hash());
        let mut d = cfg("a = 1\nb = 2\n").unwrap();
        d.set("threads", 4);
        assert_eq!(a.hash(), d.hash());
    }
}
