//! Flat `key = value` run configuration.
//!
//! One assignment per line, `#` starts a comment, blank lines are ignored.
//! Physical quantities must carry a unit suffix; bare numbers are accepted
//! only for dimensionless keys. Unknown and duplicate keys are rejected.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::quantity::{parse_as, Dimension};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Quantity(Dimension),
    /// A bare word such as `trapezoidal`.
    Word,
    /// A file path, resolved against the config file's directory.
    Path,
}

#[derive(Debug, Clone, Copy)]
pub struct Key {
    pub name: &'static str,
    pub kind: Kind,
}

pub const fn key(name: &'static str, kind: Kind) -> Key {
    Key { name, kind }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Word(String),
    Path(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: `{key}`: {message}")]
    BadValue { line: usize, key: String, message: String },
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error("`{key}`: {message}")]
    Invalid { key: &'static str, message: String },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<&'static str, Value>,
}

impl Config {
    /// Parses `text` against `schema`; relative paths are resolved against `base`.
    pub fn parse(text: &str, schema: &[Key], base: &Path) -> Result<Config, ConfigError> {
        let mut values = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (k, v) = content.split_once('=').ok_or(ConfigError::Syntax { line })?;
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() || v.is_empty() {
                return Err(ConfigError::Syntax { line });
            }
            let spec = schema
                .iter()
                .find(|s| s.name == k)
                .ok_or_else(|| ConfigError::UnknownKey { line, key: k.to_string() })?;
            let bad = |message: String| ConfigError::BadValue { line, key: k.to_string(), message };
            let value = match spec.kind {
                Kind::Quantity(dim) => {
                    Value::Number(parse_as(v, dim, dim == Dimension::Dimensionless).map_err(|e| bad(e.to_string()))?)
                }
                Kind::Word => Value::Word(v.to_string()),
                Kind::Path => Value::Path(base.join(v)),
            };
            if values.insert(spec.name, value).is_some() {
                return Err(ConfigError::DuplicateKey { line, key: k.to_string() });
            }
        }
        Ok(Config { values })
    }

    pub fn load(path: &Path, schema: &[Key]) -> Result<Config, crate::CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| crate::CliError::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Config::parse(&text, schema, base).map_err(|e| crate::CliError::Config { path: path.to_path_buf(), source: e })
    }

    pub fn contains(&self, name: &str) -> bool {
        self.values.contains_key(name)
    }

    pub fn number(&self, name: &'static str) -> Option<f64> {
        match self.values.get(name) {
            Some(Value::Number(v)) => Some(*v),
            _ => None,
        }
    }

    pub fn require(&self, name: &'static str) -> Result<f64, ConfigError> {
        self.number(name).ok_or(ConfigError::Missing(name))
    }

    pub fn number_or(&self, name: &'static str, default: f64) -> f64 {
        self.number(name).unwrap_or(default)
    }

    pub fn word(&self, name: &'static str) -> Option<&str> {
        match self.values.get(name) {
            Some(Value::Word(w)) => Some(w),
            _ => None,
        }
    }

    pub fn path(&self, name: &'static str) -> Option<&Path> {
        match self.values.get(name) {
            Some(Value::Path(p)) => Some(p),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCHEMA: &[Key] = &[
        key("width", Kind::Quantity(Dimension::Second)),
        key("beta", Kind::Quantity(Dimension::Dimensionless)),
        key("method", Kind::Word),
        key("netlist", Kind::Path),
    ];

    #[test]
    fn parses_values() {
        let text = "# pulse\nwidth = 600ps   # fwhm\n\nbeta = 1e-5\nmethod = trapezoidal\nnetlist = a.net\n";
        let c = Config::parse(text, SCHEMA, Path::new("cfg")).unwrap();
        assert_eq!(c.number("width"), Some(600e-12));
        assert_eq!(c.number("beta"), Some(1e-5));
        assert_eq!(c.word("method"), Some("trapezoidal"));
        assert_eq!(c.path("netlist"), Some(Path::new("cfg/a.net")));
        assert_eq!(c.require("nope"), Err(ConfigError::Missing("nope")));
    }

    #[test]
    fn rejects_unknown_key_by_name() {
        let e = Config::parse("widht = 600ps", SCHEMA, Path::new(".")).unwrap_err();
        assert_eq!(e, ConfigError::UnknownKey { line: 1, key: "widht".into() });
        assert!(e.to_string().contains("widht"));
    }

    #[test]
    fn rejects_bare_numbers_and_duplicates() {
        let e = Config::parse("width = 600", SCHEMA, Path::new(".")).unwrap_err();
        assert!(matches!(e, ConfigError::BadValue { line: 1, .. }), "{e}");
        let e = Config::parse("width = 1ns\nwidth = 2ns", SCHEMA, Path::new(".")).unwrap_err();
        assert_eq!(e, ConfigError::DuplicateKey { line: 2, key: "width".into() });
        assert_eq!(Config::parse("width 1ns", SCHEMA, Path::new(".")).unwrap_err(), ConfigError::Syntax { line: 1 });
    }
}
