//! Plain-text `key = value` configuration merged with command-line flags.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use kmslab_core::Number;
use sha2::{Digest, Sha256};

use crate::CliError;

/// Effective settings of one run: config file entries overridden by flags.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    /// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!(
                    "line {}: expected `key = value`, got {raw:?}",
                    i + 1
                ))
            })?;
            let key = normalize_key(k.trim());
            if key.is_empty() {
                return Err(CliError::Config(format!("line {}: empty key", i + 1)));
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(Settings { values })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Flag values win over file values.
    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.values.insert(normalize_key(key), value.to_string());
    }

    pub fn set_opt<T: ToString>(&mut self, key: &str, value: Option<T>) {
        if let Some(v) = value {
            self.set(key, v);
        }
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn entries(&self) -> &BTreeMap<String, String> {
        &self.values
    }

    pub fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T, CliError> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| CliError::Config(format!("{key} = {v:?} is not a valid value"))),
        }
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T, CliError> {
        let v = self
            .raw(key)
            .ok_or_else(|| CliError::Config(format!("missing required setting `{key}`")))?;
        v.parse()
            .map_err(|_| CliError::Config(format!("{key} = {v:?} is not a valid value")))
    }

    /// Numbers accept `p/q`, decimals, surds and `cf:` expansions.
    pub fn number(&self, key: &str, default: &str) -> Result<Number, CliError> {
        let v = self.raw(key).unwrap_or(default);
        v.parse()
            .map_err(|e| CliError::Config(format!("{key}: {e}")))
    }

    pub fn float(&self, key: &str, default: &str) -> Result<f64, CliError> {
        Ok(self.number(key, default)?.value())
    }

    /// Comma-separated list of numbers.
    pub fn float_list(&self, key: &str, default: &str) -> Result<Vec<f64>, CliError> {
        let v = self.raw(key).unwrap_or(default);
        v.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<Number>()
                    .map(|n| n.value())
                    .map_err(|e| CliError::Config(format!("{key}: {e}")))
            })
            .collect()
    }

    /// SHA-256 of the command and the sorted effective settings, excluding
    /// output locations.
    pub fn hash(&self, command: &str) -> String {
        let mut h = Sha256::new();
        h.update(command.as_bytes());
        for (k, v) in &self.values {
            if k == "out" || k == "csv" {
                continue;
            }
            h.update(b"\n");
            h.update(k.as_bytes());
            h.update(b"=");
            h.update(v.as_bytes());
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn normalize_key(k: &str) -> String {
    k.trim().replace('_', "-").to_ascii_lowercase()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_overrides() {
        let mut s = Settings::parse(
            "# run\nbeta = 1.5\n theta=sqrt(2)-1  # irrational\n\nseed_value = 7\n",
        )
        .unwrap();
        assert_eq!(s.raw("beta"), Some("1.5"));
        assert_eq!(s.raw("seed-value"), Some("7"));
        assert!((s.float("theta", "0").unwrap() - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        s.set("beta", "2/3");
        assert!((s.float("beta", "0").unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.get("missing", 4usize).unwrap(), 4);
        assert!(s.require::<u64>("missing").is_err());
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(Settings::parse("beta 1").is_err());
        assert!(Settings::parse(" = 1").is_err());
    }

    #[test]
    fn hash_ignores_outputs_and_order() {
        let a = Settings::parse("beta = 1\ntheta = 0\nout = a.json").unwrap();
        let b = Settings::parse("theta = 0\nbeta = 1\nout = b.json").unwrap();
        assert_eq!(a.hash("exists"), b.hash("exists"));
        assert_ne!(a.hash("exists"), a.hash("check"));
        assert_eq!(a.hash("x").len(), 64);
    }

    #[test]
    fn lists() {
        let s = Settings::default();
        assert_eq!(
            s.float_list("betas", "-1, 2,1/2").unwrap(),
            vec![-1.0, 2.0, 0.5]
        );
        assert!(s.float_list("betas", "").unwrap().is_empty());
    }
}
