//! `key=value` run configuration from the command line and config files.

use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("unknown key '{key}' for {command}; accepted: {accepted}")]
    UnknownKey {
        key: String,
        command: String,
        accepted: String,
    },
    #[error("invalid value for '{key}': {value:?} ({reason})")]
    InvalidValue { key: String, value: String, reason: String },
    #[error("malformed entry {0:?}; expected key=value")]
    Malformed(String),
    #[error("cannot read config file {path}: {reason}")]
    Io { path: String, reason: String },
}

/// Key-value entries for one command; command-line entries override file
/// entries.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    pub command: String,
    entries: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            entries: BTreeMap::new(),
        }
    }

    /// Adds `key = value` lines; blank lines and `#` comments are skipped.
    pub fn merge_file_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            self.insert_pair(line)?;
        }
        Ok(())
    }

    pub fn merge_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        self.merge_file_text(&text)
    }

    pub fn merge_args<S: AsRef<str>>(&mut self, args: &[S]) -> Result<(), ConfigError> {
        args.iter().try_for_each(|a| self.insert_pair(a.as_ref()))
    }

    fn insert_pair(&mut self, pair: &str) -> Result<(), ConfigError> {
        let (k, v) = pair.split_once('=').ok_or_else(|| ConfigError::Malformed(pair.to_string()))?;
        let k = k.trim();
        if k.is_empty() {
            return Err(ConfigError::Malformed(pair.to_string()));
        }
        self.entries.insert(k.to_string(), v.trim().to_string());
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    /// Rejects the first key not in `accepted`.
    pub fn restrict(&self, accepted: &[&str]) -> Result<(), ConfigError> {
        match self.entries.keys().find(|k| !accepted.contains(&k.as_str())) {
            Some(key) => Err(ConfigError::UnknownKey {
                key: key.clone(),
                command: self.command.clone(),
                accepted: accepted.join(", "),
            }),
            None => Ok(()),
        }
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        self.get_f64(key).map(|v| v.unwrap_or(default))
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        let Some(raw) = self.entries.get(key) else { return Ok(None) };
        match raw.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Some(v)),
            Ok(_) => Err(invalid(key, raw, "must be finite")),
            Err(_) => Err(invalid(key, raw, "not a decimal number")),
        }
    }

    pub fn u32_or(&self, key: &str, default: u32) -> Result<u32, ConfigError> {
        let Some(raw) = self.entries.get(key) else { return Ok(default) };
        raw.parse::<u32>()
            .map_err(|_| invalid(key, raw, "not a non-negative integer"))
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool, ConfigError> {
        match self.entries.get(key).map(String::as_str) {
            None => Ok(default),
            Some("true" | "1" | "yes") => Ok(true),
            Some("false" | "0" | "no") => Ok(false),
            Some(raw) => Err(invalid(key, raw, "expected true or false")),
        }
    }

    /// One of `choices`, or `default` when absent.
    pub fn choice_or<'a>(&self, key: &str, choices: &[&'a str], default: &'a str) -> Result<&'a str, ConfigError> {
        match self.entries.get(key) {
            None => Ok(default),
            Some(raw) => choices
                .iter()
                .find(|c| **c == raw.as_str())
                .copied()
                .ok_or_else(|| invalid(key, raw, &format!("expected one of {}", choices.join(", ")))),
        }
    }

    /// `[lo,hi,n]` or `lo,hi,n`.
    pub fn grid_or(&self, key: &str, default: (f64, f64, usize)) -> Result<(f64, f64, usize), ConfigError> {
        let Some(raw) = self.entries.get(key) else { return Ok(default) };
        let inner = raw.trim().trim_start_matches('[').trim_end_matches(']');
        let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
        let bad = || invalid(key, raw, "expected [start,stop,points]");
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = parts[0].parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].parse().map_err(|_| bad())?;
        let n: usize = parts[2].parse().map_err(|_| bad())?;
        if !(lo.is_finite() && hi.is_finite()) || hi <= lo || n < 2 {
            return Err(invalid(key, raw, "need finite start < stop and at least 2 points"));
        }
        Ok((lo, hi, n))
    }

    /// Comma-separated list of decimals.
    pub fn list_or(&self, key: &str, default: Vec<f64>) -> Result<Vec<f64>, ConfigError> {
        let Some(raw) = self.entries.get(key) else { return Ok(default) };
        let inner = raw.trim().trim_start_matches('[').trim_end_matches(']');
        inner
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| invalid(key, raw, "expected a comma-separated list of numbers"))
            })
            .collect()
    }
}

fn invalid(key: &str, value: &str, reason: &str) -> ConfigError {
    ConfigError::InvalidValue {
        key: key.to_string(),
        value: value.to_string(),
        reason: reason.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn args_override_file() {
        let mut c = RunConfig::new("potential");
        c.merge_file_text("# comment\nalpha = 1.5\n\nl = 2  # trailing\n").unwrap();
        c.merge_args(&["alpha=2"]).unwrap();
        assert_eq!(c.f64_or("alpha", 0.0).unwrap(), 2.0);
        assert_eq!(c.u32_or("l", 0).unwrap(), 2);
    }

    #[test]
    fn malformed_number_names_the_key() {
        let mut c = RunConfig::new("potential");
        c.merge_args(&["alpha=abc"]).unwrap();
        let err = c.f64_or("alpha", 0.0).unwrap_err();
        assert!(err.to_string().contains("'alpha'"));
        c.merge_args(&["alpha=inf"]).unwrap();
        assert!(c.f64_or("alpha", 0.0).is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        let mut c = RunConfig::new("spectrum");
        c.merge_args(&["n_max=2", "colour=blue"]).unwrap();
        let err = c.restrict(&["n_max"]).unwrap_err();
        assert!(err.to_string().contains("'colour'"));
        assert!(c.merge_args(&["novalue"]).is_err());
    }

    #[test]
    fn grid_and_list_syntax() {
        let mut c = RunConfig::new("potential");
        c.merge_args(&["grid=[0.1,5,50]", "alphas=0.5, 1.5"]).unwrap();
        assert_eq!(c.grid_or("grid", (0.0, 1.0, 2)).unwrap(), (0.1, 5.0, 50));
        assert_eq!(c.list_or("alphas", vec![]).unwrap(), vec![0.5, 1.5]);
        c.merge_args(&["grid=[5,1,10]"]).unwrap();
        assert!(c.grid_or("grid", (0.0, 1.0, 2)).is_err());
    }
}
