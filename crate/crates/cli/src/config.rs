//! Parameter resolution: command-line flags, then an optional `key = value`
//! file, then built-in defaults. Every resolved value remembers its source
//! so the manifest can record it.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use anyhow::{Context, Result};
use serde::Serialize;

use crate::UsageError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Flag,
    File,
    Default,
}

#[derive(Debug, Clone, Serialize)]
pub struct Resolved {
    pub value: String,
    pub source: Source,
}

#[derive(Debug, Default)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    /// `#` starts a comment; blank lines are ignored; keys may use `-` or `_`.
    pub fn parse(text: &str) -> Result<Self, UsageError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| UsageError(format!("config line {}: expected key = value", i + 1)))?;
            entries.insert(normalize(k.trim()), v.trim().to_string());
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Ok(Self::parse(&text)?)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(&normalize(key)).map(String::as_str)
    }
}

fn normalize(key: &str) -> String {
    key.replace('-', "_").to_ascii_lowercase()
}

/// Collects resolved parameters for one command.
pub struct Resolver<'a> {
    file: &'a ConfigFile,
    pub record: BTreeMap<String, Resolved>,
}

impl<'a> Resolver<'a> {
    pub fn new(file: &'a ConfigFile) -> Self {
        Self {
            file,
            record: BTreeMap::new(),
        }
    }

    fn note(&mut self, key: &str, value: String, source: Source) {
        self.record.insert(normalize(key), Resolved { value, source });
    }

    fn from_file<T: FromStr>(&self, key: &str) -> Result<Option<T>, UsageError>
    where
        T::Err: Display,
    {
        match self.file.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| UsageError(format!("config key {key}: {e}"))),
        }
    }

    /// Flag, else file, else `default`.
    pub fn value<T>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T, UsageError>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let (v, src) = match (flag, self.from_file(key)?) {
            (Some(v), _) => (v, Source::Flag),
            (None, Some(v)) => (v, Source::File),
            (None, None) => (default, Source::Default),
        };
        self.note(key, v.to_string(), src);
        Ok(v)
    }

    /// Flag, else file, else a usage error.
    pub fn required<T>(&mut self, key: &str, flag: Option<T>) -> Result<T, UsageError>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let (v, src) = match (flag, self.from_file(key)?) {
            (Some(v), _) => (v, Source::Flag),
            (None, Some(v)) => (v, Source::File),
            (None, None) => {
                return Err(UsageError(format!(
                    "missing required parameter --{} (flag or config key {})",
                    key.replace('_', "-"),
                    normalize(key)
                )))
            }
        };
        self.note(key, v.to_string(), src);
        Ok(v)
    }

    /// Flag, else file, else absent.
    pub fn optional<T>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>, UsageError>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let found = match (flag, self.from_file(key)?) {
            (Some(v), _) => Some((v, Source::Flag)),
            (None, Some(v)) => Some((v, Source::File)),
            (None, None) => None,
        };
        Ok(found.map(|(v, src)| {
            self.note(key, v.to_string(), src);
            v
        }))
    }
}

/// Comma list `a,b,c` or inclusive range `start:stop:count`.
#[derive(Debug, Clone, PartialEq)]
pub struct NumList(pub Vec<f64>);

impl FromStr for NumList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if let [a, b, n] = s.split(':').collect::<Vec<_>>()[..] {
            let a: f64 = a.trim().parse().map_err(|e| format!("range start {a:?}: {e}"))?;
            let b: f64 = b.trim().parse().map_err(|e| format!("range stop {b:?}: {e}"))?;
            let n: usize = n.trim().parse().map_err(|e| format!("range count {n:?}: {e}"))?;
            if n == 0 {
                return Err("range count must be positive".into());
            }
            if n == 1 {
                return Ok(NumList(vec![a]));
            }
            return Ok(NumList(
                (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
            ));
        }
        let vals = s
            .split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        if vals.is_empty() {
            return Err("empty list".into());
        }
        Ok(NumList(vals))
    }
}

impl Display for NumList {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// `min:max` window on `|x|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window(pub f64, pub f64);

impl FromStr for Window {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once(':').ok_or("expected min:max")?;
        let a: f64 = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
        let b: f64 = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
        if !(a >= 0.0 && b > a) {
            return Err(format!("window {a}:{b} must satisfy 0 <= min < max"));
        }
        Ok(Window(a, b))
    }
}

impl Display for Window {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.0, self.1)
    }
}
