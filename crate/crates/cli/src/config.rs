//! Flat `key = value` configuration and flag resolution.
//!
//! Precedence is command-line flag, then config file, then built-in default.
//! Every value a command reads is recorded in its resolved form so that the
//! run manifest can be fed back in through `--config`.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use serde_json::Value;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Accepts either flat `key = value` lines (`#` starts a comment) or a
    /// JSON document produced by `--format json`, whose `manifest.config`
    /// object is used.
    pub fn parse(text: &str) -> CliResult<Self> {
        if text.trim_start().starts_with('{') {
            return Self::parse_json(text);
        }
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::usage(format!("config line {}: expected key = value", lineno + 1))
            })?;
            let key = key.trim().to_string();
            if key.is_empty() {
                return Err(CliError::usage(format!(
                    "config line {}: empty key",
                    lineno + 1
                )));
            }
            if values
                .insert(key.clone(), value.trim().to_string())
                .is_some()
            {
                return Err(CliError::usage(format!("config key `{key}` given twice")));
            }
        }
        Ok(Self { values })
    }

    fn parse_json(text: &str) -> CliResult<Self> {
        let doc: Value =
            serde_json::from_str(text).map_err(|e| CliError::usage(format!("config json: {e}")))?;
        let config = doc
            .get("manifest")
            .and_then(|m| m.get("config"))
            .or_else(|| doc.get("config"))
            .and_then(Value::as_object)
            .ok_or_else(|| CliError::usage("config json has no `manifest.config` object"))?;
        let values = config
            .iter()
            .map(|(k, v)| {
                let s = match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                (k.clone(), s)
            })
            .collect();
        Ok(Self { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }
}

/// Formats a float so that parsing it back gives the same bits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

fn parse_value<T: FromStr>(key: &str, raw: &str) -> CliResult<T> {
    raw.trim()
        .parse()
        .map_err(|_| CliError::usage(format!("config key `{key}`: cannot parse `{raw}`")))
}

pub struct Resolver<'a> {
    file: Option<&'a ConfigFile>,
    resolved: BTreeMap<String, String>,
}

impl<'a> Resolver<'a> {
    pub fn new(file: Option<&'a ConfigFile>) -> Self {
        Self {
            file,
            resolved: BTreeMap::new(),
        }
    }

    fn file_value(&self, key: &str) -> Option<&'a str> {
        self.file.and_then(|f| f.get(key))
    }

    pub fn f64(&mut self, key: &str, flag: Option<f64>, default: f64) -> CliResult<f64> {
        let v = match (flag, self.file_value(key)) {
            (Some(v), _) => v,
            (None, Some(raw)) => parse_value(key, raw)?,
            (None, None) => default,
        };
        if !v.is_finite() {
            return Err(CliError::usage(format!("`{key}` must be finite")));
        }
        self.resolved.insert(key.to_string(), fmt_f64(v));
        Ok(v)
    }

    pub fn opt_f64(&mut self, key: &str, flag: Option<f64>) -> CliResult<Option<f64>> {
        let v = match (flag, self.file_value(key)) {
            (Some(v), _) => Some(v),
            (None, Some(raw)) => Some(parse_value(key, raw)?),
            (None, None) => None,
        };
        if let Some(v) = v {
            self.resolved.insert(key.to_string(), fmt_f64(v));
        }
        Ok(v)
    }

    /// Comma-separated list in the config file; repeated flag on the command line.
    pub fn f64_list(&mut self, key: &str, flag: &[f64], default: &[f64]) -> CliResult<Vec<f64>> {
        let v: Vec<f64> = if !flag.is_empty() {
            flag.to_vec()
        } else if let Some(raw) = self.file_value(key) {
            raw.split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| parse_value(key, s))
                .collect::<CliResult<_>>()?
        } else {
            default.to_vec()
        };
        let text: Vec<String> = v.iter().map(|x| fmt_f64(*x)).collect();
        self.resolved.insert(key.to_string(), text.join(","));
        Ok(v)
    }

    /// Whether a list was supplied explicitly (flag or file) rather than defaulted.
    pub fn has(&self, key: &str, flag_given: bool) -> bool {
        flag_given || self.file_value(key).is_some()
    }

    pub fn usize(&mut self, key: &str, flag: Option<usize>, default: usize) -> CliResult<usize> {
        let v = match (flag, self.file_value(key)) {
            (Some(v), _) => v,
            (None, Some(raw)) => parse_value(key, raw)?,
            (None, None) => default,
        };
        self.resolved.insert(key.to_string(), v.to_string());
        Ok(v)
    }

    pub fn flag(&mut self, key: &str, flag: bool) -> CliResult<bool> {
        let v = if flag {
            true
        } else if let Some(raw) = self.file_value(key) {
            parse_value(key, raw)?
        } else {
            false
        };
        self.resolved.insert(key.to_string(), v.to_string());
        Ok(v)
    }

    pub fn string(&mut self, key: &str, flag: Option<&str>, default: &str) -> String {
        let v = flag
            .map(str::to_string)
            .or_else(|| self.file_value(key).map(str::to_string))
            .unwrap_or_else(|| default.to_string());
        self.resolved.insert(key.to_string(), v.clone());
        v
    }

    pub fn opt_string(&mut self, key: &str, flag: Option<&str>) -> Option<String> {
        let v = flag
            .map(str::to_string)
            .or_else(|| self.file_value(key).map(str::to_string))?;
        self.resolved.insert(key.to_string(), v.clone());
        Some(v)
    }

    pub fn finish(self) -> BTreeMap<String, String> {
        self.resolved
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_file() {
        let c = ConfigFile::parse("# fig1\nsigma = 0.45, 0.65\n\nkbt=2 # comment\n").unwrap();
        assert_eq!(c.get("sigma"), Some("0.45, 0.65"));
        assert_eq!(c.get("kbt"), Some("2"));
        assert!(ConfigFile::parse("sigma 0.4").is_err());
        assert!(ConfigFile::parse("a=1\na=2").is_err());
    }

    #[test]
    fn precedence() {
        let c = ConfigFile::parse("x0 = 2\nsigma = 0.3,0.4").unwrap();
        let mut r = Resolver::new(Some(&c));
        assert_eq!(r.f64("x0", None, 1.0).unwrap(), 2.0);
        assert_eq!(r.f64("p0", None, 0.5).unwrap(), 0.5);
        assert_eq!(r.f64("x0", Some(3.0), 1.0).unwrap(), 3.0);
        assert_eq!(r.f64_list("sigma", &[], &[1.0]).unwrap(), vec![0.3, 0.4]);
        let resolved = r.finish();
        assert_eq!(resolved["x0"], "3.0");
        assert_eq!(resolved["sigma"], "0.3,0.4");
    }

    #[test]
    fn json_manifest_round_trip() {
        let doc = r#"{"manifest": {"command": "fig1", "config": {"x0": "1.0", "samples": "5"}}}"#;
        let c = ConfigFile::parse(doc).unwrap();
        let mut r = Resolver::new(Some(&c));
        assert_eq!(r.usize("samples", None, 400).unwrap(), 5);
        assert_eq!(r.f64("x0", None, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn floats_round_trip_through_text() {
        for v in [0.1, 1.0 / 3.0, 4.0 * std::f64::consts::PI, 1e-300] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }
}
