//! Tables, series, CSV/JSON rendering and run manifests.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::config::fmt_f64;
use crate::error::CliResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    /// Rendered empty in CSV, `null` in JSON.
    Missing,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => fmt_f64(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => csv_text(s),
            Cell::Bool(b) => b.to_string(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => json_f64(*v),
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
            Cell::Missing => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

fn csv_text(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn json_f64(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    /// `(name, unit)`; the header reads `name[unit]`.
    pub columns: Vec<(String, String)>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[(&str, &str)]) -> Self {
        Self {
            name: name.to_string(),
            columns: columns
                .iter()
                .map(|(n, u)| (n.to_string(), u.to_string()))
                .collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(
            row.len(),
            self.columns.len(),
            "row width in table {}",
            self.name
        );
        self.rows.push(row);
    }

    fn write_csv(&self, out: &mut String) {
        let header: Vec<String> = self
            .columns
            .iter()
            .map(|(n, u)| format!("{n}[{u}]"))
            .collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
    }

    fn to_json(&self) -> Value {
        let columns: Vec<Value> = self
            .columns
            .iter()
            .map(|(n, u)| json!({ "name": n, "unit": u }))
            .collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
            .collect();
        json!({ "name": self.name, "columns": columns, "rows": rows })
    }
}

/// One sampled curve for JSON output.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Series {
    pub params: BTreeMap<String, f64>,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// Additional per-sample arrays, keyed by name.
    pub extra: BTreeMap<String, Vec<f64>>,
}

impl Series {
    fn to_json(&self) -> Value {
        let mut obj = Map::new();
        let params: Map<String, Value> = self
            .params
            .iter()
            .map(|(k, v)| (k.clone(), json_f64(*v)))
            .collect();
        obj.insert("params".into(), Value::Object(params));
        obj.insert(
            "times".into(),
            self.times.iter().map(|v| json_f64(*v)).collect(),
        );
        obj.insert(
            "values".into(),
            self.values.iter().map(|v| json_f64(*v)).collect(),
        );
        for (k, vs) in &self.extra {
            obj.insert(k.clone(), vs.iter().map(|v| json_f64(*v)).collect());
        }
        Value::Object(obj)
    }
}

/// Everything a command produces.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Output {
    pub tables: Vec<Table>,
    /// When present, JSON output lists these instead of the tables.
    pub series: Option<Vec<Series>>,
}

impl Output {
    pub fn table(t: Table) -> Self {
        Self {
            tables: vec![t],
            series: None,
        }
    }

    /// CSV payload. Several tables are separated by a blank line and each is
    /// introduced by a `# name` line.
    pub fn csv(&self) -> String {
        let mut out = String::new();
        let titled = self.tables.len() > 1;
        for (i, t) in self.tables.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            if titled {
                let _ = writeln!(out, "# {}", t.name);
            }
            t.write_csv(&mut out);
        }
        out
    }

    /// SHA-256 of the CSV payload; independent of the output format.
    pub fn digest(&self) -> String {
        let hash = Sha256::digest(self.csv().as_bytes());
        let mut hex = String::with_capacity(64);
        for b in hash.iter() {
            let _ = write!(hex, "{b:02x}");
        }
        format!("sha256:{hex}")
    }

    fn json(&self, manifest: &RunManifest) -> Value {
        let mut obj = Map::new();
        obj.insert(
            "manifest".into(),
            serde_json::to_value(manifest).expect("manifest serializes"),
        );
        match &self.series {
            Some(series) => {
                obj.insert(
                    "series".into(),
                    series.iter().map(Series::to_json).collect(),
                );
            }
            None => {
                obj.insert(
                    "tables".into(),
                    self.tables.iter().map(Table::to_json).collect(),
                );
            }
        }
        Value::Object(obj)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: BTreeMap<String, String>,
    pub version: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub digest: String,
}

impl RunManifest {
    pub fn new(command: &str, config: BTreeMap<String, String>, output: &Output) -> Self {
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            command: command.to_string(),
            config,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp,
            digest: output.digest(),
        }
    }
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// Writes the payload to `out` (stdout when `None`). CSV output to a file
/// gets a `<out>.manifest.json` sidecar; JSON output embeds the manifest.
pub fn emit(
    output: &Output,
    manifest: &RunManifest,
    format: Format,
    out: Option<&Path>,
) -> CliResult<()> {
    let text = match format {
        Format::Csv => output.csv(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&output.json(manifest)).expect("json renders");
            s.push('\n');
            s
        }
    };
    match out {
        Some(path) => {
            std::fs::write(path, text)?;
            if format == Format::Csv {
                let mut m = serde_json::to_string_pretty(manifest).expect("manifest renders");
                m.push('\n');
                std::fs::write(sidecar_path(path), m)?;
            }
        }
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_cells_with_commas_are_quoted() {
        assert_eq!(Cell::from("plain").csv(), "plain");
        assert_eq!(Cell::from("E(x,t)").csv(), "\"E(x,t)\"");
        assert_eq!(Cell::from("a \"b\"").csv(), "\"a \"\"b\"\"\"");
    }

    fn sample() -> Output {
        let mut t = Table::new("demo", &[("t", "time"), ("z", "1"), ("status", "-")]);
        t.push(vec![0.0.into(), 1.0.into(), "ok".into()]);
        t.push(vec![0.5.into(), Cell::Missing, "divergent".into()]);
        Output::table(t)
    }

    #[test]
    fn csv_layout() {
        assert_eq!(
            sample().csv(),
            "t[time],z[1],status[-]\n0.0,1.0,ok\n0.5,,divergent\n"
        );
        let mut two = sample();
        two.tables.push(Table::new("empty", &[("a", "1")]));
        assert_eq!(
            two.csv(),
            "# demo\nt[time],z[1],status[-]\n0.0,1.0,ok\n0.5,,divergent\n\n# empty\na[1]\n"
        );
    }

    #[test]
    fn digest_is_stable_and_content_sensitive() {
        let a = sample();
        assert_eq!(a.digest(), sample().digest());
        assert!(a.digest().starts_with("sha256:"));
        let mut b = sample();
        b.tables[0].rows[0][1] = Cell::Num(1.0000000000000002);
        assert_ne!(a.digest(), b.digest());
    }

    #[test]
    fn json_uses_null_for_missing() {
        let m = RunManifest::new("demo", BTreeMap::new(), &sample());
        let v = sample().json(&m);
        assert_eq!(v["tables"][0]["rows"][1][1], Value::Null);
        assert_eq!(v["manifest"]["command"], "demo");
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(
            sidecar_path(Path::new("out/a.csv")),
            PathBuf::from("out/a.csv.manifest.json")
        );
    }
}
