//! Artifact writers. Every file starts with a provenance block (tool version,
//! config echo, grid hash); numbers use the shortest decimal that round-trips.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::hex;
use crate::config::{Format, RunConfig};
use crate::error::{Error, Result};
use crate::exact3::Trajectory;
use crate::rates::RateTensor;

pub const TOOL: &str = "cgsme";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Hex SHA-256 of the little-endian bytes of `values`.
pub fn grid_hash(values: &[f64]) -> String {
    let mut h = Sha256::new();
    for v in values {
        h.update(v.to_le_bytes());
    }
    hex(&h.finalize())
}

/// Shortest decimal representation that parses back to `v`.
pub fn fmt_num(v: f64) -> String {
    format!("{v:?}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    pub grid_sha256: String,
}

impl Provenance {
    pub fn new(config: &RunConfig, grid: &[f64]) -> Self {
        Provenance { tool: TOOL.into(), version: VERSION.into(), config: config.clone(), grid_sha256: grid_hash(grid) }
    }
}

/// Named columns of doubles.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[k]).collect()
    }
}

pub const TRAJECTORY_COLUMNS: [&str; 10] =
    ["t", "rho00", "rho11", "rho22", "re_rho01", "im_rho01", "re_rho02", "im_rho02", "re_rho12", "im_rho12"];

pub fn trajectory_table(traj: &Trajectory) -> Table {
    let mut t = Table::new(&TRAJECTORY_COLUMNS);
    for (time, rho) in traj.times.iter().zip(&traj.states) {
        let p = rho.populations();
        let (a, b, c) = (rho.get(0, 1), rho.get(0, 2), rho.get(1, 2));
        t.push(vec![*time, p[0], p[1], p[2], a.re, a.im, b.re, b.im, c.re, c.im]);
    }
    t
}

/// `dt`, then real and imaginary parts of every γ entry, then of every S entry.
pub fn rates_table(scan: &[RateTensor]) -> Table {
    let mut names = vec!["dt".to_string()];
    for m in ["gamma", "s"] {
        for (j, k) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            names.push(format!("re_{m}{j}{k}"));
            names.push(format!("im_{m}{j}{k}"));
        }
    }
    let mut t = Table { columns: names, rows: Vec::new() };
    for r in scan {
        let mut row = vec![r.dt];
        for m in [&r.gamma, &r.lamb] {
            for (j, k) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                row.push(m[j][k].re);
                row.push(m[j][k].im);
            }
        }
        t.push(row);
    }
    t
}

fn csv_text(prov: &Provenance, table: &Table) -> String {
    let mut s = String::new();
    s.push_str(&format!("# tool: {} {}\n", prov.tool, prov.version));
    s.push_str(&format!("# config: {}\n", prov.config.to_json()));
    s.push_str(&format!("# grid_sha256: {}\n", prov.grid_sha256));
    s.push_str(&table.columns.join(","));
    s.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|v| fmt_num(*v)).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

#[derive(Serialize)]
struct JsonTable<'a> {
    provenance: &'a Provenance,
    columns: &'a [String],
    rows: &'a [Vec<f64>],
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut f = fs::File::create(path)?;
    f.write_all(bytes)?;
    Ok(())
}

/// `stem` + `suffix` + the extension of `format`.
pub fn artifact_path(stem: &str, suffix: &str, format: Format) -> PathBuf {
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    PathBuf::from(format!("{stem}{suffix}.{ext}"))
}

/// Write `table` as CSV or JSON depending on `format`.
pub fn write_table(path: &Path, format: Format, prov: &Provenance, table: &Table) -> Result<()> {
    match format {
        Format::Csv => write_bytes(path, csv_text(prov, table).as_bytes()),
        Format::Json => {
            let doc = JsonTable { provenance: prov, columns: &table.columns, rows: &table.rows };
            let mut text = serde_json::to_string_pretty(&doc)?;
            text.push('\n');
            write_bytes(path, text.as_bytes())
        }
    }
}

/// Write a JSON object with a `provenance` key prepended to the fields of `record`.
pub fn write_record<T: Serialize>(path: &Path, prov: &Provenance, record: &T) -> Result<()> {
    let mut map = serde_json::Map::new();
    map.insert("provenance".into(), serde_json::to_value(prov)?);
    match serde_json::to_value(record)? {
        serde_json::Value::Object(fields) => map.extend(fields),
        other => {
            map.insert("result".into(), other);
        }
    }
    let mut text = serde_json::to_string_pretty(&serde_json::Value::Object(map))?;
    text.push('\n');
    write_bytes(path, text.as_bytes())
}

/// Recover the provenance block of an artifact written by this module.
pub fn read_provenance(path: &Path) -> Result<Provenance> {
    let text = fs::read_to_string(path)?;
    if text.starts_with('#') {
        let field = |key: &str| {
            text.lines()
                .take_while(|l| l.starts_with('#'))
                .find_map(|l| l.strip_prefix(&format!("# {key}: ")).map(str::to_string))
                .ok_or_else(|| Error::Io(format!("{}: missing `{key}` header", path.display())))
        };
        let tool = field("tool")?;
        let (tool, version) = tool.split_once(' ').unwrap_or((&tool, ""));
        Ok(Provenance {
            tool: tool.into(),
            version: version.into(),
            config: RunConfig::from_json(&field("config")?)?,
            grid_sha256: field("grid_sha256")?,
        })
    } else {
        let v: serde_json::Value = serde_json::from_str(&text)?;
        let p = v.get("provenance").ok_or_else(|| Error::Io(format!("{}: no provenance", path.display())))?;
        Ok(serde_json::from_value(p.clone())?)
    }
}

/// Parse the data rows of a CSV artifact.
pub fn read_csv(path: &Path) -> Result<Table> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| Error::Io(format!("{}: empty file", path.display())))?;
    let columns = header.split(',').map(str::to_string).collect();
    let rows = lines
        .map(|l| {
            l.split(',')
                .map(|c| c.parse::<f64>().map_err(|e| Error::Io(format!("{}: {e}", path.display()))))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    Ok(Table { columns, rows })
}
