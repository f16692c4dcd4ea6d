//! CSV files with `# key=value` metadata lines ahead of the header row.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use apwb_core::State;

use crate::error::HarnessError;

pub const VERSION: &str = env!("APWB_VERSION");

/// Metadata key whose value changes from run to run.
pub const WALL_TIME_KEY: &str = "wall_time_s";

pub const PROFILE_COLUMNS: [&str; 4] = ["x", "rho", "q", "u"];
pub const TABLE_COLUMNS: [&str; 5] = ["eps", "potential", "cells", "err_rho", "err_q"];
pub const SERIES_COLUMNS: [&str; 3] = ["t", "max_q", "l1_rho_err"];

/// Shortest representation that parses back to the same `f64`.
pub fn num(v: f64) -> String {
    format!("{v:e}")
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Metadata(Vec<(String, String)>);

impl Metadata {
    /// Version line followed by `entries`.
    pub fn new(entries: Vec<(String, String)>) -> Self {
        let mut m = Metadata(vec![("version".into(), VERSION.into())]);
        m.0.extend(entries);
        m
    }

    pub fn push(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.0.push((key.to_owned(), value.to_string()));
        self
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.push(key, value);
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.0
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_owned(),
        source,
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> HarnessError + '_ {
    move |source| HarnessError::Csv {
        path: path.to_owned(),
        source,
    }
}

pub fn write_csv<I>(
    path: &Path,
    meta: &Metadata,
    header: &[&str],
    rows: I,
) -> Result<(), HarnessError>
where
    I: IntoIterator<Item = Vec<String>>,
{
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(io_err(dir))?;
        }
    }
    let mut file = fs::File::create(path).map_err(io_err(path))?;
    for (k, v) in meta.entries() {
        let v = v.replace('\n', " ");
        writeln!(file, "# {k}={v}").map_err(io_err(path))?;
    }
    let mut w = csv::Writer::from_writer(file);
    w.write_record(header).map_err(csv_err(path))?;
    for row in rows {
        w.write_record(&row).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

pub fn write_profile(
    path: &Path,
    meta: &Metadata,
    x: &[f64],
    state: &State,
    rho_floor: f64,
) -> Result<(), HarnessError> {
    if x.len() != state.len() {
        return Err(HarnessError::LengthMismatch(x.len(), state.len()));
    }
    let u = state.velocity(rho_floor);
    let rows = (0..x.len()).map(|i| vec![num(x[i]), num(state.rho[i]), num(state.q[i]), num(u[i])]);
    write_csv(path, meta, &PROFILE_COLUMNS, rows)
}

/// A CSV file read back with its metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub path: PathBuf,
    pub metadata: Metadata,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn read(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        let mut metadata = Metadata::default();
        let mut body_start = 0;
        for line in text.split_inclusive('\n') {
            let Some(rest) = line.strip_prefix('#') else {
                break;
            };
            body_start += line.len();
            let rest = rest.trim();
            let (k, v) = rest.split_once('=').ok_or_else(|| HarnessError::Schema {
                path: path.to_owned(),
                reason: format!("metadata line without '=': {rest:?}"),
            })?;
            metadata.push(k, v);
        }
        let mut reader = csv::Reader::from_reader(text[body_start..].as_bytes());
        let headers: Vec<String> = reader
            .headers()
            .map_err(csv_err(path))?
            .iter()
            .map(str::to_owned)
            .collect();
        if headers.iter().all(|h| h.is_empty()) {
            return Err(HarnessError::Schema {
                path: path.to_owned(),
                reason: "missing header row".into(),
            });
        }
        let rows = reader
            .records()
            .map(|r| r.map(|rec| rec.iter().map(str::to_owned).collect()))
            .collect::<Result<Vec<Vec<String>>, _>>()
            .map_err(csv_err(path))?;
        Ok(Table {
            path: path.to_owned(),
            metadata,
            headers,
            rows,
        })
    }

    pub fn expect_columns(&self, expected: &[&str]) -> Result<(), HarnessError> {
        if self.headers != expected {
            return Err(HarnessError::Schema {
                path: self.path.clone(),
                reason: format!("columns {:?}, expected {expected:?}", self.headers),
            });
        }
        Ok(())
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>, HarnessError> {
        let idx =
            self.headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| HarnessError::Schema {
                    path: self.path.clone(),
                    reason: format!("no column {name:?}"),
                })?;
        self.rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row[idx].parse().map_err(|_| HarnessError::Schema {
                    path: self.path.clone(),
                    reason: format!("row {}: column {name:?} is not a number", i + 1),
                })
            })
            .collect()
    }
}
