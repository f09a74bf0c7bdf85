use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use casimir_core::ForceResult;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::Format;

pub const HEADER: [&str; 7] = ["L_m", "pressure_Pa", "err_Pa", "eta_red", "path", "evals", "status"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    NotConverged,
    Failed,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::NotConverged => "not-converged",
            Status::Failed => "failed",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Status {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ok" => Ok(Status::Ok),
            "not-converged" => Ok(Status::NotConverged),
            "failed" => Ok(Status::Failed),
            other => Err(format!("unknown status `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub separation: f64,
    pub pressure: f64,
    pub error: f64,
    pub reduction: f64,
    pub path: String,
    pub evals: usize,
    pub status: Status,
}

impl Row {
    pub fn from_result(r: &ForceResult, status: Status) -> Self {
        Self {
            separation: r.separation,
            pressure: r.pressure,
            error: r.error,
            reduction: r.reduction,
            path: r.path.as_str().to_string(),
            evals: r.evals,
            status,
        }
    }

    /// Equality that treats matching NaNs as equal.
    pub fn same_as(&self, other: &Row) -> bool {
        let eq = |a: f64, b: f64| a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan());
        eq(self.separation, other.separation)
            && eq(self.pressure, other.pressure)
            && eq(self.error, other.error)
            && eq(self.reduction, other.reduction)
            && self.path == other.path
            && self.evals == other.evals
            && self.status == other.status
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub rows: Vec<Row>,
}

impl Table {
    pub fn all_ok(&self) -> bool {
        self.rows.iter().all(|r| r.status == Status::Ok)
    }

    pub fn same_as(&self, other: &Table) -> bool {
        self.rows.len() == other.rows.len() && self.rows.iter().zip(&other.rows).all(|(a, b)| a.same_as(b))
    }
}

#[derive(Debug, Error)]
pub enum TableError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
}

/// 17 significant digits: enough to round-trip any `f64`.
fn float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Serialize, Deserialize)]
struct JsonRow {
    #[serde(rename = "L_m")]
    separation: Option<f64>,
    #[serde(rename = "pressure_Pa")]
    pressure: Option<f64>,
    #[serde(rename = "err_Pa")]
    error: Option<f64>,
    #[serde(rename = "eta_red")]
    reduction: Option<f64>,
    path: String,
    evals: usize,
    status: Status,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

pub fn write_csv<W: Write>(table: &Table, out: W) -> Result<(), TableError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in &table.rows {
        w.write_record([
            float(r.separation),
            float(r.pressure),
            float(r.error),
            float(r.reduction),
            r.path.clone(),
            r.evals.to_string(),
            r.status.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_json<W: Write>(table: &Table, mut out: W) -> Result<(), TableError> {
    let rows: Vec<JsonRow> = table
        .rows
        .iter()
        .map(|r| JsonRow {
            separation: finite(r.separation),
            pressure: finite(r.pressure),
            error: finite(r.error),
            reduction: finite(r.reduction),
            path: r.path.clone(),
            evals: r.evals,
            status: r.status,
        })
        .collect();
    serde_json::to_writer_pretty(&mut out, &rows)?;
    writeln!(out).map_err(serde_json::Error::io)?;
    Ok(())
}

pub fn render(table: &Table, format: Format) -> Result<Vec<u8>, TableError> {
    let mut buf = Vec::new();
    match format {
        Format::Csv => write_csv(table, &mut buf)?,
        Format::Json => write_json(table, &mut buf)?,
    }
    Ok(buf)
}

/// Write `table` to `path`, or to stdout when `path` is `None`.
pub fn write_table(table: &Table, format: Format, path: Option<&Path>) -> Result<(), TableError> {
    let bytes = render(table, format)?;
    match path {
        Some(p) => {
            let io_err = |source| TableError::Io {
                path: p.to_path_buf(),
                source,
            };
            let mut f = BufWriter::new(File::create(p).map_err(io_err)?);
            f.write_all(&bytes).map_err(io_err)?;
            f.flush().map_err(io_err)
        }
        None => io::stdout().write_all(&bytes).map_err(|source| TableError::Io {
            path: PathBuf::from("<stdout>"),
            source,
        }),
    }
}

pub fn read_csv<R: io::Read>(input: R) -> Result<Table, TableError> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers()?.clone();
    if header.iter().ne(HEADER.iter().copied()) {
        return Err(TableError::Malformed {
            line: 1,
            reason: format!("unexpected header {:?}", header.iter().collect::<Vec<_>>()),
        });
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let bad = |reason: String| TableError::Malformed { line, reason };
        let num = |j: usize| rec[j].parse::<f64>().map_err(|e| bad(format!("{}: {e}", HEADER[j])));
        rows.push(Row {
            separation: num(0)?,
            pressure: num(1)?,
            error: num(2)?,
            reduction: num(3)?,
            path: rec[4].to_string(),
            evals: rec[5].parse().map_err(|e| bad(format!("evals: {e}")))?,
            status: rec[6].parse().map_err(bad)?,
        });
    }
    Ok(Table { rows })
}

pub fn read_json<R: io::Read>(input: R) -> Result<Table, TableError> {
    let rows: Vec<JsonRow> = serde_json::from_reader(input)?;
    let nan = |x: Option<f64>| x.unwrap_or(f64::NAN);
    Ok(Table {
        rows: rows
            .into_iter()
            .map(|r| Row {
                separation: nan(r.separation),
                pressure: nan(r.pressure),
                error: nan(r.error),
                reduction: nan(r.reduction),
                path: r.path,
                evals: r.evals,
                status: r.status,
            })
            .collect(),
    })
}

pub fn load_table(path: &Path, format: Format) -> Result<Table, TableError> {
    let f = File::open(path).map_err(|source| TableError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    match format {
        Format::Csv => read_csv(f),
        Format::Json => read_json(f),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize) -> Table {
        Table {
            rows: (0..n)
                .map(|i| Row {
                    separation: 1e-7 * (i + 1) as f64 / 3.0,
                    pressure: -0.1 / (i + 1) as f64,
                    error: 1e-13,
                    reduction: 0.1 + i as f64 / 7.0,
                    path: "imaginary-axis".into(),
                    evals: 1000 + i,
                    status: if i == 1 { Status::NotConverged } else { Status::Ok },
                })
                .collect(),
        }
    }

    #[test]
    fn one_row_csv_has_two_lines() {
        let text = String::from_utf8(render(&sample(1), Format::Csv).unwrap()).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert_eq!(text.lines().next().unwrap(), "L_m,pressure_Pa,err_Pa,eta_red,path,evals,status");
    }

    #[test]
    fn csv_round_trip() {
        let t = sample(4);
        let back = read_csv(render(&t, Format::Csv).unwrap().as_slice()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn json_round_trip_and_shape() {
        let t = sample(5);
        let bytes = render(&t, Format::Json).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
        let arr = v.as_array().unwrap();
        assert_eq!(arr.len(), 5);
        let keys: Vec<&str> = arr[0].as_object().unwrap().keys().map(String::as_str).collect();
        let mut expected = HEADER.to_vec();
        expected.sort_unstable();
        let mut keys_sorted = keys.clone();
        keys_sorted.sort_unstable();
        assert_eq!(keys_sorted, expected);
        assert_eq!(read_json(bytes.as_slice()).unwrap(), t);
    }

    #[test]
    fn failed_rows_survive_round_trip() {
        let mut t = sample(2);
        t.rows[0].pressure = f64::NAN;
        t.rows[0].status = Status::Failed;
        for fmt in [Format::Csv, Format::Json] {
            let bytes = render(&t, fmt).unwrap();
            let back = match fmt {
                Format::Csv => read_csv(bytes.as_slice()),
                Format::Json => read_json(bytes.as_slice()),
            }
            .unwrap();
            assert!(back.same_as(&t));
        }
    }
}
