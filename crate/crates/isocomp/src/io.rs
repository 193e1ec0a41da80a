//! CSV and JSON formats.
//!
//! CSV files carry a header row, `.` decimals, 17 significant digits
//! (`{:.16e}`) and `\n` line endings, so identical inputs give byte-identical
//! files.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use csv::{ReaderBuilder, Terminator, WriterBuilder};
use isocomp_core::comparison::unit_ball_volume;
use isocomp_core::rearrangement::SampledFunction;
use isocomp_core::ProfileCurve;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes a header and rows of numbers.
pub fn write_csv<W: Write>(out: W, header: &[&str], rows: &[Vec<f64>]) -> Result<(), CliError> {
    let mut w = WriterBuilder::new().terminator(Terminator::Any(b'\n')).from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|&x| format_float(x)))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a numeric CSV with a header row. Returns the header and one
/// vector per column.
pub fn read_csv<R: Read>(input: R, expect_columns: usize) -> Result<(Vec<String>, Vec<Vec<f64>>), CliError> {
    let mut r = ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if header.len() != expect_columns {
        return Err(CliError::Input(format!(
            "expected {expect_columns} CSV columns, found {} ({})",
            header.len(),
            header.join(",")
        )));
    }
    let mut cols = vec![Vec::new(); expect_columns];
    for (line, record) in r.records().enumerate() {
        let record = record?;
        for (j, field) in record.iter().enumerate() {
            let x: f64 = field
                .parse()
                .map_err(|_| CliError::Input(format!("row {}: cannot parse {field:?} as a number", line + 2)))?;
            cols[j].push(x);
        }
    }
    Ok((header, cols))
}

/// A sampled profile on disk: `{"N", "K", "v0", "grid", "values"}` and an
/// optional `"total_mass"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileFile {
    #[serde(rename = "N")]
    pub n: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub v0: f64,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_mass: Option<f64>,
}

impl ProfileFile {
    pub fn from_curve(curve: &ProfileCurve, grid: &[f64]) -> Self {
        ProfileFile {
            n: curve.n,
            k: curve.k,
            v0: curve.v0,
            grid: grid.to_vec(),
            values: grid.iter().map(|&v| curve.eval(v)).collect(),
            total_mass: curve.total_mass,
        }
    }

    pub fn into_curve(self) -> Result<ProfileCurve, CliError> {
        Ok(ProfileCurve::sampled(self.n, self.k, self.v0, self.total_mass, self.grid, self.values)?)
    }
}

/// Metadata a CSV profile does not carry.
#[derive(Debug, Clone, Copy, Default)]
pub struct CurveMeta {
    pub n: Option<f64>,
    pub k: Option<f64>,
    pub v0: Option<f64>,
    pub avr: Option<f64>,
    pub total_mass: Option<f64>,
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

/// Loads a profile from `v,I` CSV or from JSON (by extension).
///
/// For CSV, `N` is required, `K` defaults to 0 and `v0` to `avr·ω_N` (or the
/// first grid volume without `avr`). Values given in `meta` override the
/// JSON metadata.
pub fn load_curve(path: &Path, meta: CurveMeta) -> Result<ProfileCurve, CliError> {
    let file = File::open(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
    let mut pf = if is_json(path) {
        serde_json::from_reader::<_, ProfileFile>(file)?
    } else {
        let (_, cols) = read_csv(file, 2)?;
        let n = meta
            .n
            .ok_or_else(|| CliError::Usage("--N is required for CSV profiles".into()))?;
        let first = cols[0].first().copied().unwrap_or(1.0);
        ProfileFile {
            n,
            k: 0.0,
            v0: meta.avr.map_or(first, |a| a * unit_ball_volume(n)),
            grid: cols[0].clone(),
            values: cols[1].clone(),
            total_mass: None,
        }
    };
    if let Some(n) = meta.n {
        pf.n = n;
    }
    if let Some(k) = meta.k {
        pf.k = k;
    }
    if let Some(v0) = meta.v0 {
        pf.v0 = v0;
    }
    if meta.total_mass.is_some() {
        pf.total_mass = meta.total_mass;
    }
    if !(pf.v0 > 0.0) {
        pf.v0 = f64::MIN_POSITIVE;
    }
    pf.into_curve()
}

/// Reads a `node,value,weight` CSV.
pub fn load_sampled(path: &Path, n: f64) -> Result<SampledFunction, CliError> {
    let file = File::open(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
    let (_, mut cols) = read_csv(file, 3)?;
    let weights = cols.pop().unwrap_or_default();
    let values = cols.pop().unwrap_or_default();
    let nodes = cols.pop().unwrap_or_default();
    Ok(SampledFunction::new(nodes, values, weights, n)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_exact() {
        let rows = vec![vec![0.1, 1.0 / 3.0], vec![1e-300, std::f64::consts::PI]];
        let mut buf = Vec::new();
        write_csv(&mut buf, &["v", "I"], &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("v,I\n") && !text.contains('\r'));
        let (header, cols) = read_csv(buf.as_slice(), 2).unwrap();
        assert_eq!(header, ["v", "I"]);
        assert_eq!(cols[0], [0.1, 1e-300]);
        assert_eq!(cols[1], [1.0 / 3.0, std::f64::consts::PI]);
    }

    #[test]
    fn malformed_csv() {
        assert!(read_csv("v,I\n1,abc\n".as_bytes(), 2).is_err());
        assert!(read_csv("v\n1\n".as_bytes(), 2).is_err());
        assert!(read_csv("v,I\n1,2,3\n".as_bytes(), 2).is_err());
    }
}
