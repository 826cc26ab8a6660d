//! CSV inputs and outputs. An optional header row (any non-numeric first
//! row) is skipped on input.

use std::path::Path;

use crate::error::{format_err, io_err, CliError, CliResult};

pub type Polyline = Vec<(f64, f64)>;

fn numbers(fields: &[&str]) -> Option<Vec<f64>> {
    fields.iter().map(|s| s.trim().parse().ok()).collect()
}

/// `x,y` rows; fragments are separated by blank lines.
pub fn parse_polylines(text: &str, path: &Path) -> CliResult<Vec<Polyline>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        match numbers(&f) {
            Some(v) if v.len() == 2 => cur.push((v[0], v[1])),
            _ if i == 0 => {}
            _ => return Err(format_err(path, format!("line {}: expected `x,y`", i + 1))),
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    if out.is_empty() {
        return Err(format_err(path, "no polylines"));
    }
    Ok(out)
}

pub fn read_polylines(path: &Path) -> CliResult<Vec<Polyline>> {
    parse_polylines(&std::fs::read_to_string(path).map_err(io_err(path))?, path)
}

fn read_rows(path: &Path, width: usize) -> CliResult<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(|e| csv_err(path, e))?;
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let f: Vec<&str> = rec.iter().collect();
        match numbers(&f) {
            Some(v) if v.len() == width => rows.push(v),
            _ if i == 0 => {}
            _ => {
                return Err(format_err(
                    path,
                    format!("row {}: expected {width} numeric columns", i + 1),
                ))
            }
        }
    }
    Ok(rows)
}

fn csv_err(path: &Path, e: csv::Error) -> CliError {
    if let csv::ErrorKind::Io(_) = e.kind() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => io_err(path)(io),
            _ => unreachable!(),
        }
    } else {
        format_err(path, e.to_string())
    }
}

/// `x,y,scale` rows.
pub fn read_keypoints(path: &Path) -> CliResult<Vec<(f64, f64, f64)>> {
    Ok(read_rows(path, 3)?.into_iter().map(|v| (v[0], v[1], v[2])).collect())
}

/// `scene,model` index pairs.
pub fn read_pairs(path: &Path) -> CliResult<Vec<(usize, usize)>> {
    read_rows(path, 2)?
        .into_iter()
        .map(|v| {
            if v.iter().all(|x| *x >= 0.0 && x.fract() == 0.0) {
                Ok((v[0] as usize, v[1] as usize))
            } else {
                Err(format_err(path, format!("pair {v:?} is not a pair of indices")))
            }
        })
        .collect()
}

pub fn write_rows<R: AsRef<[String]>>(path: &Path, header: &[&str], rows: &[R]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for r in rows {
        w.write_record(r.as_ref()).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(io_err(path))
}
