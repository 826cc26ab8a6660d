//! Binary PGM (P5), 8 or 16 bits per sample.

use std::path::Path;

use serde::Serialize;
use xconv::Field2;

use crate::error::{format_err, io_err, param, CliResult};

/// Header tokens after the magic: width, height, maxval, then exactly one
/// whitespace byte before the raster. Comments run from `#` to end of line.
fn header(bytes: &[u8], path: &Path) -> CliResult<([usize; 3], usize)> {
    let mut vals = [0usize; 3];
    let mut pos = 2;
    for v in vals.iter_mut() {
        loop {
            match bytes.get(pos) {
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(_) => break,
                None => return Err(format_err(path, "truncated PGM header")),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(|b| b.is_ascii_digit()) {
            pos += 1;
        }
        *v = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| format_err(path, "malformed PGM header"))?;
    }
    if !bytes.get(pos).is_some_and(|b| b.is_ascii_whitespace()) {
        return Err(format_err(path, "malformed PGM header"));
    }
    Ok((vals, pos + 1))
}

/// Samples scaled to `[0, 1]` by the file's maxval.
pub fn decode(bytes: &[u8], path: &Path) -> CliResult<Field2> {
    if !bytes.starts_with(b"P5") {
        return Err(format_err(path, "not a binary PGM (P5)"));
    }
    let ([w, h, maxval], start) = header(bytes, path)?;
    if w == 0 || h == 0 || maxval == 0 || maxval > 65535 {
        return Err(format_err(path, format!("unsupported PGM {w}x{h} maxval {maxval}")));
    }
    let wide = maxval > 255;
    let need = w * h * if wide { 2 } else { 1 };
    let raster = bytes
        .get(start..start + need)
        .ok_or_else(|| format_err(path, "truncated PGM raster"))?;
    let m = maxval as f64;
    let v: Vec<f64> = if wide {
        raster
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]) as f64 / m)
            .collect()
    } else {
        raster.iter().map(|&b| b as f64 / m).collect()
    };
    Ok(Field2::from_real(w, h, v)?)
}

pub fn read(path: &Path) -> CliResult<Field2> {
    decode(&std::fs::read(path).map_err(io_err(path))?, path)
}

/// How stored samples map back to field values:
/// `value = min + (max - min)·sample/maxval`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Mapping {
    pub min: f64,
    pub max: f64,
    pub maxval: u32,
}

/// Real part, min-max normalized to the full sample range. A constant
/// field maps to zero.
pub fn encode(field: &Field2, bits: u8) -> CliResult<(Vec<u8>, Mapping)> {
    let maxval: u32 = match bits {
        8 => 255,
        16 => 65535,
        _ => return Err(param("bit-depth", format!("must be 8 or 16, got {bits}"))),
    };
    let v = field.real_values();
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if max > min { max - min } else { 1.0 };
    let (w, h) = field.dims();
    let mut out = format!("P5\n{w} {h}\n{maxval}\n").into_bytes();
    for x in &v {
        let s = ((x - min) / span * maxval as f64).round().clamp(0.0, maxval as f64) as u32;
        if bits == 8 {
            out.push(s as u8);
        } else {
            out.extend_from_slice(&(s as u16).to_be_bytes());
        }
    }
    Ok((out, Mapping { min, max, maxval }))
}

pub fn write(path: &Path, field: &Field2, bits: u8) -> CliResult<Mapping> {
    let (bytes, m) = encode(field, bits)?;
    std::fs::write(path, bytes).map_err(io_err(path))?;
    Ok(m)
}
