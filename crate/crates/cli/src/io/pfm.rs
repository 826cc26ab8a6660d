//! Portable float maps. `Pf` holds one real plane, `PF` three channels;
//! complex fields are written as `PF` with channels `(re, im, 0)`. Rows run
//! bottom to top as the format prescribes, so row 0 of the file is the
//! field's last row. A negative scale marks little-endian samples.
//!
//! Volumes and multi-plane fields are stored as vertical stacks: plane `z`
//! occupies field rows `z·h .. (z+1)·h`.

use std::path::Path;

use xconv::{Complex64, Field2};

use crate::error::{format_err, io_err, CliResult};

pub struct Pfm {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    /// Row-major, top row first, channels interleaved.
    pub data: Vec<f32>,
}

pub fn decode(bytes: &[u8], path: &Path) -> CliResult<Pfm> {
    let mut fields = Vec::with_capacity(4);
    let mut pos = 0;
    while fields.len() < 4 {
        while bytes.get(pos).is_some_and(|b| b.is_ascii_whitespace()) {
            pos += 1;
        }
        let start = pos;
        while bytes.get(pos).is_some_and(|b| !b.is_ascii_whitespace()) {
            pos += 1;
        }
        if start == pos {
            return Err(format_err(path, "truncated PFM header"));
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| format_err(path, "malformed PFM header"))?);
    }
    let channels = match fields[0] {
        "Pf" => 1,
        "PF" => 3,
        m => return Err(format_err(path, format!("unknown PFM magic {m:?}"))),
    };
    let num = |s: &str| s.parse::<usize>().map_err(|_| format_err(path, "malformed PFM size"));
    let (width, height) = (num(fields[1])?, num(fields[2])?);
    let scale: f64 = fields[3].parse().map_err(|_| format_err(path, "malformed PFM scale"))?;
    if width == 0 || height == 0 || scale == 0.0 {
        return Err(format_err(path, "empty PFM"));
    }
    let start = pos + 1;
    let n = width * height * channels;
    let raster = bytes
        .get(start..start + 4 * n)
        .ok_or_else(|| format_err(path, "truncated PFM raster"))?;
    let mut data = vec![0f32; n];
    let row = width * channels;
    for (i, c) in raster.chunks_exact(4).enumerate() {
        let b = [c[0], c[1], c[2], c[3]];
        let v = if scale < 0.0 {
            f32::from_le_bytes(b)
        } else {
            f32::from_be_bytes(b)
        };
        let (file_row, col) = (i / row, i % row);
        data[(height - 1 - file_row) * row + col] = v;
    }
    Ok(Pfm {
        width,
        height,
        channels,
        data,
    })
}

pub fn read(path: &Path) -> CliResult<Pfm> {
    decode(&std::fs::read(path).map_err(io_err(path))?, path)
}

pub fn encode(p: &Pfm) -> Vec<u8> {
    let magic = if p.channels == 1 { "Pf" } else { "PF" };
    let mut out = format!("{magic}\n{} {}\n-1.0\n", p.width, p.height).into_bytes();
    let row = p.width * p.channels;
    for y in (0..p.height).rev() {
        for v in &p.data[y * row..(y + 1) * row] {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

pub fn write(path: &Path, p: &Pfm) -> CliResult<()> {
    std::fs::write(path, encode(p)).map_err(io_err(path))
}

impl Pfm {
    /// One plane for real fields, `(re, im, 0)` otherwise.
    pub fn from_field(f: &Field2) -> Pfm {
        let (width, height) = f.dims();
        if f.is_real() {
            Pfm {
                width,
                height,
                channels: 1,
                data: f.values().iter().map(|v| v.re as f32).collect(),
            }
        } else {
            Pfm {
                width,
                height,
                channels: 3,
                data: f
                    .values()
                    .iter()
                    .flat_map(|v| [v.re as f32, v.im as f32, 0.0])
                    .collect(),
            }
        }
    }

    /// A one-plane map is real; a three-channel map is read as `(re, im, _)`.
    pub fn to_field(&self) -> Field2 {
        if self.channels == 1 {
            Field2::from_real(self.width, self.height, self.data.iter().map(|&v| v as f64).collect())
                .expect("dims match")
        } else {
            let v = self
                .data
                .chunks_exact(3)
                .map(|c| Complex64::new(c[0] as f64, c[1] as f64))
                .collect();
            Field2::from_complex(self.width, self.height, v).expect("dims match")
        }
    }

    /// First channel as a flat real vector.
    pub fn plane(&self) -> Vec<f64> {
        self.data.iter().step_by(self.channels).map(|&v| v as f64).collect()
    }
}
