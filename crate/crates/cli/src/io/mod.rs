//! File formats.

pub mod container;
pub mod csvio;
pub mod pfm;
pub mod pgm;

use std::path::Path;

use xconv::{Field2, Field3, Quaternion, XformField};

use crate::error::{format_err, param, CliResult};
use pfm::Pfm;

fn extension(path: &Path) -> String {
    path.extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .unwrap_or_default()
}

/// PGM (scaled to `[0, 1]`) or PFM, chosen by extension.
pub fn read_image(path: &Path) -> CliResult<Field2> {
    match extension(path).as_str() {
        "pgm" => pgm::read(path),
        "pfm" => Ok(pfm::read(path)?.to_field()),
        _ => Err(format_err(path, "expected a .pgm or .pfm image")),
    }
}

/// Writes `field` by extension. PGM output is the min-max normalized real
/// part and returns its mapping; PFM keeps the values.
pub fn write_image(path: &Path, field: &Field2, bits: u8) -> CliResult<Option<pgm::Mapping>> {
    match extension(path).as_str() {
        "pgm" => pgm::write(path, field, bits).map(Some),
        "pfm" => pfm::write(path, &Pfm::from_field(field)).map(|_| None),
        _ => Err(param("output", format!("{} must end in .pgm or .pfm", path.display()))),
    }
}

/// One-plane PFM of angles in radians.
pub fn read_angle_field(path: &Path, dims: (usize, usize)) -> CliResult<XformField> {
    let p = read_plane(path, dims)?;
    Ok(XformField::rotation2(dims.0, dims.1, p)?)
}

/// One-plane PFM of positive scale factors.
pub fn read_scale_field(path: &Path, dims: (usize, usize)) -> CliResult<XformField> {
    let p = read_plane(path, dims)?;
    Ok(XformField::scale2(dims.0, dims.1, p)?)
}

fn read_plane(path: &Path, dims: (usize, usize)) -> CliResult<Vec<f64>> {
    let p = pfm::read(path)?;
    if (p.width, p.height) != dims {
        return Err(format_err(
            path,
            format!("field is {}x{}, signal is {}x{}", p.width, p.height, dims.0, dims.1),
        ));
    }
    Ok(p.plane())
}

/// A volume stored as `depth` stacked slices.
pub fn read_volume(path: &Path, depth: usize) -> CliResult<Field3> {
    let f = read_image(path)?;
    let (w, h) = f.dims();
    if depth == 0 || h % depth != 0 {
        return Err(format_err(
            path,
            format!("height {h} is not a multiple of depth {depth}"),
        ));
    }
    let hs = h / depth;
    Ok(Field3::from_values([w, hs, depth], f.values().to_vec())?)
}

pub fn volume_as_stack(v: &Field3) -> Field2 {
    let [w, h, d] = v.dims();
    Field2::from_complex(w, h * d, v.values().to_vec())
        .expect("dims match")
        .retag()
}

/// Quaternion field as four stacked planes `w, x, y, z`, each a stack of
/// `dims[2]` slices.
pub fn read_rotation_field(path: &Path, dims: [usize; 3]) -> CliResult<XformField> {
    let p = pfm::read(path)?;
    let n = dims[0] * dims[1] * dims[2];
    if p.width != dims[0] || p.height != 4 * dims[1] * dims[2] {
        return Err(format_err(
            path,
            format!(
                "rotation field must be {}x{} (four stacked planes)",
                dims[0],
                4 * dims[1] * dims[2]
            ),
        ));
    }
    let v = p.plane();
    let q = (0..n)
        .map(|i| Quaternion::new(v[i], v[n + i], v[2 * n + i], v[3 * n + i]))
        .collect();
    Ok(XformField::rotation3(dims, q)?)
}
