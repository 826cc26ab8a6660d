//! Per-sample transformation fields: the filter is rotated or scaled by the
//! value stored at each pixel (or voxel).

use std::f64::consts::PI;

use crate::error::{param, Error, Result};
use crate::quat::Quaternion;

/// Which group a transformation field (or a decomposed filter) belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Group {
    Rotation2,
    Scale2,
    Rotation3,
}

impl Group {
    pub fn name(self) -> &'static str {
        match self {
            Group::Rotation2 => "rotation2",
            Group::Scale2 => "scale2",
            Group::Rotation3 => "rotation3",
        }
    }
}

/// Wraps an angle into `[-π, π)`.
pub fn wrap_angle(a: f64) -> f64 {
    let r = (a + PI).rem_euclid(2.0 * PI) - PI;
    // rem_euclid may round up to the modulus itself.
    if r >= PI {
        -PI
    } else {
        r
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Cells {
    Rotation2(Vec<f64>),
    Scale2 { scale: Vec<f64>, log_scale: Vec<f64> },
    Rotation3(Vec<Quaternion>),
}

/// A transformation per grid sample.
#[derive(Clone, Debug, PartialEq)]
pub struct XformField {
    dims: [usize; 3],
    cells: Cells,
}

impl XformField {
    /// Rotation angles in radians, normalized into `[-π, π)`.
    pub fn rotation2(width: usize, height: usize, angles: Vec<f64>) -> Result<Self> {
        check_len([width, height, 1], angles.len())?;
        if let Some(i) = angles.iter().position(|a| !a.is_finite()) {
            return Err(param("angle", format!("non-finite angle at index {i}")));
        }
        Ok(XformField {
            dims: [width, height, 1],
            cells: Cells::Rotation2(angles.into_iter().map(wrap_angle).collect()),
        })
    }

    pub fn constant_rotation2(width: usize, height: usize, angle: f64) -> Self {
        XformField::rotation2(width, height, vec![angle; width * height]).expect("finite constant angle")
    }

    /// Positive finite scale factors.
    pub fn scale2(width: usize, height: usize, scales: Vec<f64>) -> Result<Self> {
        check_len([width, height, 1], scales.len())?;
        if let Some(i) = scales.iter().position(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(param(
                "scale",
                format!("scale {} at index {i} must be positive and finite", scales[i]),
            ));
        }
        let log_scale = scales.iter().map(|s| s.ln()).collect();
        Ok(XformField {
            dims: [width, height, 1],
            cells: Cells::Scale2 {
                scale: scales,
                log_scale,
            },
        })
    }

    pub fn constant_scale2(width: usize, height: usize, s: f64) -> Result<Self> {
        XformField::scale2(width, height, vec![s; width * height])
    }

    /// Unit quaternions per voxel; inputs within `1e-9` of unit norm are renormalized.
    pub fn rotation3(dims: [usize; 3], rotations: Vec<Quaternion>) -> Result<Self> {
        check_len(dims, rotations.len())?;
        let rotations = rotations
            .into_iter()
            .map(Quaternion::checked_unit)
            .collect::<Result<Vec<_>>>()?;
        Ok(XformField {
            dims,
            cells: Cells::Rotation3(rotations),
        })
    }

    pub fn constant_rotation3(dims: [usize; 3], q: Quaternion) -> Result<Self> {
        XformField::rotation3(dims, vec![q; dims[0] * dims[1] * dims[2]])
    }

    pub fn group(&self) -> Group {
        match self.cells {
            Cells::Rotation2(_) => Group::Rotation2,
            Cells::Scale2 { .. } => Group::Scale2,
            Cells::Rotation3(_) => Group::Rotation3,
        }
    }

    /// `[width, height, depth]`; depth is 1 for planar fields.
    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn dims2(&self) -> (usize, usize) {
        (self.dims[0], self.dims[1])
    }

    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn angles(&self) -> Option<&[f64]> {
        match &self.cells {
            Cells::Rotation2(a) => Some(a),
            _ => None,
        }
    }

    pub fn scales(&self) -> Option<&[f64]> {
        match &self.cells {
            Cells::Scale2 { scale, .. } => Some(scale),
            _ => None,
        }
    }

    pub fn log_scales(&self) -> Option<&[f64]> {
        match &self.cells {
            Cells::Scale2 { log_scale, .. } => Some(log_scale),
            _ => None,
        }
    }

    pub fn rotations(&self) -> Option<&[Quaternion]> {
        match &self.cells {
            Cells::Rotation3(q) => Some(q),
            _ => None,
        }
    }

    pub(crate) fn expect_group(&self, g: Group) -> Result<()> {
        if self.group() == g {
            Ok(())
        } else {
            Err(Error::GroupMismatch {
                expected: g.name(),
                found: self.group().name(),
            })
        }
    }
}

fn check_len(dims: [usize; 3], len: usize) -> Result<()> {
    if dims.contains(&0) {
        return Err(param("dims", format!("{dims:?} must be positive")));
    }
    let n = dims[0] * dims[1] * dims[2];
    if n != len {
        return Err(Error::DimensionMismatch(format!(
            "{dims:?} field needs {n} cells, got {len}"
        )));
    }
    Ok(())
}
