//! Polar resampling of filters around a center point.
//!
//! Rings sit at half-integer radii `r_j = (j + 0.5)·r_max/n_radii`, so no ring
//! falls on the origin where the angle is undefined. Angles are
//! `θ_m = 2πm/n_angles` measured in the y-down image frame.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{param, Result};
use crate::field::{Field2, FilterSource2};

/// Samples on `n_radii` rings × `n_angles` spokes, ring-major.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarGrid {
    n_radii: usize,
    n_angles: usize,
    r_max: f64,
    values: Vec<Complex64>,
}

pub(crate) fn check_polar_params(n_radii: usize, n_angles: usize, r_max: f64) -> Result<()> {
    if n_radii < 1 {
        return Err(param("n_radii", "must be at least 1"));
    }
    if n_angles < 4 || !n_angles.is_multiple_of(2) {
        return Err(param("n_angles", format!("{n_angles} must be even and at least 4")));
    }
    if !(r_max.is_finite() && r_max > 0.0) {
        return Err(param("r_max", format!("{r_max} must be positive")));
    }
    Ok(())
}

impl PolarGrid {
    pub fn new(n_radii: usize, n_angles: usize, r_max: f64, values: Vec<Complex64>) -> Result<Self> {
        check_polar_params(n_radii, n_angles, r_max)?;
        if values.len() != n_radii * n_angles {
            return Err(param(
                "values",
                format!("expected {} samples, got {}", n_radii * n_angles, values.len()),
            ));
        }
        Ok(PolarGrid {
            n_radii,
            n_angles,
            r_max,
            values,
        })
    }

    pub fn n_radii(&self) -> usize {
        self.n_radii
    }

    pub fn n_angles(&self) -> usize {
        self.n_angles
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn radius(&self, j: usize) -> f64 {
        ring_radius(j, self.n_radii, self.r_max)
    }

    pub fn angle(&self, m: usize) -> f64 {
        2.0 * PI * m as f64 / self.n_angles as f64
    }

    pub fn get(&self, j: usize, m: usize) -> Complex64 {
        self.values[j * self.n_angles + m]
    }

    pub fn ring(&self, j: usize) -> &[Complex64] {
        &self.values[j * self.n_angles..(j + 1) * self.n_angles]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Bilinear interpolation in `(r, θ)` with angular wrap-around.
    ///
    /// Radii inside the first ring read the first ring; radii beyond `r_max`
    /// read zero.
    pub fn interpolate(&self, r: f64, theta: f64) -> Complex64 {
        if r > self.r_max {
            return Complex64::new(0.0, 0.0);
        }
        let dr = self.r_max / self.n_radii as f64;
        let t = (r / dr - 0.5).clamp(0.0, (self.n_radii - 1) as f64);
        let j0 = t.floor() as usize;
        let j1 = (j0 + 1).min(self.n_radii - 1);
        let fr = t - j0 as f64;
        let na = self.n_angles as f64;
        let a = (theta / (2.0 * PI) * na).rem_euclid(na);
        let m0 = (a.floor() as usize) % self.n_angles;
        let m1 = (m0 + 1) % self.n_angles;
        let fa = a - a.floor();
        let ring = |j: usize| self.get(j, m0) * (1.0 - fa) + self.get(j, m1) * fa;
        ring(j0) * (1.0 - fr) + ring(j1) * fr
    }
}

pub(crate) fn ring_radius(j: usize, n_radii: usize, r_max: f64) -> f64 {
    (j as f64 + 0.5) * r_max / n_radii as f64
}

/// Samples `filter` on the polar grid; a [`crate::field::CenteredField`]
/// source reads bilinearly with zero outside the grid.
pub fn resample_polar<S: FilterSource2 + ?Sized>(
    filter: &S,
    n_radii: usize,
    n_angles: usize,
    r_max: f64,
) -> Result<PolarGrid> {
    check_polar_params(n_radii, n_angles, r_max)?;
    let trig: Vec<(f64, f64)> = (0..n_angles)
        .map(|m| (2.0 * PI * m as f64 / n_angles as f64).sin_cos())
        .collect();
    let mut values = Vec::with_capacity(n_radii * n_angles);
    for j in 0..n_radii {
        let r = ring_radius(j, n_radii, r_max);
        for &(s, c) in &trig {
            values.push(filter.sample(r * c, r * s));
        }
    }
    Ok(PolarGrid {
        n_radii,
        n_angles,
        r_max,
        values,
    })
}

/// Renders a polar grid onto a `width × height` Cartesian grid whose origin
/// sits at `center`. Pixels beyond `r_max` are zero.
pub fn resample_cartesian(grid: &PolarGrid, width: usize, height: usize, center: (f64, f64)) -> Result<Field2> {
    if width == 0 || height == 0 {
        return Err(param("dims", "output must be at least 1x1"));
    }
    let out = Field2::from_fn(width, height, |x, y| {
        let dx = x as f64 - center.0;
        let dy = y as f64 - center.1;
        grid.interpolate(dx.hypot(dy), dy.atan2(dx))
    });
    Ok(out.retag())
}
