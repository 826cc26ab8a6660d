//! Line integral convolution as a rotation-steered anisotropic blur of
//! white noise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decomp::{decompose_rotation2, FreqFilter2};
use crate::engine::{smooth_adaptive_with, SmoothOptions, Smoothed};
use crate::error::{param, Result};
use crate::field::Field2;
use crate::gradient::gradient;
use crate::xform::{Group, XformField};

use super::filters::{anisotropic_gaussian, blur};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LicParams {
    /// Gaussian sigma along the field direction.
    pub length: f64,
    /// Gaussian sigma across it.
    pub width: f64,
    pub seed: u64,
    /// Divide by the local filter weight. Without it the output is not a
    /// proper average but still shows the streaks.
    pub normalized: bool,
}

impl LicParams {
    pub fn new(length: f64, width: f64, seed: u64) -> Self {
        LicParams {
            length,
            width,
            seed,
            normalized: true,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(param("width", format!("must be positive, got {}", self.width)));
        }
        if !(self.length > self.width && self.length.is_finite()) {
            return Err(param(
                "length",
                format!("must exceed width {}, got {}", self.width, self.length),
            ));
        }
        Ok(())
    }

    /// The steered kernel: full angular band, radius `2.5·length`, angular
    /// sampling fine enough to resolve the width at the outer radius.
    pub fn filter(&self) -> Result<FreqFilter2> {
        self.validate()?;
        let r_max = 2.5 * self.length;
        let n_angles = ((2.0 * std::f64::consts::PI * r_max / self.width).ceil() as usize).div_ceil(4) * 4;
        decompose_rotation2(
            &anisotropic_gaussian(self.length, self.width),
            n_angles,
            r_max.ceil() as usize,
            n_angles,
            r_max,
        )
    }
}

/// Uniform `[0, 1)` noise from a ChaCha8 stream, raster order.
pub fn noise(width: usize, height: usize, seed: u64) -> Field2 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v: Vec<f64> = (0..width * height).map(|_| rng.random::<f64>()).collect();
    Field2::from_real(width, height, v).expect("dims match")
}

pub fn lic(field: &XformField, length: f64, width: f64, seed: u64) -> Result<Field2> {
    lic_with(field, &LicParams::new(length, width, seed)).map(|s| s.output)
}

pub fn lic_with(field: &XformField, params: &LicParams) -> Result<Smoothed> {
    field.expect_group(Group::Rotation2)?;
    let f = params.filter()?;
    let (w, h) = field.dims2();
    let opts = SmoothOptions {
        normalize_signal: true,
        divide: params.normalized,
    };
    smooth_adaptive_with(&noise(w, h, params.seed), field, &f, opts)
}

/// Per-pixel streak orientation from the structure tensor smoothed at
/// `sigma`: the direction orthogonal to the dominant gradient, in
/// `(-π/2, π/2]`, with coherence `(λ1 - λ2)/(λ1 + λ2)`.
pub fn streak_orientation(image: &Field2, sigma: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let g = gradient(image)?;
    let (w, h) = image.dims();
    let (gx, gy): (Vec<f64>, Vec<f64>) = g
        .magnitude()
        .iter()
        .zip(g.direction())
        .map(|(m, d)| (m * d.cos(), m * d.sin()))
        .unzip();
    let jxx = blur(&gx.iter().map(|x| x * x).collect::<Vec<_>>(), w, h, sigma);
    let jxy = blur(&gx.iter().zip(&gy).map(|(x, y)| x * y).collect::<Vec<_>>(), w, h, sigma);
    let jyy = blur(&gy.iter().map(|y| y * y).collect::<Vec<_>>(), w, h, sigma);
    let mut angle = Vec::with_capacity(w * h);
    let mut coherence = Vec::with_capacity(w * h);
    for i in 0..w * h {
        let (a, b, c) = (jxx[i], jxy[i], jyy[i]);
        let grad = 0.5 * (2.0 * b).atan2(a - c);
        angle.push(wrap_half(grad + std::f64::consts::FRAC_PI_2));
        let tr = a + c;
        let disc = ((a - c) * (a - c) + 4.0 * b * b).sqrt();
        coherence.push(if tr > 0.0 { disc / tr } else { 0.0 });
    }
    Ok((angle, coherence))
}

/// Folds an orientation into `(-π/2, π/2]`.
pub fn wrap_half(a: f64) -> f64 {
    use std::f64::consts::PI;
    let mut t = a.rem_euclid(PI);
    if t > PI / 2.0 {
        t -= PI;
    }
    t
}

/// Unsigned angle between two orientations, in `[0, π/2]`.
pub fn orientation_gap(a: f64, b: f64) -> f64 {
    wrap_half(a - b).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noise_is_reproducible() {
        assert_eq!(noise(7, 5, 3), noise(7, 5, 3));
        assert_ne!(noise(7, 5, 3), noise(7, 5, 4));
    }

    #[test]
    fn rejects_bad_shape() {
        let t = XformField::constant_rotation2(8, 8, 0.0);
        assert!(lic(&t, 1.0, 2.0, 0).is_err());
        assert!(lic(&t, 3.0, 0.0, 0).is_err());
    }

    #[test]
    fn orientation_helpers() {
        use std::f64::consts::PI;
        assert!((wrap_half(PI) - 0.0).abs() < 1e-15);
        assert!((orientation_gap(0.1, PI - 0.1) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn stripes_orientation() {
        let img = Field2::from_fn_real(32, 32, |_, y| (y as f64 * 0.8).sin());
        let (a, c) = streak_orientation(&img, 2.0).unwrap();
        let i = 16 * 32 + 16;
        assert!(a[i].abs() < 1e-6);
        assert!(c[i] > 0.99);
    }
}
