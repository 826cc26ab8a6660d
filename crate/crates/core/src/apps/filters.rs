//! Analytic filters and scale fields used by the applications.

use num_complex::Complex64;

use crate::error::{param, Result};
use crate::field::Field2;

/// Unnormalized isotropic Gaussian, value 1 at the origin.
pub fn gaussian(sigma: f64) -> impl Fn(f64, f64) -> Complex64 + Sync + Copy {
    move |x: f64, y: f64| Complex64::new((-(x * x + y * y) / (2.0 * sigma * sigma)).exp(), 0.0)
}

/// Gaussian elongated along x (`sx`) before any rotation.
pub fn anisotropic_gaussian(sx: f64, sy: f64) -> impl Fn(f64, f64) -> Complex64 + Sync + Copy {
    move |x: f64, y: f64| Complex64::new((-(x * x) / (2.0 * sx * sx) - (y * y) / (2.0 * sy * sy)).exp(), 0.0)
}

/// Disk of `radius` with a raised-cosine edge `soft` pixels wide.
pub fn smoothed_disk(radius: f64, soft: f64) -> impl Fn(f64, f64) -> Complex64 + Sync + Copy {
    move |x: f64, y: f64| {
        let r = x.hypot(y);
        let lo = radius - 0.5 * soft;
        let v = if r <= lo {
            1.0
        } else if r >= radius + 0.5 * soft {
            0.0
        } else {
            0.5 * (1.0 + (std::f64::consts::PI * (r - lo) / soft).cos())
        };
        Complex64::new(v, 0.0)
    }
}

/// Separable Gaussian blur of the real part with zero padding, truncated at
/// `3σ`.
pub fn gaussian_blur(field: &Field2, sigma: f64) -> Field2 {
    let (w, h) = field.dims();
    let v = field.real_values();
    Field2::from_real(w, h, blur(&v, w, h, sigma)).expect("dims preserved")
}

pub(crate) fn blur(v: &[f64], w: usize, h: usize, sigma: f64) -> Vec<f64> {
    if sigma <= 0.0 {
        return v.to_vec();
    }
    let r = (3.0 * sigma).ceil() as isize;
    let mut k: Vec<f64> = (-r..=r)
        .map(|d| (-((d * d) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let s: f64 = k.iter().sum();
    k.iter_mut().for_each(|x| *x /= s);
    let pass = |src: &[f64], len: usize, stride: usize, count: usize, step: usize| {
        let mut out = vec![0.0; src.len()];
        for line in 0..count {
            let base = line * step;
            for i in 0..len as isize {
                let mut acc = 0.0;
                for (j, kv) in k.iter().enumerate() {
                    let t = i + j as isize - r;
                    if t >= 0 && t < len as isize {
                        acc += kv * src[base + t as usize * stride];
                    }
                }
                out[base + i as usize * stride] = acc;
            }
        }
        out
    };
    let rows = pass(v, w, 1, h, w);
    pass(&rows, h, w, w, 1)
}

/// Two-valued scale field alternating over square tiles of `tile` pixels.
pub fn checkerboard_scales(width: usize, height: usize, tile: usize, a: f64, b: f64) -> Result<Vec<f64>> {
    if tile == 0 {
        return Err(param("tile", "must be positive"));
    }
    Ok((0..width * height)
        .map(|i| {
            let (x, y) = (i % width, i / width);
            if (x / tile + y / tile).is_multiple_of(2) {
                a
            } else {
                b
            }
        })
        .collect())
}

/// Blur scale per pixel from a depth map: `lo` at the focal depth, growing
/// by `strength` per unit depth away from it, clamped to `hi`.
pub fn defocus_scales(depth: &[f64], focus: f64, strength: f64, (lo, hi): (f64, f64)) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo) {
        return Err(param("scale range", format!("need 0 < lo <= hi, got [{lo}, {hi}]")));
    }
    if strength.is_nan() || strength < 0.0 {
        return Err(param("strength", format!("must be non-negative, got {strength}")));
    }
    Ok(depth
        .iter()
        .map(|d| (lo + strength * (d - focus).abs()).min(hi))
        .collect())
}
