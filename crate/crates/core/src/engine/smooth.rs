//! Normalized adaptive smoothing: a weighted average whose weights are the
//! transformed filter, `({H̃, 𝔗} ∗ F) / ({1̃, 𝔗} ∗ F)`.

use crate::decomp::{reconstruct, FreqFilter2};
use crate::error::{Error, Result};
use crate::field::Field2;
use crate::xform::Group;
use crate::XformField;

use super::{extended, Mode, Timings, XConvPlan};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SmoothOptions {
    /// Divide the signal by `s²` under scale fields so each source pixel
    /// contributes the same total weight regardless of its filter size.
    pub normalize_signal: bool,
    /// Divide by the transformed filter's local weight sum.
    pub divide: bool,
}

impl Default for SmoothOptions {
    fn default() -> Self {
        SmoothOptions {
            normalize_signal: true,
            divide: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Smoothed {
    pub output: Field2,
    /// Pixels whose denominator fell below `1e-9·max` and were set to zero.
    pub floored: usize,
    pub convolutions: usize,
    pub timings: Timings,
}

/// Integral (sum over the rendered grid) of the reconstructed filter.
pub fn filter_integral(filter: &FreqFilter2) -> f64 {
    reconstruct(filter, None).map(|f| f.sum().re).unwrap_or(0.0)
}

pub fn smooth_adaptive(h: &Field2, t: &XformField, filter: &FreqFilter2) -> Result<Smoothed> {
    smooth_adaptive_with(h, t, filter, SmoothOptions::default())
}

pub fn smooth_adaptive_with(h: &Field2, t: &XformField, filter: &FreqFilter2, opts: SmoothOptions) -> Result<Smoothed> {
    if !h.is_real() {
        return Err(Error::NotReal("smooth_adaptive"));
    }
    let rendered = reconstruct(filter, None)?;
    let mass: f64 = rendered.values().iter().map(|v| v.norm()).sum();
    if opts.divide && rendered.sum().re.abs() <= 1e-12 * mass.max(f64::MIN_POSITIVE) {
        return Err(Error::NormalizationUndefined);
    }
    let weight: Vec<f64> = match (opts.normalize_signal, t.scales()) {
        (true, Some(s)) => s.iter().map(|s| 1.0 / (s * s)).collect(),
        _ => vec![1.0; h.len()],
    };
    let (w, hh) = h.dims();
    let plan = XConvPlan::for_filter(Mode::Convolution, filter);
    let num_sig = Field2::from_real(w, hh, h.values().iter().zip(&weight).map(|(v, g)| v.re * g).collect())?;
    let num = extended(&num_sig, t, filter, &plan)?;
    let mut convolutions = num.convolutions;
    let mut timings = num.timings;
    if !opts.divide {
        return Ok(Smoothed {
            output: num.output.real_part(),
            floored: 0,
            convolutions,
            timings,
        });
    }
    let den = extended(&Field2::from_real(w, hh, weight)?, t, filter, &plan)?;
    convolutions += den.convolutions;
    timings.render += den.timings.render;
    timings.convolve += den.timings.convolve;
    timings.combine += den.timings.combine;
    let dmax = den.output.values().iter().map(|v| v.re.abs()).fold(0.0, f64::max);
    let floor = 1e-9 * dmax;
    let mut floored = 0;
    let out: Vec<f64> = num
        .output
        .values()
        .iter()
        .zip(den.output.values())
        .map(|(n, d)| {
            if d.re.abs() < floor || dmax == 0.0 {
                floored += 1;
                0.0
            } else {
                n.re / d.re
            }
        })
        .collect();
    debug_assert!(matches!(filter.group(), Group::Rotation2 | Group::Scale2));
    Ok(Smoothed {
        output: Field2::from_real(w, hh, out)?,
        floored,
        convolutions,
        timings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::{decompose_rotation2, decompose_scale2, Component2, ScaleWindow};
    use num_complex::Complex64;

    fn gaussian(sigma: f64) -> impl Fn(f64, f64) -> Complex64 {
        move |x: f64, y: f64| Complex64::new((-(x * x + y * y) / (2.0 * sigma * sigma)).exp(), 0.0)
    }

    #[test]
    fn constant_image_is_a_fixed_point() {
        let f = decompose_scale2(&gaussian(1.5), 16, 32, 16, ScaleWindow::for_support(4.0)).unwrap();
        let scales: Vec<f64> = (0..20 * 16).map(|i| 0.5 + 1.5 * ((i * 7) % 13) as f64 / 12.0).collect();
        let t = XformField::scale2(20, 16, scales).unwrap();
        let h = Field2::from_fn_real(20, 16, |_, _| 3.25);
        let out = smooth_adaptive(&h, &t, &f).unwrap();
        assert_eq!(out.floored, 0);
        for v in out.output.values() {
            assert!((v.re - 3.25).abs() < 1e-6);
        }
    }

    #[test]
    fn zero_integral_rejected() {
        let profile = vec![Complex64::new(1.0, 0.0); 4];
        let f = FreqFilter2::from_radial_profiles(16, 4.0, vec![Component2 { k: 1, profile }]).unwrap();
        let h = Field2::from_fn_real(6, 6, |_, _| 1.0);
        let t = XformField::constant_rotation2(6, 6, 0.0);
        assert_eq!(smooth_adaptive(&h, &t, &f), Err(Error::NormalizationUndefined));
    }

    #[test]
    fn complex_signal_rejected() {
        let f = decompose_rotation2(&gaussian(1.0), 2, 4, 8, 3.0).unwrap();
        let h = Field2::from_fn(4, 4, |_, _| Complex64::new(0.0, 1.0));
        let t = XformField::constant_rotation2(4, 4, 0.0);
        assert_eq!(smooth_adaptive(&h, &t, &f), Err(Error::NotReal("smooth_adaptive")));
    }
}
