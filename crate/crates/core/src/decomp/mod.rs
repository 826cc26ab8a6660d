//! Frequency decompositions of filters.
//!
//! A rotation2 filter is split into angular harmonics `F_k(r, θ) = f_k(r)·e^{ikθ}`
//! and a scale2 filter into log-radial harmonics `F_k(r, θ) = e^{ikωu}·f_k(θ)`
//! with `u = ln(r / r_lo)` and `ω = 2π / ln(r_max / r_lo)`. Rotating by Θ
//! multiplies `F_k` by `e^{-ikΘ}`; scaling by `s` multiplies it by
//! `e^{-ikω ln s}`.
//!
//! A band limit `K` keeps the `2⌊K/2⌋ + 1` frequencies `|k| ≤ ⌊K/2⌋`. When
//! that reaches the Nyquist frequency of the sampling, its coefficient is
//! split evenly between `+n/2` and `-n/2` so every retained harmonic is
//! steered by its own phase.

mod sphere;

pub use sphere::{decompose_rotation3, reconstruct3, reconstruct3_fine, SphComponent, SphFilter3};

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{param, Result};
use crate::fft::Kernel2;
use crate::field::{Field2, FilterSource2};
use crate::polar::{check_polar_params, resample_polar, ring_radius};
use crate::xform::Group;

/// One harmonic: radial profile (rotation2) or angular profile (scale2).
#[derive(Clone, Debug, PartialEq)]
pub struct Component2 {
    pub k: i32,
    pub profile: Vec<Complex64>,
}

/// Log-polar sampling window for scale decompositions.
///
/// Samples cover `[r_lo, r_max]` with `r_lo = r_min·e^{-taper}`. Between
/// `r_lo` and `r_min` the profile rises smoothly from zero to the filter's
/// value at `r_min`, so the log-periodic extension has no jump. `support` is
/// the filter's own radius; the admissible scales follow from it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaleWindow {
    pub r_min: f64,
    pub r_max: f64,
    pub support: f64,
    pub taper: f64,
}

impl ScaleWindow {
    /// `r_min = 0.5`, one octave of taper and `r_max` wide enough for scales
    /// in `[0.5, 2]`.
    pub fn for_support(support: f64) -> Self {
        ScaleWindow {
            r_min: 0.5,
            r_max: 4.0 * support,
            support,
            taper: 2f64.ln(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_min.is_finite() && self.r_min > 0.0) {
            return Err(param("r_min", format!("{} must be positive", self.r_min)));
        }
        if !(self.r_max.is_finite() && self.r_max > self.r_min) {
            return Err(param("r_max", format!("{} must exceed r_min", self.r_max)));
        }
        if !(self.taper.is_finite() && self.taper >= 0.0) {
            return Err(param("taper", format!("{} must be non-negative", self.taper)));
        }
        if !(self.support.is_finite() && self.support > 0.0) {
            return Err(param("support", format!("{} must be positive", self.support)));
        }
        if self.support / self.r_min > self.r_max {
            return Err(param(
                "r_max",
                format!(
                    "{} must be at least support/r_min = {}",
                    self.r_max,
                    self.support / self.r_min
                ),
            ));
        }
        Ok(())
    }

    pub fn r_lo(&self) -> f64 {
        self.r_min * (-self.taper).exp()
    }

    /// Length of the sampled log-radius interval.
    pub fn log_period(&self) -> f64 {
        (self.r_max / self.r_lo()).ln()
    }

    pub fn omega(&self) -> f64 {
        2.0 * PI / self.log_period()
    }

    /// Scale factors that neither push a pixel below `r_min` nor pull the
    /// rendered support past `r_max`.
    pub fn guard_band(&self) -> (f64, f64) {
        let hi = 1.0 / self.r_min;
        (self.support * hi / self.r_max, hi)
    }

    /// Radius of the rendered components: the support at the largest scale.
    pub fn render_radius(&self) -> usize {
        (self.support / self.r_min).ceil() as usize
    }

    pub fn radius(&self, j: usize, n_radii: usize) -> f64 {
        self.r_lo() * (self.r_max / self.r_lo()).powf((j as f64 + 0.5) / n_radii as f64)
    }
}

/// Smooth step, 0 for `t ≤ 0`, 1 for `t ≥ 1`, infinitely differentiable.
fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        a / (a + b)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Geometry {
    Polar { r_max: f64 },
    LogPolar { window: ScaleWindow, center: Complex64 },
}

/// A filter decomposed into 2D group harmonics.
#[derive(Clone, Debug, PartialEq)]
pub struct FreqFilter2 {
    band: usize,
    n_radii: usize,
    n_angles: usize,
    geometry: Geometry,
    components: Vec<Component2>,
}

/// Retained frequencies for band limit `band`: `-⌊K/2⌋..=⌊K/2⌋`.
pub fn retained_frequencies(band: usize) -> Vec<i32> {
    let h = (band / 2) as i32;
    (-h..=h).collect()
}

/// Per-frequency DFT of `samples` taken at phases `phi`, halving the two
/// Nyquist coefficients.
fn band_dft(samples: &[Complex64], phi: &[f64], ks: &[i32]) -> Vec<Complex64> {
    let n = samples.len();
    ks.iter()
        .map(|&k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (s, p) in samples.iter().zip(phi) {
                acc += s * Complex64::from_polar(1.0, -(k as f64) * p);
            }
            acc /= n as f64;
            if n.is_multiple_of(2) && k.unsigned_abs() as usize == n / 2 {
                acc * 0.5
            } else {
                acc
            }
        })
        .collect()
}

fn check_band(band: usize, n: usize, what: &'static str) -> Result<()> {
    if band / 2 > n / 2 {
        return Err(param(
            "K",
            format!("band limit {band} needs at least {} {what}", 2 * (band / 2)),
        ));
    }
    Ok(())
}

/// Angular-harmonic decomposition about the source's origin.
pub fn decompose_rotation2<S: FilterSource2 + ?Sized>(
    filter: &S,
    band: usize,
    n_radii: usize,
    n_angles: usize,
    r_max: f64,
) -> Result<FreqFilter2> {
    check_polar_params(n_radii, n_angles, r_max)?;
    check_band(band, n_angles, "angles")?;
    let grid = resample_polar(filter, n_radii, n_angles, r_max)?;
    let ks = retained_frequencies(band);
    let phi: Vec<f64> = (0..n_angles).map(|m| grid.angle(m)).collect();
    let mut components: Vec<Component2> = ks
        .iter()
        .map(|&k| Component2 {
            k,
            profile: Vec::with_capacity(n_radii),
        })
        .collect();
    for j in 0..n_radii {
        for (c, v) in components.iter_mut().zip(band_dft(grid.ring(j), &phi, &ks)) {
            c.profile.push(v);
        }
    }
    Ok(FreqFilter2 {
        band,
        n_radii,
        n_angles,
        geometry: Geometry::Polar { r_max },
        components,
    })
}

/// Samples on the log-polar grid of `window`, radius-major, taper applied.
pub fn log_polar_samples<S: FilterSource2 + ?Sized>(
    filter: &S,
    n_radii: usize,
    n_angles: usize,
    window: &ScaleWindow,
) -> Result<Vec<Complex64>> {
    check_polar_params(n_radii, n_angles, window.r_max)?;
    window.validate()?;
    let trig: Vec<(f64, f64)> = (0..n_angles)
        .map(|m| (2.0 * PI * m as f64 / n_angles as f64).sin_cos())
        .collect();
    let mut out = Vec::with_capacity(n_radii * n_angles);
    for j in 0..n_radii {
        let r = window.radius(j, n_radii);
        for &(s, c) in &trig {
            out.push(if r >= window.r_min {
                filter.sample(r * c, r * s)
            } else {
                let t = (r / window.r_lo()).ln() / window.taper;
                filter.sample(window.r_min * c, window.r_min * s) * smooth_step(t)
            });
        }
    }
    Ok(out)
}

/// Log-radial harmonic decomposition about the source's origin.
pub fn decompose_scale2<S: FilterSource2 + ?Sized>(
    filter: &S,
    band: usize,
    n_radii: usize,
    n_angles: usize,
    window: ScaleWindow,
) -> Result<FreqFilter2> {
    check_band(band, n_radii, "radii")?;
    let samples = log_polar_samples(filter, n_radii, n_angles, &window)?;
    let ks = retained_frequencies(band);
    let phi: Vec<f64> = (0..n_radii)
        .map(|j| 2.0 * PI * (j as f64 + 0.5) / n_radii as f64)
        .collect();
    let mut components: Vec<Component2> = ks
        .iter()
        .map(|&k| Component2 {
            k,
            profile: Vec::with_capacity(n_angles),
        })
        .collect();
    let mut column = vec![Complex64::new(0.0, 0.0); n_radii];
    for m in 0..n_angles {
        for (j, c) in column.iter_mut().enumerate() {
            *c = samples[j * n_angles + m];
        }
        for (c, v) in components.iter_mut().zip(band_dft(&column, &phi, &ks)) {
            c.profile.push(v);
        }
    }
    let center = (0..n_angles)
        .map(|m| {
            let (s, c) = (2.0 * PI * m as f64 / n_angles as f64).sin_cos();
            filter.sample(window.r_min * c, window.r_min * s)
        })
        .sum::<Complex64>()
        / n_angles as f64;
    Ok(FreqFilter2 {
        band,
        n_radii,
        n_angles,
        geometry: Geometry::LogPolar { window, center },
        components,
    })
}

impl FreqFilter2 {
    /// Rotation2 filter from explicit radial profiles on `n_radii` rings.
    pub fn from_radial_profiles(n_angles: usize, r_max: f64, components: Vec<Component2>) -> Result<Self> {
        let n_radii = components.first().map_or(1, |c| c.profile.len());
        check_polar_params(n_radii, n_angles, r_max)?;
        let band = check_components(&components, n_radii, n_angles / 2)?;
        Ok(FreqFilter2 {
            band,
            n_radii,
            n_angles,
            geometry: Geometry::Polar { r_max },
            components,
        })
    }

    /// Scale2 filter from explicit angular profiles on `n_angles` rays.
    /// `center` is the k = 0 value inside `r_lo`.
    pub fn from_log_polar_profiles(
        n_radii: usize,
        window: ScaleWindow,
        center: Complex64,
        components: Vec<Component2>,
    ) -> Result<Self> {
        let n_angles = components.first().map_or(1, |c| c.profile.len());
        check_polar_params(n_radii, n_angles, window.r_max)?;
        window.validate()?;
        let band = check_components(&components, n_angles, n_radii / 2)?;
        Ok(FreqFilter2 {
            band,
            n_radii,
            n_angles,
            geometry: Geometry::LogPolar { window, center },
            components,
        })
    }

    pub fn group(&self) -> Group {
        match self.geometry {
            Geometry::Polar { .. } => Group::Rotation2,
            Geometry::LogPolar { .. } => Group::Scale2,
        }
    }

    /// Band limit `K` this filter was decomposed with.
    pub fn band(&self) -> usize {
        self.band
    }

    pub fn n_radii(&self) -> usize {
        self.n_radii
    }

    pub fn n_angles(&self) -> usize {
        self.n_angles
    }

    /// Outer sampling radius.
    pub fn r_max(&self) -> f64 {
        match &self.geometry {
            Geometry::Polar { r_max } => *r_max,
            Geometry::LogPolar { window, .. } => window.r_max,
        }
    }

    pub fn scale_window(&self) -> Option<&ScaleWindow> {
        match &self.geometry {
            Geometry::LogPolar { window, .. } => Some(window),
            Geometry::Polar { .. } => None,
        }
    }

    /// Value of the k = 0 component at the origin of a scale2 filter.
    pub fn center_value(&self) -> Option<Complex64> {
        match &self.geometry {
            Geometry::LogPolar { center, .. } => Some(*center),
            Geometry::Polar { .. } => None,
        }
    }

    pub fn components(&self) -> &[Component2] {
        &self.components
    }

    pub fn component(&self, k: i32) -> Option<&Component2> {
        self.components.iter().find(|c| c.k == k)
    }

    pub fn frequencies(&self) -> Vec<i32> {
        self.components.iter().map(|c| c.k).collect()
    }

    /// Half-size of rendered component kernels.
    pub fn render_radius(&self) -> usize {
        match &self.geometry {
            Geometry::Polar { r_max } => r_max.ceil() as usize,
            Geometry::LogPolar { window, .. } => window.render_radius(),
        }
    }

    /// Copy restricted to the listed frequencies.
    pub fn truncated(&self, keep: &[i32]) -> Result<FreqFilter2> {
        for k in keep {
            if self.component(*k).is_none() {
                return Err(param("truncate_to", format!("frequency {k} is not stored")));
            }
        }
        let mut out = self.clone();
        out.components.retain(|c| keep.contains(&c.k));
        Ok(out)
    }

    /// Area weight of sample radius `j`: `r` on the polar grid, `r²` on the
    /// log-polar one (where `dr = r·du`).
    fn area_weight(&self, j: usize) -> f64 {
        match &self.geometry {
            Geometry::Polar { r_max } => (j as f64 + 0.5) * r_max / self.n_radii as f64,
            Geometry::LogPolar { window, .. } => window.radius(j, self.n_radii).powi(2),
        }
    }

    /// L2 energy of a component over the plane, up to a common factor.
    pub fn energy(&self, c: &Component2) -> f64 {
        c.profile
            .iter()
            .enumerate()
            .map(|(j, z)| self.area_weight(j) * z.norm_sqr())
            .sum()
    }

    /// Frequencies ordered by decreasing [`energy`](Self::energy), ties
    /// broken by ascending `|k|` then `k`.
    pub fn by_energy(&self) -> Vec<i32> {
        let mut v: Vec<(f64, i32)> = self.components.iter().map(|c| (self.energy(c), c.k)).collect();
        v.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.abs().cmp(&b.1.abs())).then(a.1.cmp(&b.1)));
        v.into_iter().map(|(_, k)| k).collect()
    }

    /// Sum of the retained harmonics on the sampling grid (ring-major for
    /// rotation2, radius-major log-polar for scale2).
    pub fn synthesize_samples(&self) -> Vec<Complex64> {
        let (nr, na) = (self.n_radii, self.n_angles);
        let mut out = vec![Complex64::new(0.0, 0.0); nr * na];
        for c in &self.components {
            for j in 0..nr {
                for m in 0..na {
                    let v = match self.geometry {
                        Geometry::Polar { .. } => c.profile[j] * phase(c.k, 2.0 * PI * m as f64 / na as f64),
                        Geometry::LogPolar { .. } => c.profile[m] * phase(c.k, 2.0 * PI * (j as f64 + 0.5) / nr as f64),
                    };
                    out[j * na + m] += v;
                }
            }
        }
        out
    }

    /// Evaluates component `c` at offset `(dx, dy)` from the filter origin.
    ///
    /// Radial profiles are interpolated linearly between rings. Inside the
    /// first ring only k = 0 survives at the origin; other harmonics fade
    /// linearly to zero there so the rendered filter stays continuous.
    pub fn eval_component(&self, c: &Component2, dx: f64, dy: f64) -> Complex64 {
        let r = dx.hypot(dy);
        let theta = dy.atan2(dx);
        match &self.geometry {
            Geometry::Polar { r_max } => {
                if r > *r_max {
                    return Complex64::new(0.0, 0.0);
                }
                let r0 = ring_radius(0, self.n_radii, *r_max);
                let radial = if r < r0 {
                    if c.k == 0 {
                        c.profile[0]
                    } else {
                        c.profile[0] * (r / r0)
                    }
                } else {
                    lerp_profile(&c.profile, r / (r_max / self.n_radii as f64) - 0.5)
                };
                if c.k == 0 {
                    radial
                } else {
                    radial * phase(c.k, theta)
                }
            }
            Geometry::LogPolar { window, center } => {
                // Beyond the render disk a scaled lookup could run past
                // r_max and wrap around the log period.
                if r > window.support / window.r_min {
                    return Complex64::new(0.0, 0.0);
                }
                if r < window.r_lo() {
                    return if c.k == 0 { *center } else { Complex64::new(0.0, 0.0) };
                }
                let u = (r / window.r_lo()).ln();
                let t = theta.rem_euclid(2.0 * PI) / (2.0 * PI) * self.n_angles as f64;
                let m0 = (t.floor() as usize) % self.n_angles;
                let m1 = (m0 + 1) % self.n_angles;
                let f = t - t.floor();
                let ang = c.profile[m0] * (1.0 - f) + c.profile[m1] * f;
                ang * phase(c.k, window.omega() * u)
            }
        }
    }

    /// Renders one component on a `(2R+1)²` kernel grid, `R = render_radius()`.
    pub fn render_component(&self, c: &Component2) -> Kernel2 {
        Kernel2::from_offsets(self.render_radius(), |dx, dy| {
            self.eval_component(c, dx as f64, dy as f64)
        })
    }
}

fn phase(k: i32, a: f64) -> Complex64 {
    Complex64::from_polar(1.0, k as f64 * a)
}

fn lerp_profile(p: &[Complex64], t: f64) -> Complex64 {
    let t = t.clamp(0.0, (p.len() - 1) as f64);
    let j0 = t.floor() as usize;
    let j1 = (j0 + 1).min(p.len() - 1);
    let f = t - j0 as f64;
    p[j0] * (1.0 - f) + p[j1] * f
}

fn check_components(c: &[Component2], len: usize, kmax: usize) -> Result<usize> {
    if c.is_empty() {
        return Err(param("components", "at least one component is required"));
    }
    let mut band = 0;
    for (i, comp) in c.iter().enumerate() {
        if comp.profile.len() != len {
            return Err(param("components", "profiles must share one length"));
        }
        if comp.k.unsigned_abs() as usize > kmax {
            return Err(param("components", format!("frequency {} exceeds {kmax}", comp.k)));
        }
        if c[..i].iter().any(|o| o.k == comp.k) {
            return Err(param("components", format!("frequency {} repeated", comp.k)));
        }
        band = band.max(2 * comp.k.unsigned_abs() as usize);
    }
    Ok(band)
}

/// Renders the sum of the selected components (all when `truncate_to` is
/// `None`) on a centered `(2R+1)²` grid.
pub fn reconstruct(filter: &FreqFilter2, truncate_to: Option<&[i32]>) -> Result<Field2> {
    reconstruct_fine(filter, truncate_to, 1)
}

/// As [`reconstruct`] but with `factor` samples per pixel, for lookups that
/// must interpolate the filter between pixel positions.
pub fn reconstruct_fine(filter: &FreqFilter2, truncate_to: Option<&[i32]>, factor: usize) -> Result<Field2> {
    if factor == 0 {
        return Err(param("factor", "must be at least 1"));
    }
    let f = match truncate_to {
        Some(keep) => filter.truncated(keep)?,
        None => filter.clone(),
    };
    let r = (f.render_radius() * factor) as isize;
    let n = (2 * r + 1) as usize;
    let pitch = 1.0 / factor as f64;
    let out = Field2::from_fn(n, n, |x, y| {
        let (dx, dy) = ((x as isize - r) as f64 * pitch, (y as isize - r) as f64 * pitch);
        f.components.iter().map(|c| f.eval_component(c, dx, dy)).sum()
    });
    Ok(out.retag())
}
