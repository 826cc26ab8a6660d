//! Extended correlation and convolution.
//!
//! Correlation gathers: the filter is transformed by the field value at the
//! output pixel `p`, `out(p) = Σ_q H(q)·conj((𝔗(p)F)(q - p))`. Convolution
//! scatters: it is transformed at the source pixel `q`,
//! `out(p) = Σ_q H(q)·(𝔗(q)F)(p - q)`.
//!
//! The fast paths run one FFT convolution per retained harmonic and combine
//! the results with per-pixel phases (2D) or Wigner-D weights (3D).

mod brute;
mod smooth;
mod three;

pub use brute::{
    xconv_brute, xconv_brute3, xconv_spectral, xconv_spectral3, xcorr_brute, xcorr_brute3, xcorr_spectral,
    xcorr_spectral3,
};
pub use smooth::{filter_integral, smooth_adaptive, smooth_adaptive_with, SmoothOptions, Smoothed};
pub use three::{extended3, xconv_fast3, xcorr_fast3};

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::decomp::FreqFilter2;
use crate::decomp::SphFilter3;
use crate::error::{param, Error, Result};
use crate::fft::{Boundary, ConvPlan2};
use crate::field::Field2;
use crate::xform::{Group, XformField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Correlation,
    Convolution,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Correlation => "correlation",
            Mode::Convolution => "convolution",
        }
    }
}

/// One standard convolution of a plan.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ComponentId {
    /// Harmonic `k` of a 2D filter.
    Freq(i32),
    /// `f_l^{m'}·Y_l^m` of a 3D filter.
    Sph { l: usize, m: i32, mp: i32 },
}

/// What a run will compute: mode, group, retained components, boundary.
#[derive(Clone, Debug, PartialEq)]
pub struct XConvPlan {
    pub mode: Mode,
    pub group: Group,
    pub retained: Vec<ComponentId>,
    pub boundary: Boundary,
}

impl XConvPlan {
    /// Every stored harmonic of `filter`, zero boundary.
    pub fn for_filter(mode: Mode, filter: &FreqFilter2) -> Self {
        XConvPlan {
            mode,
            group: filter.group(),
            retained: filter.frequencies().into_iter().map(ComponentId::Freq).collect(),
            boundary: Boundary::Zero,
        }
    }

    /// Every `(l, m, m')` triple of `filter`, zero boundary.
    pub fn for_sph(mode: Mode, filter: &SphFilter3) -> Self {
        let mut retained = Vec::new();
        for l in 0..=filter.band() {
            let li = l as i32;
            for m in -li..=li {
                for mp in -li..=li {
                    retained.push(ComponentId::Sph { l, m, mp });
                }
            }
        }
        XConvPlan {
            mode,
            group: Group::Rotation3,
            retained,
            boundary: Boundary::Zero,
        }
    }

    /// Keeps only the listed 2D frequencies.
    pub fn retain_frequencies(mut self, keep: &[i32]) -> Self {
        self.retained
            .retain(|c| matches!(c, ComponentId::Freq(k) if keep.contains(k)));
        self
    }

    /// Keeps only degrees `≤ lmax` of a 3D plan.
    pub fn retain_degrees(mut self, lmax: usize) -> Self {
        self.retained
            .retain(|c| matches!(c, ComponentId::Sph { l, .. } if *l <= lmax));
        self
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    /// Standard convolutions the plan performs.
    pub fn convolution_count(&self) -> usize {
        self.retained.len()
    }
}

/// Accumulated per-stage times; component stages are summed over components.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Timings {
    pub render: Duration,
    pub convolve: Duration,
    pub combine: Duration,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Response<O> {
    pub output: O,
    pub plan: XConvPlan,
    /// Standard FFT convolutions actually executed.
    pub convolutions: usize,
    pub timings: Timings,
}

/// Sum of `f(0) + f(1) + …` in index order, evaluated in parallel batches so
/// the floating-point result does not depend on the thread count.
pub(crate) fn ordered_sum<F>(n: usize, len: usize, f: F) -> Vec<Complex64>
where
    F: Fn(usize) -> Vec<Complex64> + Sync,
{
    let mut acc = vec![Complex64::new(0.0, 0.0); len];
    let batch = rayon::current_num_threads().max(1) * 2;
    let mut start = 0;
    while start < n {
        let end = (start + batch).min(n);
        let parts: Vec<Vec<Complex64>> = (start..end).into_par_iter().map(&f).collect();
        for part in parts {
            for (a, v) in acc.iter_mut().zip(part) {
                *a += v;
            }
        }
        start = end;
    }
    acc
}

#[derive(Default)]
pub(crate) struct Clock {
    render: AtomicUsize,
    convolve: AtomicUsize,
    pub(crate) count: AtomicUsize,
}

impl Clock {
    pub(crate) fn render<T>(&self, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.render
            .fetch_add(t.elapsed().as_nanos() as usize, Ordering::Relaxed);
        out
    }

    pub(crate) fn convolve<T>(&self, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.convolve
            .fetch_add(t.elapsed().as_nanos() as usize, Ordering::Relaxed);
        self.count.fetch_add(1, Ordering::Relaxed);
        out
    }

    pub(crate) fn finish(&self, combine: Duration) -> (usize, Timings) {
        (
            self.count.load(Ordering::Relaxed),
            Timings {
                render: Duration::from_nanos(self.render.load(Ordering::Relaxed) as u64),
                convolve: Duration::from_nanos(self.convolve.load(Ordering::Relaxed) as u64),
                combine,
            },
        )
    }
}

pub(crate) fn check_dims2(h: &Field2, t: &XformField) -> Result<()> {
    let (w, hh) = h.dims();
    if t.dims() != [w, hh, 1] {
        return Err(Error::DimensionMismatch(format!(
            "signal is {w}x{hh} but transformation field is {:?}",
            t.dims()
        )));
    }
    Ok(())
}

/// Per-pixel steering angle: Θ for rotations, `ω·ln s` for scales.
fn steering_angles(t: &XformField, filter: &FreqFilter2) -> Result<Vec<f64>> {
    match filter.group() {
        Group::Rotation2 => {
            t.expect_group(Group::Rotation2)?;
            Ok(t.angles().expect("rotation field").to_vec())
        }
        Group::Scale2 => {
            t.expect_group(Group::Scale2)?;
            let window = filter.scale_window().expect("scale filter");
            let (lo, hi) = window.guard_band();
            let (w, _) = t.dims2();
            let slack = 1e-12;
            for (i, &s) in t.scales().expect("scale field").iter().enumerate() {
                if s < lo * (1.0 - slack) || s > hi * (1.0 + slack) {
                    return Err(Error::ScaleOutOfBand {
                        x: i % w,
                        y: i / w,
                        scale: s,
                        lo,
                        hi,
                    });
                }
            }
            let om = window.omega();
            Ok(t.log_scales().expect("scale field").iter().map(|l| om * l).collect())
        }
        Group::Rotation3 => unreachable!("2D filters are never rotation3"),
    }
}

/// Runs `plan` on a 2D signal. The filter's group selects rotation or scale
/// steering; the field must match it.
pub fn extended(h: &Field2, t: &XformField, filter: &FreqFilter2, plan: &XConvPlan) -> Result<Response<Field2>> {
    check_dims2(h, t)?;
    if plan.group != filter.group() {
        return Err(Error::GroupMismatch {
            expected: filter.group().name(),
            found: plan.group.name(),
        });
    }
    let angles = steering_angles(t, filter)?;
    let mut comps = Vec::with_capacity(plan.retained.len());
    for id in &plan.retained {
        match id {
            ComponentId::Freq(k) => comps.push(
                filter
                    .component(*k)
                    .ok_or_else(|| param("plan", format!("frequency {k} is not in the filter")))?,
            ),
            ComponentId::Sph { .. } => {
                return Err(param("plan", "3D component in a 2D plan"));
            }
        }
    }
    let (w, hh) = h.dims();
    let conv = ConvPlan2::new(w, hh, filter.render_radius(), plan.boundary);
    let clock = Clock::default();
    let signal_spec = match plan.mode {
        Mode::Correlation => Some(clock.render(|| conv.signal_spectrum(h))),
        Mode::Convolution => None,
    };
    let hv = h.values();
    let out = ordered_sum(comps.len(), w * hh, |i| {
        let c = comps[i];
        let kf = c.k as f64;
        let kernel = clock.render(|| filter.render_component(c));
        match plan.mode {
            Mode::Correlation => {
                let g = clock.convolve(|| {
                    conv.convolve_spectra(
                        signal_spec.as_ref().expect("spectrum"),
                        &conv.kernel_spectrum(&kernel.adjoint()),
                    )
                });
                g.into_values()
                    .into_iter()
                    .zip(&angles)
                    .map(|(v, a)| v * Complex64::from_polar(1.0, kf * a))
                    .collect()
            }
            Mode::Convolution => {
                let steered: Vec<Complex64> = hv
                    .iter()
                    .zip(&angles)
                    .map(|(v, a)| v * Complex64::from_polar(1.0, -kf * a))
                    .collect();
                let sig = Field2::from_complex(w, hh, steered).expect("dims");
                clock.convolve(|| conv.convolve(&sig, &kernel)).into_values()
            }
        }
    });
    let t0 = Instant::now();
    let output = Field2::from_complex(w, hh, out)?;
    let (convolutions, timings) = clock.finish(t0.elapsed());
    Ok(Response {
        output,
        plan: plan.clone(),
        convolutions,
        timings,
    })
}

/// Extended correlation with every stored harmonic.
pub fn xcorr_fast(h: &Field2, t: &XformField, filter: &FreqFilter2) -> Result<Response<Field2>> {
    extended(h, t, filter, &XConvPlan::for_filter(Mode::Correlation, filter))
}

/// Extended convolution with every stored harmonic.
pub fn xconv_fast(h: &Field2, t: &XformField, filter: &FreqFilter2) -> Result<Response<Field2>> {
    extended(h, t, filter, &XConvPlan::for_filter(Mode::Convolution, filter))
}
