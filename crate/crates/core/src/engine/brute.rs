//! Direct evaluation of the extended operators, used as oracles.
//!
//! The `*_brute` functions warp a Cartesian filter by interpolation
//! (bilinear in 2D, trilinear in 3D). The `*_spectral` functions steer the
//! decomposed filter exactly, evaluating the same harmonics the fast path
//! uses but summing directly instead of through FFTs.

use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::decomp::{FreqFilter2, SphFilter3};
use crate::error::{Error, Result};
use crate::fft::Boundary;
use crate::field::{Field2, Field3, FilterSource2, FilterSource3};
use crate::quat::Quaternion;
use crate::sh::wigner_d_unit;
use crate::xform::{Group, XformField};

use super::{check_dims2, ComponentId, Mode, Response, Timings, XConvPlan};

fn brute_plan(mode: Mode, group: Group) -> XConvPlan {
    XConvPlan {
        mode,
        group,
        retained: Vec::new(),
        boundary: Boundary::Zero,
    }
}

fn done<O>(output: O, plan: XConvPlan, start: Instant) -> Response<O> {
    Response {
        output,
        plan,
        convolutions: 0,
        timings: Timings {
            combine: start.elapsed(),
            ..Timings::default()
        },
    }
}

/// Filter value at offset `v` after transforming the filter by cell `i`.
enum Warp2<'a> {
    Rotation(&'a [f64]),
    Scale(&'a [f64]),
}

impl Warp2<'_> {
    fn new(t: &XformField) -> Result<Warp2<'_>> {
        match t.group() {
            Group::Rotation2 => Ok(Warp2::Rotation(t.angles().expect("angles"))),
            Group::Scale2 => Ok(Warp2::Scale(t.scales().expect("scales"))),
            Group::Rotation3 => Err(Error::GroupMismatch {
                expected: "rotation2 or scale2",
                found: "rotation3",
            }),
        }
    }

    fn group(&self) -> Group {
        match self {
            Warp2::Rotation(_) => Group::Rotation2,
            Warp2::Scale(_) => Group::Scale2,
        }
    }

    /// `(𝔗_i F)(v)`.
    fn sample<S: FilterSource2 + ?Sized>(&self, i: usize, f: &S, vx: f64, vy: f64) -> Complex64 {
        let (x, y) = match self {
            // F(R_{-Θ} v)
            Warp2::Rotation(a) => {
                let (s, c) = a[i].sin_cos();
                (c * vx + s * vy, -s * vx + c * vy)
            }
            // F(v / s)
            Warp2::Scale(s) => (vx / s[i], vy / s[i]),
        };
        f.sample(x, y)
    }

    /// Radius beyond which the transformed filter is zero.
    fn reach(&self, i: usize, base: f64) -> isize {
        let r = match self {
            Warp2::Rotation(_) => base,
            Warp2::Scale(s) => base * s[i],
        };
        r.ceil() as isize + 1
    }
}

/// `out(p) = Σ_q H(q)·conj((𝔗(p)F)(q - p))` by direct summation. The
/// untransformed filter must vanish beyond `support`; a
/// [`crate::field::CenteredField`] source gives the bilinear warp.
pub fn xcorr_brute<S: FilterSource2 + Sync + ?Sized>(
    h: &Field2,
    t: &XformField,
    filter: &S,
    support: f64,
) -> Result<Response<Field2>> {
    check_dims2(h, t)?;
    let start = Instant::now();
    let warp = Warp2::new(t)?;
    let (w, hh) = h.dims();
    let base = support;
    let out: Vec<Complex64> = (0..w * hh)
        .into_par_iter()
        .map(|i| {
            let (px, py) = ((i % w) as isize, (i / w) as isize);
            let r = warp.reach(i, base);
            let mut acc = Complex64::new(0.0, 0.0);
            for qy in (py - r).max(0)..(py + r + 1).min(hh as isize) {
                for qx in (px - r).max(0)..(px + r + 1).min(w as isize) {
                    let v = h.get(qx as usize, qy as usize);
                    if v == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    let fv = warp.sample(i, filter, (qx - px) as f64, (qy - py) as f64);
                    acc += v * fv.conj();
                }
            }
            acc
        })
        .collect();
    let output = Field2::from_complex(w, hh, out)?;
    Ok(done(output, brute_plan(Mode::Correlation, warp.group()), start))
}

/// `out(p) = Σ_q H(q)·(𝔗(q)F)(p - q)` by direct scattering.
pub fn xconv_brute<S: FilterSource2 + Sync + ?Sized>(
    h: &Field2,
    t: &XformField,
    filter: &S,
    support: f64,
) -> Result<Response<Field2>> {
    check_dims2(h, t)?;
    let start = Instant::now();
    let warp = Warp2::new(t)?;
    let (w, hh) = h.dims();
    let base = support;
    // Gather form of the scatter so pixels can be computed independently.
    let out: Vec<Complex64> = (0..w * hh)
        .into_par_iter()
        .map(|i| {
            let (px, py) = ((i % w) as isize, (i / w) as isize);
            let mut acc = Complex64::new(0.0, 0.0);
            for qy in 0..hh as isize {
                for qx in 0..w as isize {
                    let j = qy as usize * w + qx as usize;
                    let r = warp.reach(j, base);
                    if (px - qx).abs() > r || (py - qy).abs() > r {
                        continue;
                    }
                    let v = h.values()[j];
                    if v == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    acc += v * warp.sample(j, filter, (px - qx) as f64, (py - qy) as f64);
                }
            }
            acc
        })
        .collect();
    let output = Field2::from_complex(w, hh, out)?;
    Ok(done(output, brute_plan(Mode::Convolution, warp.group()), start))
}

/// Per-pixel steering angle for a decomposed filter; mirrors the fast path.
fn spectral_angles(t: &XformField, filter: &FreqFilter2) -> Result<Vec<f64>> {
    t.expect_group(filter.group())?;
    Ok(match filter.group() {
        Group::Scale2 => {
            let om = filter.scale_window().expect("scale filter").omega();
            t.log_scales().expect("scales").iter().map(|l| om * l).collect()
        }
        _ => t.angles().expect("angles").to_vec(),
    })
}

fn spectral2(h: &Field2, t: &XformField, filter: &FreqFilter2, mode: Mode) -> Result<Response<Field2>> {
    check_dims2(h, t)?;
    let start = Instant::now();
    let angles = spectral_angles(t, filter)?;
    let kernels: Vec<(f64, crate::fft::Kernel2)> = filter
        .components()
        .iter()
        .map(|c| (c.k as f64, filter.render_component(c)))
        .collect();
    let r = filter.render_radius() as isize;
    let n = (2 * r + 1) as usize;
    let (w, hh) = h.dims();
    // Transformed filter `Σ_k e^{-ikφ} F_k` for cell `i`.
    let steered = |i: usize| -> Vec<Complex64> {
        let mut k = vec![Complex64::new(0.0, 0.0); n * n];
        for (kf, kern) in &kernels {
            let ph = Complex64::from_polar(1.0, -kf * angles[i]);
            for (a, v) in k.iter_mut().zip(kern.field.values()) {
                *a += v * ph;
            }
        }
        k
    };
    let out: Vec<Complex64> = match mode {
        Mode::Correlation => (0..w * hh)
            .into_par_iter()
            .map(|i| {
                let k = steered(i);
                let (px, py) = ((i % w) as isize, (i / w) as isize);
                let mut acc = Complex64::new(0.0, 0.0);
                for dy in -r..=r {
                    for dx in -r..=r {
                        let v = h.get_or_zero(px + dx, py + dy);
                        acc += v * k[((dy + r) as usize) * n + (dx + r) as usize].conj();
                    }
                }
                acc
            })
            .collect(),
        Mode::Convolution => {
            let mut acc = vec![Complex64::new(0.0, 0.0); w * hh];
            for i in 0..w * hh {
                let v = h.values()[i];
                if v == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let k = steered(i);
                let (qx, qy) = ((i % w) as isize, (i / w) as isize);
                for dy in -r..=r {
                    for dx in -r..=r {
                        let (px, py) = (qx + dx, qy + dy);
                        if px < 0 || py < 0 || px >= w as isize || py >= hh as isize {
                            continue;
                        }
                        acc[py as usize * w + px as usize] += v * k[((dy + r) as usize) * n + (dx + r) as usize];
                    }
                }
            }
            acc
        }
    };
    let output = Field2::from_complex(w, hh, out)?;
    let mut plan = brute_plan(mode, filter.group());
    plan.retained = filter.frequencies().into_iter().map(ComponentId::Freq).collect();
    Ok(done(output, plan, start))
}

/// Correlation with the decomposed filter steered exactly at each pixel.
pub fn xcorr_spectral(h: &Field2, t: &XformField, filter: &FreqFilter2) -> Result<Response<Field2>> {
    spectral2(h, t, filter, Mode::Correlation)
}

/// Convolution with the decomposed filter steered exactly at each pixel.
pub fn xconv_spectral(h: &Field2, t: &XformField, filter: &FreqFilter2) -> Result<Response<Field2>> {
    spectral2(h, t, filter, Mode::Convolution)
}

fn check_dims3<'a>(h: &Field3, t: &'a XformField) -> Result<&'a [Quaternion]> {
    if h.dims() != t.dims() {
        return Err(Error::DimensionMismatch(format!(
            "signal is {:?} but transformation field is {:?}",
            h.dims(),
            t.dims()
        )));
    }
    t.expect_group(Group::Rotation3)?;
    Ok(t.rotations().expect("rotations"))
}

fn brute3<S: FilterSource3 + Sync + ?Sized>(
    h: &Field3,
    t: &XformField,
    filter: &S,
    support: f64,
    mode: Mode,
) -> Result<Response<Field3>> {
    let rots = check_dims3(h, t)?;
    let start = Instant::now();
    let dims = h.dims();
    let r = support.ceil() as isize + 1;
    let [nx, ny, nz] = dims.map(|d| d as isize);
    let sample = |q: Quaternion, v: [f64; 3]| {
        // F(R⁻¹ v)
        let u = q.conj().rotate(v);
        filter.sample(u[0], u[1], u[2])
    };
    let idx = |x: isize, y: isize, z: isize| ((z * ny + y) * nx + x) as usize;
    let out: Vec<Complex64> = (0..h.values().len())
        .into_par_iter()
        .map(|i| {
            let (px, py, pz) = ((i as isize) % nx, (i as isize / nx) % ny, i as isize / (nx * ny));
            let mut acc = Complex64::new(0.0, 0.0);
            for qz in (pz - r).max(0)..(pz + r + 1).min(nz) {
                for qy in (py - r).max(0)..(py + r + 1).min(ny) {
                    for qx in (px - r).max(0)..(px + r + 1).min(nx) {
                        let j = idx(qx, qy, qz);
                        let v = h.values()[j];
                        if v == Complex64::new(0.0, 0.0) {
                            continue;
                        }
                        acc += match mode {
                            Mode::Correlation => {
                                let d = [(qx - px) as f64, (qy - py) as f64, (qz - pz) as f64];
                                v * sample(rots[i], d).conj()
                            }
                            Mode::Convolution => {
                                let d = [(px - qx) as f64, (py - qy) as f64, (pz - qz) as f64];
                                v * sample(rots[j], d)
                            }
                        };
                    }
                }
            }
            acc
        })
        .collect();
    let output = Field3::from_values(dims, out)?;
    Ok(done(output, brute_plan(mode, Group::Rotation3), start))
}

/// 3D correlation with the filter rotated by warping; a
/// [`crate::field::CenteredVolume`] source reads trilinearly.
pub fn xcorr_brute3<S: FilterSource3 + Sync + ?Sized>(
    h: &Field3,
    t: &XformField,
    filter: &S,
    support: f64,
) -> Result<Response<Field3>> {
    brute3(h, t, filter, support, Mode::Correlation)
}

pub fn xconv_brute3<S: FilterSource3 + Sync + ?Sized>(
    h: &Field3,
    t: &XformField,
    filter: &S,
    support: f64,
) -> Result<Response<Field3>> {
    brute3(h, t, filter, support, Mode::Convolution)
}

fn spectral3(h: &Field3, t: &XformField, filter: &SphFilter3, mode: Mode) -> Result<Response<Field3>> {
    let rots = check_dims3(h, t)?;
    let start = Instant::now();
    let r = filter.render_radius() as isize;
    let n = (2 * r + 1) as usize;
    // Rendered f_l^{m'}·Y_l^m for every triple.
    let mut triples = Vec::new();
    for l in 0..=filter.band() {
        let li = l as i32;
        for m in -li..=li {
            for mp in -li..=li {
                triples.push((l, m, mp, filter.render_pair(l, m, mp)));
            }
        }
    }
    let steered = |q: Quaternion| -> Vec<Complex64> {
        let blocks: Vec<_> = (0..=filter.band()).map(|l| wigner_d_unit(l, q)).collect();
        let mut k = vec![Complex64::new(0.0, 0.0); n * n * n];
        for (l, m, mp, kern) in &triples {
            let d = blocks[*l].get(*m, *mp);
            for (a, v) in k.iter_mut().zip(kern.field.values()) {
                *a += v * d;
            }
        }
        k
    };
    let dims = h.dims();
    let [nx, ny, nz] = dims.map(|d| d as isize);
    let kidx = |dx: isize, dy: isize, dz: isize| (((dz + r) * n as isize + dy + r) * n as isize + dx + r) as usize;
    let out: Vec<Complex64> = match mode {
        Mode::Correlation => (0..h.values().len())
            .into_par_iter()
            .map(|i| {
                let k = steered(rots[i]);
                let (px, py, pz) = ((i as isize) % nx, (i as isize / nx) % ny, i as isize / (nx * ny));
                let mut acc = Complex64::new(0.0, 0.0);
                for dz in -r..=r {
                    for dy in -r..=r {
                        for dx in -r..=r {
                            let v = h.get_or_zero(px + dx, py + dy, pz + dz);
                            acc += v * k[kidx(dx, dy, dz)].conj();
                        }
                    }
                }
                acc
            })
            .collect(),
        Mode::Convolution => {
            let mut acc = vec![Complex64::new(0.0, 0.0); h.values().len()];
            for (i, &v) in h.values().iter().enumerate() {
                if v == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let k = steered(rots[i]);
                let (qx, qy, qz) = ((i as isize) % nx, (i as isize / nx) % ny, i as isize / (nx * ny));
                for dz in -r..=r {
                    for dy in -r..=r {
                        for dx in -r..=r {
                            let (px, py, pz) = (qx + dx, qy + dy, qz + dz);
                            if px < 0 || py < 0 || pz < 0 || px >= nx || py >= ny || pz >= nz {
                                continue;
                            }
                            acc[((pz * ny + py) * nx + px) as usize] += v * k[kidx(dx, dy, dz)];
                        }
                    }
                }
            }
            acc
        }
    };
    let output = Field3::from_values(dims, out)?;
    Ok(done(output, XConvPlan::for_sph(mode, filter), start))
}

/// 3D correlation with the decomposed filter steered by Wigner-D per voxel.
pub fn xcorr_spectral3(h: &Field3, t: &XformField, filter: &SphFilter3) -> Result<Response<Field3>> {
    spectral3(h, t, filter, Mode::Correlation)
}

/// 3D convolution with the decomposed filter steered by Wigner-D per voxel.
pub fn xconv_spectral3(h: &Field3, t: &XformField, filter: &SphFilter3) -> Result<Response<Field3>> {
    spectral3(h, t, filter, Mode::Convolution)
}
