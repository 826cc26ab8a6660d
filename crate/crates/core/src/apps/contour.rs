//! Complementary contour matching: find where, and at what angle, a query
//! fragment's boundary fits against a target's.
//!
//! Complementary pieces share their break line but their outward normals
//! point against each other, so the query's voting filter is built with
//! negated normals.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::engine::xconv_fast;
use crate::error::{param, Error, Result};
use crate::field::Field2;
use crate::xform::{wrap_angle, XformField};

use super::filters::blur;
use super::vote::{build_vote_filter, find_peaks, Splat};

/// Pre-smoothing applied to the rasterized contour and its normals.
pub const CONTOUR_SIGMA: f64 = 1.5;
/// Candidate translations passed to the angular refinement.
pub const DEFAULT_CANDIDATES: usize = 9;
/// Angular refinement resolution.
pub const ANGLE_SAMPLES: usize = 360;

pub type Polyline = Vec<(f64, f64)>;

/// Rasterized contours: a smoothed line signal and the smoothed normal
/// vectors, whose direction is the frame field.
#[derive(Clone, Debug, PartialEq)]
pub struct ContourScene {
    signal: Field2,
    normals: Vec<Complex64>,
    sigma: f64,
}

impl ContourScene {
    /// Stamps each polyline segment with Bresenham lines. A segment's normal
    /// points to the right of its direction of travel in the y-down image,
    /// i.e. outward for shapes traversed counterclockwise on screen.
    pub fn rasterize(width: usize, height: usize, polylines: &[Polyline], sigma: f64) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(param("dims", "scene must be at least 1x1"));
        }
        let mut stamp = vec![0.0; width * height];
        let mut nx = vec![0.0; width * height];
        let mut ny = vec![0.0; width * height];
        for line in polylines {
            for seg in line.windows(2) {
                let ((x0, y0), (x1, y1)) = (seg[0], seg[1]);
                let len = (x1 - x0).hypot(y1 - y0);
                if len == 0.0 {
                    continue;
                }
                let (tx, ty) = ((x1 - x0) / len, (y1 - y0) / len);
                let (mx, my) = (-ty, tx);
                for (x, y) in bresenham(
                    x0.round() as i64,
                    y0.round() as i64,
                    x1.round() as i64,
                    y1.round() as i64,
                ) {
                    if x < 0 || y < 0 || x >= width as i64 || y >= height as i64 {
                        continue;
                    }
                    let i = y as usize * width + x as usize;
                    stamp[i] = 1.0;
                    nx[i] += mx;
                    ny[i] += my;
                }
            }
        }
        let signal = blur(&stamp, width, height, sigma);
        let bx = blur(&nx, width, height, sigma);
        let by = blur(&ny, width, height, sigma);
        Ok(ContourScene {
            signal: Field2::from_real(width, height, signal)?,
            normals: bx.into_iter().zip(by).map(|(x, y)| Complex64::new(x, y)).collect(),
            sigma,
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        self.signal.dims()
    }

    pub fn signal(&self) -> &Field2 {
        &self.signal
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Smoothed normal vectors as `nx + i·ny`.
    pub fn normals(&self) -> &[Complex64] {
        &self.normals
    }

    /// Normal directions, zero where no contour is nearby.
    pub fn angles(&self) -> Vec<f64> {
        self.normals
            .iter()
            .map(|n| if n.norm() > 0.0 { n.arg() } else { 0.0 })
            .collect()
    }

    pub fn frame_field(&self) -> XformField {
        let (w, h) = self.dims();
        XformField::rotation2(w, h, self.angles()).expect("dims match")
    }
}

fn bresenham(x0: i64, y0: i64, x1: i64, y1: i64) -> Vec<(i64, i64)> {
    let (dx, dy) = ((x1 - x0).abs(), -(y1 - y0).abs());
    let (sx, sy) = (if x0 < x1 { 1 } else { -1 }, if y0 < y1 { 1 } else { -1 });
    let (mut x, mut y, mut err) = (x0, y0, dx + dy);
    let mut out = Vec::new();
    loop {
        out.push((x, y));
        if x == x1 && y == y1 {
            return out;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
}

/// A candidate fit of the query region into the target.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Placement {
    pub x: usize,
    pub y: usize,
    /// Rotation carrying the query region onto the target, in `(-π, π]`.
    pub angle: f64,
    /// Extended-convolution response at `(x, y)`.
    pub score: f64,
    /// Relative L2 misfit of the rotated, negated query normals.
    pub residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourMatch {
    pub center: (f64, f64),
    pub support: f64,
    pub band: usize,
    pub candidates: usize,
}

impl ContourMatch {
    pub fn new(center: (f64, f64), support: f64, band: usize) -> Self {
        ContourMatch {
            center,
            support,
            band,
            candidates: DEFAULT_CANDIDATES,
        }
    }
}

/// Candidate placements of the query region, best score first.
pub fn match_contours(query: &ContourScene, target: &ContourScene, opts: &ContourMatch) -> Result<Vec<Placement>> {
    if opts.band < 1 {
        return Err(param("K", "contour matching needs K >= 1"));
    }
    let flipped: Vec<f64> = query.angles().iter().map(|a| wrap_angle(a + PI)).collect();
    let filter = build_vote_filter(
        query.dims(),
        &query.signal.real_values(),
        &flipped,
        opts.center,
        opts.support,
        Splat::Bilinear,
    )
    .map_err(|e| match e {
        Error::Degenerate(_) => Error::Degenerate("query region contains no contour"),
        e => e,
    })?;
    let f = filter.decompose(opts.band.min(filter.default_angles()))?;
    let response = xconv_fast(target.signal(), &target.frame_field(), &f)?
        .output
        .real_part();
    let peaks = find_peaks(&response, 0.5 * opts.support, 0.0);
    let q = polar_patch(query, opts.center, opts.support);
    let mut out: Vec<Placement> = peaks
        .par_iter()
        .take(opts.candidates)
        .map(|p| {
            let t = polar_patch(target, (p.x as f64, p.y as f64), opts.support);
            let (angle, residual) = best_rotation(&q, &t);
            Placement {
                x: p.x,
                y: p.y,
                angle,
                score: p.value,
                residual,
            }
        })
        .collect();
    out.sort_by(|a, b| b.score.total_cmp(&a.score).then((a.y, a.x).cmp(&(b.y, b.x))));
    Ok(out)
}

/// Normals sampled on rings `(j + ½)·support/n` and `ANGLE_SAMPLES` angles,
/// ring-major.
fn polar_patch(scene: &ContourScene, c: (f64, f64), support: f64) -> Vec<Vec<Complex64>> {
    let (w, h) = scene.dims();
    let field = Field2::from_complex(w, h, scene.normals.clone()).expect("dims match");
    let n_r = support.ceil().max(1.0) as usize;
    (0..n_r)
        .map(|j| {
            let r = (j as f64 + 0.5) * support / n_r as f64;
            (0..ANGLE_SAMPLES)
                .map(|m| {
                    let phi = 2.0 * PI * m as f64 / ANGLE_SAMPLES as f64;
                    field.bilinear(c.0 + r * phi.cos(), c.1 + r * phi.sin())
                })
                .collect()
        })
        .collect()
}

/// Angle `α` minimizing `Σ r·|T(r, φ+α) + e^{iα}·Q(r, φ)|²`: the target
/// patch equals the query rotated by `α` with its normals reversed.
fn best_rotation(q: &[Vec<Complex64>], t: &[Vec<Complex64>]) -> (f64, f64) {
    let n = ANGLE_SAMPLES;
    let total: f64 = q
        .iter()
        .zip(t)
        .enumerate()
        .map(|(j, (a, b))| (j as f64 + 0.5) * a.iter().chain(b).map(|v| v.norm_sqr()).sum::<f64>())
        .sum();
    let mut best = (0usize, f64::INFINITY);
    for m in 0..n {
        let rot = Complex64::from_polar(1.0, 2.0 * PI * m as f64 / n as f64);
        let mut cost = 0.0;
        for (j, (a, b)) in q.iter().zip(t).enumerate() {
            let wgt = j as f64 + 0.5;
            for i in 0..n {
                cost += wgt * (b[(i + m) % n] + rot * a[i]).norm_sqr();
            }
        }
        if cost < best.1 {
            best = (m, cost);
        }
    }
    let angle = wrap_angle(2.0 * PI * best.0 as f64 / n as f64);
    let residual = if total > 0.0 { (best.1 / total).sqrt() } else { 0.0 };
    (angle, residual)
}
