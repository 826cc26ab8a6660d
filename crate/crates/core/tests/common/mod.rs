//! Fixtures shared by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xconv::apps::contour::Polyline;
use xconv::{Complex64, Field2, Field3};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rel_l2(a: &[Complex64], b: &[Complex64]) -> f64 {
    let n: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let d: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (n / d).sqrt()
}

pub fn rel2(a: &Field2, b: &Field2) -> f64 {
    rel_l2(a.values(), b.values())
}

pub fn rel3(a: &Field3, b: &Field3) -> f64 {
    rel_l2(a.values(), b.values())
}

pub fn random_field2(r: &mut ChaCha8Rng, w: usize, h: usize) -> Field2 {
    let v = (0..w * h).map(|_| r.random_range(0.0..1.0)).collect();
    Field2::from_real(w, h, v).unwrap()
}

/// Smooth random filter supported in a disk of `eps`: a raised-cosine
/// window times first and second angular harmonics with random phases.
pub fn random_filter2(r: &mut ChaCha8Rng, eps: f64) -> impl Fn(f64, f64) -> Complex64 + Sync + Copy {
    let (a, b) = (r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
    let (t1, t2) = (r.random_range(0.0..6.3), r.random_range(0.0..6.3));
    move |x: f64, y: f64| {
        let rr = x.hypot(y);
        if rr >= eps {
            return Complex64::new(0.0, 0.0);
        }
        let th = y.atan2(x);
        let w = (std::f64::consts::PI * rr / (2.0 * eps)).cos().powi(2);
        let u = rr / eps;
        Complex64::new(
            w * (1.0 + a * (th - t1).cos() * u + b * (2.0 * (th - t2)).cos() * u * u),
            0.0,
        )
    }
}

/// Smooth random 3D filter supported in a ball of `r_max`, angular degree
/// at most 2.
pub fn random_filter3(r: &mut ChaCha8Rng, r_max: f64) -> impl Fn(f64, f64, f64) -> Complex64 + Sync + Copy {
    let c: [f64; 6] = std::array::from_fn(|_| r.random_range(-1.0..1.0));
    move |x: f64, y: f64, z: f64| {
        let rr = (x * x + y * y + z * z).sqrt();
        if rr >= r_max {
            return Complex64::new(0.0, 0.0);
        }
        let w = (std::f64::consts::PI * rr / (2.0 * r_max)).cos().powi(2);
        let s = 0.4 * r_max;
        Complex64::new(
            w * (1.0
                + (c[0] * x + c[1] * y + c[2] * z) / s
                + (c[3] * x * y + c[4] * y * z + c[5] * (x * x - z * z)) / (s * s)),
            0.0,
        )
    }
}

fn soft_stroke(px: f64, py: f64, a: (f64, f64), b: (f64, f64), half_width: f64) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let t = (((px - a.0) * dx + (py - a.1) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
    let d = (px - a.0 - t * dx).hypot(py - a.1 - t * dy);
    let s = ((half_width - d) + 0.75) / 1.5;
    let s = s.clamp(0.0, 1.0);
    s * s * (3.0 - 2.0 * s)
}

/// Letter-like glyph of soft strokes around the origin, about 9 px in
/// radius, with no rotational symmetry.
pub fn glyph(x: f64, y: f64) -> f64 {
    let strokes = [
        ((-6.0, 7.0), (-1.0, -7.0)),
        ((-1.0, -7.0), (5.0, 7.0)),
        ((-3.5, 1.5), (7.0, 1.5)),
        ((5.0, 7.0), (8.0, 4.0)),
    ];
    strokes
        .iter()
        .map(|&(a, b)| soft_stroke(x, y, a, b, 1.0))
        .fold(0.0, f64::max)
}

/// `glyph` rotated by `angle` about `center`, summed over placements.
pub fn glyph_scene(w: usize, h: usize, placements: &[((f64, f64), f64)]) -> Field2 {
    Field2::from_fn_real(w, h, |x, y| {
        placements
            .iter()
            .map(|&((cx, cy), a)| {
                let (s, c) = a.sin_cos();
                let (dx, dy) = (x as f64 - cx, y as f64 - cy);
                glyph(c * dx + s * dy, -s * dx + c * dy)
            })
            .sum()
    })
}

/// Dark filled triangle on a bright background, centered at `c`.
pub fn silhouette(n: usize, c: f64) -> Field2 {
    let verts: [(f64, f64); 3] = [(0.0, -8.0), (7.5, 6.0), (-7.5, 6.0)];
    Field2::from_fn_real(n, n, |x, y| {
        let (px, py) = (x as f64 - c, y as f64 - c);
        let mut d = f64::INFINITY;
        for i in 0..3 {
            let (a, b) = (verts[i], verts[(i + 1) % 3]);
            let (ex, ey) = (b.0 - a.0, b.1 - a.1);
            let len = ex.hypot(ey);
            // Signed distance to the edge line, positive inside.
            d = d.min(-(((px - a.0) * ey - (py - a.1) * ex) / len));
        }
        let s = ((d + 0.75) / 1.5).clamp(0.0, 1.0);
        1.0 - s * s * (3.0 - 2.0 * s)
    })
}

/// Two pieces of a box split along a jagged line, the upper piece moved by
/// a rigid motion.
pub struct Fracture {
    pub size: usize,
    pub lower: Vec<Polyline>,
    pub upper_moved: Vec<Polyline>,
    /// A point on the break line in the lower piece's frame.
    pub center: (f64, f64),
    /// Where `center` lands after the motion.
    pub moved_center: (f64, f64),
    pub angle: f64,
}

pub fn fracture(seed: u64, angle: f64) -> Fracture {
    let mut r = rng(seed);
    let size = 96;
    let (x0, x1, y_break) = (16.0, 80.0, 48.0);
    let n = 12;
    let jag: Vec<(f64, f64)> = (0..=n)
        .map(|i| {
            let x = x0 + (x1 - x0) * i as f64 / n as f64;
            let y = if i == 0 || i == n {
                y_break
            } else {
                y_break + r.random_range(-4.0..4.0)
            };
            (x, y)
        })
        .collect();
    // Counterclockwise on screen (y down), so right of travel is outward.
    let mut lower: Polyline = vec![(x0, y_break), (x0, 80.0), (x1, 80.0)];
    lower.extend(jag.iter().rev());
    let mut upper: Polyline = jag.clone();
    upper.extend([(x1, 16.0), (x0, 16.0), (x0, y_break)]);
    let center = jag[n / 2];
    let moved_center = (56.0, 44.0);
    let (s, c) = angle.sin_cos();
    let motion = |(x, y): (f64, f64)| {
        let (dx, dy) = (x - center.0, y - center.1);
        (c * dx - s * dy + moved_center.0, s * dx + c * dy + moved_center.1)
    };
    Fracture {
        size,
        lower: vec![lower],
        upper_moved: vec![upper.into_iter().map(motion).collect()],
        center,
        moved_center,
        angle,
    }
}

pub fn random_rotation(r: &mut ChaCha8Rng) -> xconv::Quaternion {
    loop {
        let v: [f64; 4] = std::array::from_fn(|_| r.random_range(-1.0..1.0));
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.1 && n <= 1.0 {
            return xconv::Quaternion::new(v[0] / n, v[1] / n, v[2] / n, v[3] / n);
        }
    }
}

/// Kernel whose offset `d` holds `warp(d)` read from `source`.
pub fn warped_kernel<S: xconv::FilterSource2 + ?Sized>(
    source: &S,
    radius: usize,
    warp: impl Fn(f64, f64) -> (f64, f64),
) -> xconv::fft::Kernel2 {
    xconv::fft::Kernel2::from_offsets(radius, |dx, dy| {
        let (x, y) = warp(dx as f64, dy as f64);
        source.sample(x, y)
    })
}
