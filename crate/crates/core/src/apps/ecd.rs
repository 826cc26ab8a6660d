//! Extended Convolution Descriptor: the L2-normalized optimal filter of a
//! keypoint neighborhood, plus rank-based precision/recall matching.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{param, Error, Result};
use crate::field::Field2;
use crate::gradient::{gradient, GradientField};

use super::vote::{build_vote_filter, Splat};

/// Support radius relative to a keypoint's detection scale.
pub const SUPPORT_PER_SCALE: f64 = 2.5;

#[derive(Clone, Debug, PartialEq)]
pub struct Descriptor {
    pub keypoint: (f64, f64),
    pub support: f64,
    /// `(2R+1)²` values with unit L2 norm, or all zero when `degenerate`.
    pub values: Vec<f64>,
    /// No gradient inside the support.
    pub degenerate: bool,
}

impl Descriptor {
    pub fn distance(&self, other: &Descriptor) -> f64 {
        distance(&self.values, &other.values)
    }
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn support_for_scale(scale: f64) -> f64 {
    SUPPORT_PER_SCALE * scale
}

pub fn ecd(image: &Field2, keypoint: (f64, f64), support: f64) -> Result<Descriptor> {
    let g = gradient(image)?;
    describe(&g, keypoint, support)
}

/// Descriptors for many keypoints sharing one gradient computation.
pub fn ecd_batch(image: &Field2, keypoints: &[(f64, f64)], support: f64) -> Result<Vec<Descriptor>> {
    let g = gradient(image)?;
    keypoints.par_iter().map(|&k| describe(&g, k, support)).collect()
}

fn describe(g: &GradientField, keypoint: (f64, f64), support: f64) -> Result<Descriptor> {
    let (w, h) = g.dims();
    let (x, y) = keypoint;
    if !(x >= 1.0 && y >= 1.0 && x <= w as f64 - 2.0 && y <= h as f64 - 2.0) {
        return Err(param(
            "keypoint",
            format!("({x}, {y}) must lie at least 1 px inside the {w}x{h} image"),
        ));
    }
    match build_vote_filter(
        g.dims(),
        g.magnitude(),
        g.direction(),
        keypoint,
        support,
        Splat::Bilinear,
    ) {
        Ok(f) => {
            let norm = f.values().iter().map(|v| v * v).sum::<f64>().sqrt();
            Ok(Descriptor {
                keypoint,
                support,
                values: f.values().iter().map(|v| v / norm).collect(),
                degenerate: false,
            })
        }
        Err(Error::Degenerate(_)) => {
            let side = 2 * support.ceil() as usize + 1;
            Ok(Descriptor {
                keypoint,
                support,
                values: vec![0.0; side * side],
                degenerate: true,
            })
        }
        Err(e) => Err(e),
    }
}

/// Mean precision and recall over scene keypoints at ranks `1..=r_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct PrCurves {
    pub precision: Vec<f64>,
    pub recall: Vec<f64>,
    /// Scene keypoints without any true match; left out of the means.
    pub excluded: Vec<usize>,
}

/// Ranks model descriptors by distance for every scene descriptor and
/// scores the ranking against `truth`, a list of `(scene, model)` pairs.
pub fn match_descriptors(
    scene: &[Vec<f64>],
    model: &[Vec<f64>],
    truth: &[(usize, usize)],
    r_max: usize,
) -> Result<PrCurves> {
    if r_max == 0 || r_max > model.len() {
        return Err(param("r_max", format!("must be in 1..={}, got {r_max}", model.len())));
    }
    let mut sets: Vec<Vec<usize>> = vec![Vec::new(); scene.len()];
    for &(s, m) in truth {
        if s >= scene.len() || m >= model.len() {
            return Err(param("correspondence", format!("pair ({s}, {m}) is out of range")));
        }
        if !sets[s].contains(&m) {
            sets[s].push(m);
        }
    }
    let excluded: Vec<usize> = (0..scene.len()).filter(|&s| sets[s].is_empty()).collect();
    let used: Vec<usize> = (0..scene.len()).filter(|&s| !sets[s].is_empty()).collect();
    let rows: Vec<(Vec<f64>, Vec<f64>)> = used
        .par_iter()
        .map(|&s| {
            let mut order: Vec<(f64, usize)> = model
                .iter()
                .enumerate()
                .map(|(i, m)| (distance(&scene[s], m), i))
                .collect();
            order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let mut hits = 0usize;
            let mut p = Vec::with_capacity(r_max);
            let mut r = Vec::with_capacity(r_max);
            for (rank, &(_, i)) in order.iter().take(r_max).enumerate() {
                if sets[s].contains(&i) {
                    hits += 1;
                }
                p.push(hits as f64 / (rank + 1) as f64);
                r.push(hits as f64 / sets[s].len() as f64);
            }
            (p, r)
        })
        .collect();
    let n = rows.len().max(1) as f64;
    let mut precision = vec![0.0; r_max];
    let mut recall = vec![0.0; r_max];
    for (p, r) in &rows {
        for i in 0..r_max {
            precision[i] += p[i];
            recall[i] += r[i];
        }
    }
    precision.iter_mut().chain(recall.iter_mut()).for_each(|v| *v /= n);
    Ok(PrCurves {
        precision,
        recall,
        excluded,
    })
}

/// Synthetic matching benchmark: a smooth random texture, a rotated and
/// noise-corrupted copy, and keypoints whose true matches are known.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Harness {
    pub size: usize,
    pub keypoints: usize,
    pub support: f64,
    pub angle: f64,
    pub noise: f64,
    pub seed: u64,
}

impl Default for Harness {
    fn default() -> Self {
        Harness {
            size: 96,
            keypoints: 40,
            support: 7.0,
            angle: 0.6,
            noise: 0.02,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HarnessResult {
    pub curves: PrCurves,
    pub model_image: Field2,
    pub scene_image: Field2,
}

impl Harness {
    pub fn run(&self) -> Result<HarnessResult> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let n = self.size;
        let blobs: Vec<(f64, f64, f64, f64)> = (0..n * n / 40)
            .map(|_| {
                (
                    rng.random_range(0.0..n as f64),
                    rng.random_range(0.0..n as f64),
                    rng.random_range(1.5..4.0),
                    rng.random_range(-1.0..1.0),
                )
            })
            .collect();
        let texture = |x: f64, y: f64| -> f64 {
            blobs
                .iter()
                .map(|&(bx, by, s, a)| a * (-((x - bx).powi(2) + (y - by).powi(2)) / (2.0 * s * s)).exp())
                .sum()
        };
        let c = (n as f64 - 1.0) / 2.0;
        let (sn, cs) = self.angle.sin_cos();
        // Scene pixel v shows the texture at R(-angle)(v - c) + c.
        let to_model = |x: f64, y: f64| {
            let (dx, dy) = (x - c, y - c);
            (cs * dx + sn * dy + c, -sn * dx + cs * dy + c)
        };
        let to_scene = |x: f64, y: f64| {
            let (dx, dy) = (x - c, y - c);
            (cs * dx - sn * dy + c, sn * dx + cs * dy + c)
        };
        let model_image = Field2::from_fn_real(n, n, |x, y| texture(x as f64, y as f64));
        let noise: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..1.0) * self.noise).collect();
        let scene_image = Field2::from_fn_real(n, n, |x, y| {
            let (mx, my) = to_model(x as f64, y as f64);
            texture(mx, my) + noise[y * n + x]
        });
        // Keypoints far enough from the border in both images.
        let margin = self.support + 2.0;
        let lo = c - (c - margin) / std::f64::consts::SQRT_2;
        let hi = c + (c - margin) / std::f64::consts::SQRT_2;
        if hi <= lo {
            return Err(param("size", "image too small for the support radius"));
        }
        let model_kp: Vec<(f64, f64)> = (0..self.keypoints)
            .map(|_| (rng.random_range(lo..hi).round(), rng.random_range(lo..hi).round()))
            .collect();
        let scene_kp: Vec<(f64, f64)> = model_kp.iter().map(|&(x, y)| to_scene(x, y)).collect();
        let model = ecd_batch(&model_image, &model_kp, self.support)?;
        let scene = ecd_batch(&scene_image, &scene_kp, self.support)?;
        // A model keypoint matches when it lies within a quarter support of
        // the true location.
        let tol = 0.25 * self.support;
        let mut truth = Vec::new();
        for (s, &(sx, sy)) in scene_kp.iter().enumerate() {
            let (mx, my) = to_model(sx, sy);
            for (m, &(kx, ky)) in model_kp.iter().enumerate() {
                if (kx - mx).hypot(ky - my) <= tol {
                    truth.push((s, m));
                }
            }
        }
        let sv: Vec<Vec<f64>> = scene.into_iter().map(|d| d.values).collect();
        let mv: Vec<Vec<f64>> = model.into_iter().map(|d| d.values).collect();
        let curves = match_descriptors(&sv, &mv, &truth, mv.len().min(10))?;
        Ok(HarnessResult {
            curves,
            model_image,
            scene_image,
        })
    }
}
