//! Optimal voting filters and pattern detection.
//!
//! Each pattern pixel `q` casts a vote of weight `H(q)` at the offset from
//! `q` to the pattern center, expressed in the frame whose x-axis is the
//! gradient at `q`. Extended convolution with the gradient frame field then
//! replays those votes on a new image, so every rotated copy of the pattern
//! piles its votes onto its own center.

use crate::decomp::{decompose_rotation2, FreqFilter2};
use crate::engine::xconv_fast;
use crate::error::{param, Error, Result};
use crate::field::{CenteredField, Field2};
use crate::gradient::gradient;

/// How a vote landing between grid nodes is distributed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Splat {
    #[default]
    Bilinear,
    /// Whole vote to the nearest node. Only meant for tests.
    Nearest,
}

/// Vote accumulation grid of side `2R+1` with the origin in the middle.
#[derive(Clone, Debug, PartialEq)]
pub struct VoteFilter {
    radius: usize,
    support: f64,
    grid: Vec<f64>,
}

impl VoteFilter {
    pub fn zeros(support: f64) -> Result<Self> {
        if !(support > 0.0 && support.is_finite()) {
            return Err(param(
                "epsilon",
                format!("support radius must be positive, got {support}"),
            ));
        }
        let radius = support.ceil() as usize;
        let side = 2 * radius + 1;
        Ok(VoteFilter {
            radius,
            support,
            grid: vec![0.0; side * side],
        })
    }

    /// Wraps an existing grid; `values.len()` must be `(2R+1)²`.
    pub fn from_grid(support: f64, values: Vec<f64>) -> Result<Self> {
        let mut f = VoteFilter::zeros(support)?;
        if values.len() != f.grid.len() {
            return Err(Error::DimensionMismatch(format!(
                "vote grid of radius {} needs {} values, got {}",
                f.radius,
                f.grid.len(),
                values.len()
            )));
        }
        f.grid = values;
        Ok(f)
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn support(&self) -> f64 {
        self.support
    }

    pub fn side(&self) -> usize {
        2 * self.radius + 1
    }

    /// Row-major weights, row `0` at offset `dy = -R`.
    pub fn values(&self) -> &[f64] {
        &self.grid
    }

    pub fn at(&self, dx: isize, dy: isize) -> f64 {
        let r = self.radius as isize;
        if dx.abs() > r || dy.abs() > r {
            return 0.0;
        }
        self.grid[((dy + r) as usize) * self.side() + (dx + r) as usize]
    }

    pub fn mass(&self) -> f64 {
        self.grid.iter().sum()
    }

    pub fn to_field(&self) -> Field2 {
        let s = self.side();
        Field2::from_real(s, s, self.grid.clone()).expect("square grid")
    }

    /// Adds `w` at continuous offset `(dx, dy)`.
    pub fn splat(&mut self, dx: f64, dy: f64, w: f64, mode: Splat) {
        let r = self.radius as f64;
        let (x, y) = (dx + r, dy + r);
        let side = self.side();
        let mut add = |ix: isize, iy: isize, v: f64| {
            if ix >= 0 && iy >= 0 && (ix as usize) < side && (iy as usize) < side {
                self.grid[iy as usize * side + ix as usize] += v;
            }
        };
        match mode {
            Splat::Nearest => add(x.round() as isize, y.round() as isize, w),
            Splat::Bilinear => {
                let (x0, y0) = (x.floor(), y.floor());
                let (fx, fy) = (x - x0, y - y0);
                let (ix, iy) = (x0 as isize, y0 as isize);
                add(ix, iy, w * (1.0 - fx) * (1.0 - fy));
                add(ix + 1, iy, w * fx * (1.0 - fy));
                add(ix, iy + 1, w * (1.0 - fx) * fy);
                add(ix + 1, iy + 1, w * fx * fy);
            }
        }
    }

    /// Angular decomposition with the sampling density tied to the grid size.
    pub fn decompose(&self, band: usize) -> Result<FreqFilter2> {
        let field = self.to_field();
        let src = CenteredField::centered(&field);
        let n_radii = 2 * self.radius;
        decompose_rotation2(&src, band, n_radii, self.default_angles(), self.support + 1.0)
    }

    /// Angular samples used by [`VoteFilter::decompose`]: about two per
    /// pixel on the outer ring, rounded up to a multiple of 8.
    pub fn default_angles(&self) -> usize {
        let n = (4.0 * std::f64::consts::PI * (self.support + 1.0)).ceil() as usize;
        n.div_ceil(8) * 8
    }
}

/// Splats `weight(q)` at the offset `p - q` rotated by `-frame(q)`, for every
/// `q` within `support` of `center` with positive weight.
///
/// `weight` and `frame` are row-major over a `width × height` image.
pub fn build_vote_filter(
    (width, height): (usize, usize),
    weight: &[f64],
    frame: &[f64],
    center: (f64, f64),
    support: f64,
    mode: Splat,
) -> Result<VoteFilter> {
    if weight.len() != width * height || frame.len() != width * height {
        return Err(Error::DimensionMismatch(format!(
            "{width}x{height} image needs {} weights and frame angles, got {} and {}",
            width * height,
            weight.len(),
            frame.len()
        )));
    }
    let (cx, cy) = center;
    if !(cx >= 0.0 && cy >= 0.0 && cx <= (width - 1) as f64 && cy <= (height - 1) as f64) {
        return Err(param(
            "center",
            format!("({cx}, {cy}) lies outside the {width}x{height} image"),
        ));
    }
    let mut f = VoteFilter::zeros(support)?;
    let r = f.radius as isize;
    let (px, py) = (cx.round() as isize, cy.round() as isize);
    let mut votes = 0usize;
    for qy in (py - r - 1).max(0)..=(py + r + 1).min(height as isize - 1) {
        for qx in (px - r - 1).max(0)..=(px + r + 1).min(width as isize - 1) {
            let i = qy as usize * width + qx as usize;
            let w = weight[i];
            let (dx, dy) = (cx - qx as f64, cy - qy as f64);
            if w <= 0.0 || dx.hypot(dy) > support {
                continue;
            }
            let (s, c) = frame[i].sin_cos();
            f.splat(c * dx + s * dy, -s * dx + c * dy, w, mode);
            votes += 1;
        }
    }
    if votes == 0 {
        return Err(Error::Degenerate("no gradient support within the filter radius"));
    }
    Ok(f)
}

/// The optimal filter of `pattern` about `center`: votes weighted by the
/// gradient magnitude in the gradient frame.
pub fn build_optimal_filter(pattern: &Field2, center: (f64, f64), support: f64) -> Result<VoteFilter> {
    build_optimal_filter_with(pattern, center, support, Splat::Bilinear)
}

pub fn build_optimal_filter_with(
    pattern: &Field2,
    center: (f64, f64),
    support: f64,
    mode: Splat,
) -> Result<VoteFilter> {
    let g = gradient(pattern)?;
    build_vote_filter(pattern.dims(), g.magnitude(), g.direction(), center, support, mode)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Peak {
    pub x: usize,
    pub y: usize,
    pub value: f64,
}

/// Local maxima over a disk of `radius`, at least `rel_threshold·max`,
/// sorted by value (ties by raster order). Plateaus yield their first pixel.
pub fn find_peaks(response: &Field2, radius: f64, rel_threshold: f64) -> Vec<Peak> {
    let (w, h) = response.dims();
    let v = response.real_values();
    let max = v.iter().cloned().fold(0.0, f64::max);
    if max <= 0.0 {
        return Vec::new();
    }
    let floor = rel_threshold * max;
    let r = radius.max(1.0);
    let ri = r.floor() as isize;
    let mut peaks = Vec::new();
    for y in 0..h {
        'px: for x in 0..w {
            let i = y * w + x;
            let c = v[i];
            if c <= 0.0 || c < floor {
                continue;
            }
            for dy in -ri..=ri {
                for dx in -ri..=ri {
                    if (dx == 0 && dy == 0) || ((dx * dx + dy * dy) as f64) > r * r {
                        continue;
                    }
                    let (nx, ny) = (x as isize + dx, y as isize + dy);
                    if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                        continue;
                    }
                    let j = ny as usize * w + nx as usize;
                    if v[j] > c || (v[j] == c && j < i) {
                        continue 'px;
                    }
                }
            }
            peaks.push(Peak { x, y, value: c });
        }
    }
    peaks.sort_by(|a, b| b.value.total_cmp(&a.value).then((a.y, a.x).cmp(&(b.y, b.x))));
    peaks
}

#[derive(Clone, Debug, PartialEq)]
pub struct Detection {
    pub response: Field2,
    pub peaks: Vec<Peak>,
    pub convolutions: usize,
}

/// Non-maximum suppression radius as a fraction of the filter support.
pub const NMS_FRACTION: f64 = 0.5;
/// Peaks below this fraction of the maximum response are dropped.
pub const PEAK_THRESHOLD: f64 = 0.5;

/// Votes the gradient of `image` through `filter` band-limited to `band`.
pub fn detect_pattern(image: &Field2, filter: &VoteFilter, band: usize) -> Result<Detection> {
    if band < 1 {
        return Err(param("K", "detection needs K >= 1"));
    }
    let f = filter.decompose(band.min(filter.default_angles()))?;
    detect_with(image, filter.support(), &f)
}

/// As [`detect_pattern`] with an already decomposed filter.
pub fn detect_with(image: &Field2, support: f64, filter: &FreqFilter2) -> Result<Detection> {
    let g = gradient(image)?;
    let r = xconv_fast(&g.magnitude_field(), &g.frame_field(), filter)?;
    let response = r.output.real_part();
    let peaks = find_peaks(&response, NMS_FRACTION * support, PEAK_THRESHOLD);
    Ok(Detection {
        response,
        peaks,
        convolutions: r.convolutions,
    })
}

/// Response of `filter` (decomposed at full band) at `p` on its own pattern.
pub fn self_response(pattern: &Field2, filter: &VoteFilter, p: (usize, usize)) -> Result<f64> {
    let f = filter.decompose(filter.default_angles())?;
    let d = detect_with(pattern, filter.support(), &f)?;
    Ok(d.response.real_at(p.0, p.1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(n: usize, p: (f64, f64)) -> Field2 {
        Field2::from_fn_real(n, n, |x, y| (x as f64 - p.0).hypot(y as f64 - p.1))
    }

    #[test]
    fn radial_ramp_votes_on_negative_axis() {
        let p = (12.0, 12.0);
        let f = build_optimal_filter(&ramp(25, p), p, 6.0).unwrap();
        let r = f.radius() as isize;
        let mut off_axis = 0.0;
        for dy in -r..=r {
            for dx in -r..=r {
                let v = f.at(dx, dy);
                if dx > 0 || dy.abs() > 1 {
                    off_axis += v;
                }
            }
        }
        // Central differences bend the cone's gradient by a degree or two,
        // which keeps every vote within a row of the axis.
        assert!(off_axis < 1e-9 * f.mass(), "{off_axis} of {}", f.mass());
    }

    #[test]
    fn mass_is_conserved() {
        let img = Field2::from_fn_real(30, 30, |x, y| ((x as f64 * 0.4).sin() + (y as f64 * 0.3).cos()) * 2.0);
        let g = gradient(&img).unwrap();
        let p = (14.3, 15.6);
        let f = build_optimal_filter(&img, p, 7.5).unwrap();
        let mut want = 0.0;
        for y in 0..30 {
            for x in 0..30 {
                if (p.0 - x as f64).hypot(p.1 - y as f64) <= 7.5 {
                    want += g.magnitude_at(x, y);
                }
            }
        }
        assert!((f.mass() - want).abs() < 1e-10 * want);
        assert_eq!(f.side(), 17);
    }

    #[test]
    fn single_gradient_pixel_single_splat() {
        let (w, h) = (15, 15);
        let mut weight = vec![0.0; w * h];
        let mut frame = vec![0.0; w * h];
        weight[5 * w + 9] = 2.5;
        frame[5 * w + 9] = std::f64::consts::FRAC_PI_2;
        let f = build_vote_filter((w, h), &weight, &frame, (7.0, 7.0), 5.0, Splat::Bilinear).unwrap();
        // p - q = (-2, 2); rotating by -90° gives (2, 2).
        assert!((f.at(2, 2) - 2.5).abs() < 1e-12);
        assert!((f.mass() - 2.5).abs() < 1e-12);
    }

    #[test]
    fn flat_pattern_is_degenerate() {
        let img = Field2::from_fn_real(10, 10, |_, _| 1.0);
        assert!(matches!(
            build_optimal_filter(&img, (5.0, 5.0), 3.0),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn peaks_suppress_neighbors() {
        let mut v = vec![0.0; 100];
        v[3 * 10 + 3] = 1.0;
        v[3 * 10 + 4] = 0.9;
        v[7 * 10 + 7] = 0.8;
        v[7 * 10 + 8] = 0.8;
        v[0] = 0.1;
        let p = find_peaks(&Field2::from_real(10, 10, v).unwrap(), 2.0, 0.5);
        assert_eq!(p.len(), 2);
        assert_eq!((p[0].x, p[0].y), (3, 3));
        assert_eq!((p[1].x, p[1].y), (7, 7));
    }

    #[test]
    fn blank_image_has_no_response() {
        let pat = ramp(21, (10.0, 10.0));
        let f = build_optimal_filter(&pat, (10.0, 10.0), 5.0).unwrap();
        let d = detect_pattern(&Field2::zeros(20, 20), &f, 8).unwrap();
        assert!(d.response.values().iter().all(|v| v.norm() == 0.0));
        assert!(d.peaks.is_empty());
    }
}
