//! Spherical-harmonic decomposition of 3D filters, shell by shell.

use num_complex::Complex64;

use crate::error::{param, Result};
use crate::fft::Kernel3;
use crate::field::{Field3, FilterSource3};
use crate::polar::ring_radius;
use crate::sh::{lm_index, sph_harm, to_spherical, SphereGrid};

/// Radial profile `f_l^m(r)` on the filter's shells.
#[derive(Clone, Debug, PartialEq)]
pub struct SphComponent {
    pub l: usize,
    pub m: i32,
    pub profile: Vec<Complex64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SphFilter3 {
    band: usize,
    n_radii: usize,
    n_angular: usize,
    r_max: f64,
    /// Degree-major, `lm_index` order.
    components: Vec<SphComponent>,
}

fn check_params(band: usize, n_radii: usize, n_angular: usize, r_max: f64) -> Result<()> {
    if n_radii < 1 {
        return Err(param("n_radii", "must be at least 1"));
    }
    if n_angular < 2 * (band + 1) {
        return Err(param(
            "n_angular",
            format!(
                "{n_angular} samples cannot resolve degree {band}; need {}",
                2 * (band + 1)
            ),
        ));
    }
    if !(r_max.is_finite() && r_max > 0.0) {
        return Err(param("r_max", format!("{r_max} must be positive")));
    }
    Ok(())
}

/// Per-shell harmonic analysis about the source's origin for degrees `≤ band`.
/// Shells sit at `(j + ½)·r_max/n_radii`; each is sampled on an
/// `n_angular × n_angular` equiangular grid.
pub fn decompose_rotation3<S: FilterSource3 + ?Sized>(
    filter: &S,
    band: usize,
    n_radii: usize,
    n_angular: usize,
    r_max: f64,
) -> Result<SphFilter3> {
    check_params(band, n_radii, n_angular, r_max)?;
    let grid = SphereGrid::new(n_angular);
    let mut components: Vec<SphComponent> = (0..=band)
        .flat_map(|l| {
            (-(l as i32)..=l as i32).map(move |m| SphComponent {
                l,
                m,
                profile: Vec::with_capacity(n_radii),
            })
        })
        .collect();
    for j in 0..n_radii {
        let r = ring_radius(j, n_radii, r_max);
        let samples: Vec<Complex64> = (0..grid.len())
            .map(|i| {
                let d = grid.direction(i);
                filter.sample(r * d[0], r * d[1], r * d[2])
            })
            .collect();
        for (c, v) in components.iter_mut().zip(grid.analyze(&samples, band)) {
            c.profile.push(v);
        }
    }
    Ok(SphFilter3 {
        band,
        n_radii,
        n_angular,
        r_max,
        components,
    })
}

impl SphFilter3 {
    /// Filter from explicit profiles; missing `(l, m)` pairs are zero.
    pub fn from_profiles(band: usize, n_angular: usize, r_max: f64, profiles: Vec<SphComponent>) -> Result<Self> {
        let n_radii = profiles.first().map_or(1, |c| c.profile.len());
        check_params(band, n_radii, n_angular, r_max)?;
        let mut components: Vec<SphComponent> = (0..=band)
            .flat_map(|l| {
                (-(l as i32)..=l as i32).map(move |m| SphComponent {
                    l,
                    m,
                    profile: vec![Complex64::new(0.0, 0.0); n_radii],
                })
            })
            .collect();
        for p in profiles {
            if p.l > band || p.m.unsigned_abs() as usize > p.l {
                return Err(param("profiles", format!("(l, m) = ({}, {}) out of range", p.l, p.m)));
            }
            if p.profile.len() != n_radii {
                return Err(param("profiles", "profiles must share one length"));
            }
            let i = lm_index(p.l, p.m);
            components[i] = p;
        }
        Ok(SphFilter3 {
            band,
            n_radii,
            n_angular,
            r_max,
            components,
        })
    }

    /// Maximum degree.
    pub fn band(&self) -> usize {
        self.band
    }

    pub fn n_radii(&self) -> usize {
        self.n_radii
    }

    pub fn n_angular(&self) -> usize {
        self.n_angular
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn components(&self) -> &[SphComponent] {
        &self.components
    }

    pub fn component(&self, l: usize, m: i32) -> Option<&SphComponent> {
        if l > self.band || m.unsigned_abs() as usize > l {
            None
        } else {
            Some(&self.components[lm_index(l, m)])
        }
    }

    pub fn render_radius(&self) -> usize {
        self.r_max.ceil() as usize
    }

    /// `f_l^{m'}(r)` with linear interpolation between shells; inside the
    /// first shell degree 0 holds its value and higher degrees fade to zero.
    pub fn radial(&self, l: usize, mp: i32, r: f64) -> Complex64 {
        if r > self.r_max {
            return Complex64::new(0.0, 0.0);
        }
        let p = &self.components[lm_index(l, mp)].profile;
        let dr = self.r_max / self.n_radii as f64;
        let r0 = 0.5 * dr;
        if r < r0 {
            return if l == 0 { p[0] } else { p[0] * (r / r0) };
        }
        let t = (r / dr - 0.5).min((p.len() - 1) as f64);
        let j0 = t.floor() as usize;
        let j1 = (j0 + 1).min(p.len() - 1);
        let f = t - j0 as f64;
        p[j0] * (1.0 - f) + p[j1] * f
    }

    /// `f_l^{m'}(r)·Y_l^m(v̂)` at offset `v`.
    pub fn eval_pair(&self, l: usize, m: i32, mp: i32, v: [f64; 3]) -> Complex64 {
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        let radial = self.radial(l, mp, r);
        if radial == Complex64::new(0.0, 0.0) {
            return radial;
        }
        let (th, ph) = to_spherical(v);
        radial * sph_harm(l, m, th, ph)
    }

    /// Kernel `f_l^{m'}(r)·Y_l^m` on a `(2R+1)³` grid.
    pub fn render_pair(&self, l: usize, m: i32, mp: i32) -> Kernel3 {
        Kernel3::from_offsets(self.render_radius(), |x, y, z| {
            self.eval_pair(l, m, mp, [x as f64, y as f64, z as f64])
        })
    }

    /// Shell samples `Σ f_l^m(r_j) Y_l^m` on the analysis grid, shell-major.
    pub fn synthesize_shells(&self) -> Vec<Vec<Complex64>> {
        let grid = SphereGrid::new(self.n_angular);
        (0..self.n_radii)
            .map(|j| {
                let coeffs: Vec<Complex64> = self.components.iter().map(|c| c.profile[j]).collect();
                grid.synthesize(&coeffs, self.band)
            })
            .collect()
    }
}

/// Renders `Σ f_l^m(r) Y_l^m` for the selected `(l, m)` pairs (all when
/// `None`) on a centered `(2R+1)³` grid.
pub fn reconstruct3(filter: &SphFilter3, truncate_to: Option<&[(usize, i32)]>) -> Result<Field3> {
    reconstruct3_fine(filter, truncate_to, 1)
}

/// As [`reconstruct3`] with `factor` samples per voxel.
pub fn reconstruct3_fine(filter: &SphFilter3, truncate_to: Option<&[(usize, i32)]>, factor: usize) -> Result<Field3> {
    if factor == 0 {
        return Err(param("factor", "must be at least 1"));
    }
    if let Some(keep) = truncate_to {
        for &(l, m) in keep {
            if filter.component(l, m).is_none() {
                return Err(param("truncate_to", format!("(l, m) = ({l}, {m}) is not stored")));
            }
        }
    }
    let keep = |l: usize, m: i32| truncate_to.is_none_or(|k| k.contains(&(l, m)));
    let r = (filter.render_radius() * factor) as isize;
    let n = (2 * r + 1) as usize;
    let pitch = 1.0 / factor as f64;
    Ok(Field3::from_fn([n; 3], |x, y, z| {
        let v = [x, y, z].map(|i| (i as isize - r) as f64 * pitch);
        filter
            .components
            .iter()
            .filter(|c| keep(c.l, c.m))
            .map(|c| filter.eval_pair(c.l, c.m, c.m, v))
            .sum()
    }))
}
