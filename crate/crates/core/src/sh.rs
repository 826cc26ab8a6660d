//! Spherical harmonics, shell quadrature and Wigner-D matrices.
//!
//! Harmonics are orthonormal and complex with the Condon–Shortley phase:
//! `Y_l^m(θ, φ) = N_l^m · P_l^m(cos θ) · e^{imφ}` where θ is the polar angle
//! from +z. Rotations act actively, `(R·f)(v) = f(R⁻¹v)`, and the Wigner
//! matrix is indexed so that `R·Y_l^{m'} = Σ_m D^l_{m,m'}(R) · Y_l^m`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::Result;
use crate::quat::Quaternion;

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Associated Legendre `P_l^m(x)` for `m ≥ 0`, Condon–Shortley phase included.
pub fn assoc_legendre(l: usize, m: usize, x: f64) -> f64 {
    if m > l {
        return 0.0;
    }
    let s = ((1.0 - x) * (1.0 + x)).max(0.0).sqrt();
    let mut pmm = 1.0;
    for i in 0..m {
        pmm *= -((2 * i + 1) as f64) * s;
    }
    if l == m {
        return pmm;
    }
    let mut pm1 = x * (2 * m + 1) as f64 * pmm;
    if l == m + 1 {
        return pm1;
    }
    let mut pll = 0.0;
    for ll in m + 2..=l {
        pll = (x * (2 * ll - 1) as f64 * pm1 - (ll + m - 1) as f64 * pmm) / (ll - m) as f64;
        pmm = pm1;
        pm1 = pll;
    }
    pll
}

/// `Y_l^m(θ, φ)` for `|m| ≤ l`.
pub fn sph_harm(l: usize, m: i32, theta: f64, phi: f64) -> Complex64 {
    let am = m.unsigned_abs() as usize;
    assert!(am <= l, "|m| must not exceed l");
    let norm = ((2 * l + 1) as f64 / (4.0 * PI) * factorial(l - am) / factorial(l + am)).sqrt();
    let y = Complex64::from_polar(norm * assoc_legendre(l, am, theta.cos()), am as f64 * phi);
    if m < 0 {
        let sign = if am.is_multiple_of(2) { 1.0 } else { -1.0 };
        y.conj() * sign
    } else {
        y
    }
}

/// Flat index of `(l, m)` in degree-major order: `l² + l + m`.
pub fn lm_index(l: usize, m: i32) -> usize {
    ((l * l + l) as i64 + m as i64) as usize
}

/// Fejér's first rule on `x = cos θ` at midpoint nodes `θ_i = (i + ½)π/n`:
/// weights for `∫_{-1}^{1} g(x) dx`, exact for polynomials of degree `< n`.
pub fn fejer_weights(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let th = (i as f64 + 0.5) * PI / n as f64;
            let s: f64 = (1..=n / 2)
                .map(|k| (2.0 * k as f64 * th).cos() / (4.0 * (k * k) as f64 - 1.0))
                .sum();
            2.0 / n as f64 * (1.0 - 2.0 * s)
        })
        .collect()
}

/// Equiangular sampling of the unit sphere with its quadrature weights.
#[derive(Clone, Debug)]
pub struct SphereGrid {
    n: usize,
    thetas: Vec<f64>,
    weights: Vec<f64>,
}

impl SphereGrid {
    /// `n` polar nodes × `n` azimuth nodes; exact for degree `≤ 2·lmax` when
    /// `n ≥ 2(lmax + 1)`.
    pub fn new(n: usize) -> Self {
        let thetas = (0..n).map(|i| (i as f64 + 0.5) * PI / n as f64).collect();
        let dphi = 2.0 * PI / n as f64;
        let weights = fejer_weights(n).into_iter().map(|w| w * dphi).collect();
        SphereGrid { n, thetas, weights }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `(θ, φ, weight)` of node `i·n + j`.
    pub fn node(&self, idx: usize) -> (f64, f64, f64) {
        let (i, j) = (idx / self.n, idx % self.n);
        (self.thetas[i], 2.0 * PI * j as f64 / self.n as f64, self.weights[i])
    }

    pub fn direction(&self, idx: usize) -> [f64; 3] {
        let (th, ph, _) = self.node(idx);
        let (st, ct) = th.sin_cos();
        let (sp, cp) = ph.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// Projects samples (node order) onto `Y_l^m`, `l ≤ lmax`, degree-major.
    pub fn analyze(&self, samples: &[Complex64], lmax: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); (lmax + 1) * (lmax + 1)];
        for (idx, &v) in samples.iter().enumerate() {
            if v == Complex64::new(0.0, 0.0) {
                continue;
            }
            let (th, ph, w) = self.node(idx);
            for l in 0..=lmax {
                for m in -(l as i32)..=l as i32 {
                    out[lm_index(l, m)] += v * sph_harm(l, m, th, ph).conj() * w;
                }
            }
        }
        out
    }

    /// Evaluates `Σ c_l^m Y_l^m` at every node.
    pub fn synthesize(&self, coeffs: &[Complex64], lmax: usize) -> Vec<Complex64> {
        (0..self.len())
            .map(|idx| {
                let (th, ph, _) = self.node(idx);
                let mut acc = Complex64::new(0.0, 0.0);
                for l in 0..=lmax {
                    for m in -(l as i32)..=l as i32 {
                        acc += coeffs[lm_index(l, m)] * sph_harm(l, m, th, ph);
                    }
                }
                acc
            })
            .collect()
    }
}

/// Converts a direction to `(θ, φ)`; the origin maps to `(0, 0)`.
pub fn to_spherical(v: [f64; 3]) -> (f64, f64) {
    let rxy = v[0].hypot(v[1]);
    (rxy.atan2(v[2]), v[1].atan2(v[0]))
}

/// Wigner small-d `d^l_{m',m}(β)` by the explicit factorial sum.
pub fn wigner_small_d(l: usize, mp: i32, m: i32, beta: f64) -> f64 {
    let j = l as i32;
    let (c, s) = ((beta / 2.0).cos(), (beta / 2.0).sin());
    let pre = (factorial((j + mp) as usize)
        * factorial((j - mp) as usize)
        * factorial((j + m) as usize)
        * factorial((j - m) as usize))
    .sqrt();
    let lo = 0.max(m - mp);
    let hi = (j + m).min(j - mp);
    let mut acc = 0.0;
    for k in lo..=hi {
        let den = factorial((j + m - k) as usize)
            * factorial(k as usize)
            * factorial((mp - m + k) as usize)
            * factorial((j - mp - k) as usize);
        let sign = if (mp - m + k) % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * c.powi(2 * j + m - mp - 2 * k) * s.powi(mp - m + 2 * k) / den;
    }
    pre * acc
}

/// `(2l+1)²` Wigner matrix of one degree, rows and columns indexed by
/// `m + l`.
#[derive(Clone, Debug, PartialEq)]
pub struct WignerBlock {
    l: usize,
    data: Vec<Complex64>,
}

impl WignerBlock {
    pub fn degree(&self) -> usize {
        self.l
    }

    pub fn dim(&self) -> usize {
        2 * self.l + 1
    }

    /// `D^l_{m,m'}`.
    pub fn get(&self, m: i32, mp: i32) -> Complex64 {
        let l = self.l as i32;
        self.data[((m + l) * (2 * l + 1) + (mp + l)) as usize]
    }

    pub fn matmul(&self, other: &WignerBlock) -> WignerBlock {
        assert_eq!(self.l, other.l);
        let n = self.dim();
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = (0..n).map(|k| self.data[i * n + k] * other.data[k * n + j]).sum();
            }
        }
        WignerBlock { l: self.l, data }
    }

    pub fn adjoint(&self) -> WignerBlock {
        let n = self.dim();
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        WignerBlock { l: self.l, data }
    }

    /// Largest entrywise deviation from another block.
    pub fn max_diff(&self, other: &WignerBlock) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn identity(l: usize) -> WignerBlock {
        let n = 2 * l + 1;
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        WignerBlock { l, data }
    }
}

/// Wigner-D block of degree `l` for the rotation `q`.
///
/// With `R = Rz(α)·Ry(β)·Rz(γ)`, `D^l_{m,m'} = e^{-imα} d^l_{m,m'}(β) e^{-im'γ}`.
pub fn wigner_d(l: usize, q: Quaternion) -> Result<WignerBlock> {
    let q = q.checked_unit()?;
    Ok(wigner_d_unit(l, q))
}

pub(crate) fn wigner_d_unit(l: usize, q: Quaternion) -> WignerBlock {
    if q == Quaternion::IDENTITY {
        return WignerBlock::identity(l);
    }
    let (alpha, beta, gamma) = q.to_euler_zyz();
    let li = l as i32;
    let n = 2 * l + 1;
    let mut data = Vec::with_capacity(n * n);
    for m in -li..=li {
        for mp in -li..=li {
            let d = wigner_small_d(l, m, mp, beta);
            data.push(Complex64::from_polar(d, -(m as f64) * alpha - mp as f64 * gamma));
        }
    }
    WignerBlock { l, data }
}
