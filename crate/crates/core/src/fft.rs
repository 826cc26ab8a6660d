//! Standard (stationary) correlation and convolution through the FFT.
//!
//! Kernels are small grids with an explicit origin; offsets are
//! `index - origin`. With [`Boundary::Zero`] the signal is zero-padded so the
//! result is the linear convolution cropped to the signal grid. With
//! [`Boundary::Periodic`] the signal wraps around.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::field::{Field2, Field3};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Boundary {
    #[default]
    Zero,
    Periodic,
}

/// A kernel sampled on a grid, origin at `origin`.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel2 {
    pub field: Field2,
    pub origin: (usize, usize),
}

impl Kernel2 {
    /// Odd square kernel of half-size `radius`, filled by `f(dx, dy)`.
    pub fn from_offsets(radius: usize, f: impl Fn(isize, isize) -> Complex64) -> Self {
        let n = 2 * radius + 1;
        let r = radius as isize;
        let field = Field2::from_fn(n, n, |x, y| f(x as isize - r, y as isize - r)).retag();
        Kernel2 {
            field,
            origin: (radius, radius),
        }
    }

    /// Value at offset `(dx, dy)`, zero outside.
    pub fn at(&self, dx: isize, dy: isize) -> Complex64 {
        self.field
            .get_or_zero(dx + self.origin.0 as isize, dy + self.origin.1 as isize)
    }

    /// `K'(d) = conj(K(-d))`, which turns a correlation into a convolution.
    pub fn adjoint(&self) -> Kernel2 {
        let (w, h) = self.field.dims();
        let field = Field2::from_fn(w, h, |x, y| self.field.get(w - 1 - x, h - 1 - y).conj()).retag();
        Kernel2 {
            field,
            origin: (w - 1 - self.origin.0, h - 1 - self.origin.1),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Kernel3 {
    pub field: Field3,
    pub origin: [usize; 3],
}

impl Kernel3 {
    pub fn from_offsets(radius: usize, f: impl Fn(isize, isize, isize) -> Complex64) -> Self {
        let n = 2 * radius + 1;
        let r = radius as isize;
        let field = Field3::from_fn([n, n, n], |x, y, z| f(x as isize - r, y as isize - r, z as isize - r));
        Kernel3 {
            field,
            origin: [radius; 3],
        }
    }

    pub fn adjoint(&self) -> Kernel3 {
        let [w, h, d] = self.field.dims();
        let field = Field3::from_fn([w, h, d], |x, y, z| {
            self.field.get(w - 1 - x, h - 1 - y, d - 1 - z).conj()
        });
        Kernel3 {
            field,
            origin: [w - 1 - self.origin[0], h - 1 - self.origin[1], d - 1 - self.origin[2]],
        }
    }
}

/// FFT-friendly size ≥ n (factors 2, 3, 5 only).
fn good_size(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut k = m;
        for p in [2, 3, 5] {
            while k.is_multiple_of(p) {
                k /= p;
            }
        }
        if k == 1 {
            return m;
        }
        m += 1;
    }
}

/// In-place multidimensional FFT over a row-major buffer, `dims[0]` fastest.
struct FftNd {
    dims: Vec<usize>,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
}

impl FftNd {
    fn new(dims: &[usize]) -> Self {
        let mut planner = FftPlanner::new();
        FftNd {
            dims: dims.to_vec(),
            forward: dims.iter().map(|&n| planner.plan_fft_forward(n)).collect(),
            inverse: dims.iter().map(|&n| planner.plan_fft_inverse(n)).collect(),
        }
    }

    fn len(&self) -> usize {
        self.dims.iter().product()
    }

    fn run(&self, buf: &mut [Complex64], inverse: bool) {
        let plans = if inverse { &self.inverse } else { &self.forward };
        let total = self.len();
        let mut stride = 1;
        for (axis, &n) in self.dims.iter().enumerate() {
            let plan = &plans[axis];
            if n > 1 {
                let mut line = vec![Complex64::new(0.0, 0.0); n];
                let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
                let block = stride * n;
                for base in (0..total).step_by(block) {
                    for offset in 0..stride {
                        let start = base + offset;
                        for (i, v) in line.iter_mut().enumerate() {
                            *v = buf[start + i * stride];
                        }
                        plan.process_with_scratch(&mut line, &mut scratch);
                        for (i, v) in line.iter().enumerate() {
                            buf[start + i * stride] = *v;
                        }
                    }
                }
            }
            stride *= n;
        }
        if inverse {
            let s = 1.0 / total as f64;
            buf.iter_mut().for_each(|v| *v *= s);
        }
    }
}

/// Signal spectrum cached for repeated convolutions against kernels whose
/// extents are bounded by the plan.
pub struct ConvPlan2 {
    width: usize,
    height: usize,
    pad: (usize, usize),
    /// Largest kernel extent `(left, right, up, down)` the padding supports.
    reach: (usize, usize, usize, usize),
    boundary: Boundary,
    fft: FftNd,
}

impl ConvPlan2 {
    /// Plans convolutions of a `width × height` signal with kernels whose
    /// support lies within `radius` of their origin.
    pub fn new(width: usize, height: usize, radius: usize, boundary: Boundary) -> Self {
        let pad = match boundary {
            Boundary::Zero => (good_size(width + 2 * radius), good_size(height + 2 * radius)),
            Boundary::Periodic => (width, height),
        };
        ConvPlan2 {
            width,
            height,
            pad,
            reach: (radius, radius, radius, radius),
            boundary,
            fft: FftNd::new(&[pad.0, pad.1]),
        }
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// Forward transform of a signal laid out on the padded grid.
    pub fn signal_spectrum(&self, signal: &Field2) -> Vec<Complex64> {
        assert_eq!(signal.dims(), (self.width, self.height));
        let (pw, _) = self.pad;
        let mut buf = vec![Complex64::new(0.0, 0.0); self.fft.len()];
        for y in 0..self.height {
            for x in 0..self.width {
                buf[y * pw + x] = signal.get(x, y);
            }
        }
        self.fft.run(&mut buf, false);
        buf
    }

    pub fn kernel_spectrum(&self, kernel: &Kernel2) -> Vec<Complex64> {
        let (pw, ph) = self.pad;
        let (kw, kh) = kernel.field.dims();
        if self.boundary == Boundary::Zero {
            let (ox, oy) = kernel.origin;
            assert!(
                ox <= self.reach.0 && kw - 1 - ox <= self.reach.1,
                "kernel wider than planned"
            );
            assert!(
                oy <= self.reach.2 && kh - 1 - oy <= self.reach.3,
                "kernel taller than planned"
            );
        }
        let mut buf = vec![Complex64::new(0.0, 0.0); self.fft.len()];
        for y in 0..kh {
            for x in 0..kw {
                let v = kernel.field.get(x, y);
                if v == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let dx = (x as isize - kernel.origin.0 as isize).rem_euclid(pw as isize) as usize;
                let dy = (y as isize - kernel.origin.1 as isize).rem_euclid(ph as isize) as usize;
                buf[dy * pw + dx] += v;
            }
        }
        self.fft.run(&mut buf, false);
        buf
    }

    /// `out(p) = Σ_d K(d)·H(p - d)` from precomputed spectra.
    pub fn convolve_spectra(&self, signal: &[Complex64], kernel: &[Complex64]) -> Field2 {
        let mut buf: Vec<Complex64> = signal.iter().zip(kernel).map(|(a, b)| a * b).collect();
        self.fft.run(&mut buf, true);
        let (pw, _) = self.pad;
        Field2::from_fn(self.width, self.height, |x, y| buf[y * pw + x])
    }

    pub fn convolve(&self, signal: &Field2, kernel: &Kernel2) -> Field2 {
        self.convolve_spectra(&self.signal_spectrum(signal), &self.kernel_spectrum(kernel))
    }

    /// `out(p) = Σ_q H(q)·conj(K(q - p))`.
    pub fn correlate(&self, signal: &Field2, kernel: &Kernel2) -> Field2 {
        self.convolve(signal, &kernel.adjoint())
    }
}

/// One-shot linear convolution with zero padding.
pub fn convolve2(signal: &Field2, kernel: &Kernel2) -> Field2 {
    let r = kernel_radius2(kernel);
    ConvPlan2::new(signal.width(), signal.height(), r, Boundary::Zero).convolve(signal, kernel)
}

/// One-shot linear correlation with zero padding.
pub fn correlate2(signal: &Field2, kernel: &Kernel2) -> Field2 {
    let r = kernel_radius2(kernel);
    ConvPlan2::new(signal.width(), signal.height(), r, Boundary::Zero).correlate(signal, kernel)
}

pub(crate) fn kernel_radius2(k: &Kernel2) -> usize {
    let (w, h) = k.field.dims();
    let (ox, oy) = k.origin;
    ox.max(w - 1 - ox).max(oy).max(h - 1 - oy)
}

pub struct ConvPlan3 {
    dims: [usize; 3],
    pad: [usize; 3],
    radius: usize,
    boundary: Boundary,
    fft: FftNd,
}

impl ConvPlan3 {
    pub fn new(dims: [usize; 3], radius: usize, boundary: Boundary) -> Self {
        let pad = match boundary {
            Boundary::Zero => dims.map(|n| good_size(n + 2 * radius)),
            Boundary::Periodic => dims,
        };
        ConvPlan3 {
            dims,
            pad,
            radius,
            boundary,
            fft: FftNd::new(&pad),
        }
    }

    fn idx(&self, x: usize, y: usize, z: usize) -> usize {
        (z * self.pad[1] + y) * self.pad[0] + x
    }

    pub fn signal_spectrum(&self, signal: &Field3) -> Vec<Complex64> {
        assert_eq!(signal.dims(), self.dims);
        let mut buf = vec![Complex64::new(0.0, 0.0); self.fft.len()];
        let [nx, ny, nz] = self.dims;
        for z in 0..nz {
            for y in 0..ny {
                for x in 0..nx {
                    buf[self.idx(x, y, z)] = signal.get(x, y, z);
                }
            }
        }
        self.fft.run(&mut buf, false);
        buf
    }

    pub fn kernel_spectrum(&self, kernel: &Kernel3) -> Vec<Complex64> {
        let [kw, kh, kd] = kernel.field.dims();
        if self.boundary == Boundary::Zero {
            for a in 0..3 {
                let o = kernel.origin[a];
                let n = [kw, kh, kd][a];
                assert!(o <= self.radius && n - 1 - o <= self.radius, "kernel exceeds plan");
            }
        }
        let mut buf = vec![Complex64::new(0.0, 0.0); self.fft.len()];
        for z in 0..kd {
            for y in 0..kh {
                for x in 0..kw {
                    let v = kernel.field.get(x, y, z);
                    if v == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    let w = |i: usize, a: usize| {
                        (i as isize - kernel.origin[a] as isize).rem_euclid(self.pad[a] as isize) as usize
                    };
                    let i = self.idx(w(x, 0), w(y, 1), w(z, 2));
                    buf[i] += v;
                }
            }
        }
        self.fft.run(&mut buf, false);
        buf
    }

    pub fn convolve_spectra(&self, signal: &[Complex64], kernel: &[Complex64]) -> Field3 {
        let mut buf: Vec<Complex64> = signal.iter().zip(kernel).map(|(a, b)| a * b).collect();
        self.fft.run(&mut buf, true);
        Field3::from_fn(self.dims, |x, y, z| buf[self.idx(x, y, z)])
    }

    pub fn convolve(&self, signal: &Field3, kernel: &Kernel3) -> Field3 {
        self.convolve_spectra(&self.signal_spectrum(signal), &self.kernel_spectrum(kernel))
    }

    pub fn correlate(&self, signal: &Field3, kernel: &Kernel3) -> Field3 {
        self.convolve(signal, &kernel.adjoint())
    }
}
