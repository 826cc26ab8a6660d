//! Dense complex grids in two and three dimensions.
//!
//! Index `(0, 0)` is the top-left sample, `x` grows rightward and `y`
//! downward; angles are measured with `atan2(y, x)` in that frame. Real
//! fields are stored as complex values with an exact zero imaginary part and
//! carry a tag so operations that require real input can check it cheaply.

use num_complex::Complex64;

use crate::error::{param, Error, Result};

/// Complex (or real-tagged) 2D grid, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Field2 {
    width: usize,
    height: usize,
    data: Vec<Complex64>,
    real: bool,
}

impl Field2 {
    pub fn zeros(width: usize, height: usize) -> Self {
        assert!(width >= 1 && height >= 1, "field dimensions must be positive");
        Field2 {
            width,
            height,
            data: vec![Complex64::new(0.0, 0.0); width * height],
            real: true,
        }
    }

    pub fn from_real(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        check_dims2(width, height, values.len())?;
        Ok(Field2 {
            width,
            height,
            data: values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
            real: true,
        })
    }

    pub fn from_complex(width: usize, height: usize, values: Vec<Complex64>) -> Result<Self> {
        check_dims2(width, height, values.len())?;
        Ok(Field2 {
            width,
            height,
            data: values,
            real: false,
        })
    }

    pub fn from_fn_real(width: usize, height: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut out = Field2::zeros(width, height);
        for y in 0..height {
            for x in 0..width {
                out.data[y * width + x] = Complex64::new(f(x, y), 0.0);
            }
        }
        out
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut out = Field2::zeros(width, height);
        out.real = false;
        for y in 0..height {
            for x in 0..width {
                out.data[y * width + x] = f(x, y);
            }
        }
        out
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// True when the field is tagged real (imaginary parts are exactly zero).
    #[inline]
    pub fn is_real(&self) -> bool {
        self.real
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Complex64 {
        self.data[y * self.width + x]
    }

    /// Value at signed coordinates, zero outside the grid.
    #[inline]
    pub fn get_or_zero(&self, x: isize, y: isize) -> Complex64 {
        if x < 0 || y < 0 || x >= self.width as isize || y >= self.height as isize {
            Complex64::new(0.0, 0.0)
        } else {
            self.data[y as usize * self.width + x as usize]
        }
    }

    /// Writes a value; the real tag is dropped if the value has an imaginary part.
    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: Complex64) {
        if v.im != 0.0 {
            self.real = false;
        }
        self.data[y * self.width + x] = v;
    }

    #[inline]
    pub fn real_at(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x].re
    }

    pub fn values(&self) -> &[Complex64] {
        &self.data
    }

    /// Mutable access to the samples. The field is conservatively re-tagged as complex.
    pub fn values_mut(&mut self) -> &mut [Complex64] {
        self.real = false;
        &mut self.data
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.data
    }

    /// Real parts as a new real-tagged field.
    pub fn real_part(&self) -> Field2 {
        Field2 {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|v| Complex64::new(v.re, 0.0)).collect(),
            real: true,
        }
    }

    pub fn imag_part(&self) -> Field2 {
        Field2 {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|v| Complex64::new(v.im, 0.0)).collect(),
            real: true,
        }
    }

    pub fn real_values(&self) -> Vec<f64> {
        self.data.iter().map(|v| v.re).collect()
    }

    /// Re-tags the field as real when every imaginary part is exactly zero.
    pub fn retag(mut self) -> Self {
        self.real = self.data.iter().all(|v| v.im == 0.0);
        self
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Field2 {
        Field2 {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
            real: false,
        }
        .retag()
    }

    pub fn scale(&self, s: Complex64) -> Field2 {
        self.map(|v| v * s)
    }

    /// Pointwise `a·self + b·other`.
    pub fn axpby(&self, a: Complex64, other: &Field2, b: Complex64) -> Result<Field2> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch(format!(
                "{:?} vs {:?}",
                self.dims(),
                other.dims()
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&x, &y)| a * x + b * y)
            .collect();
        Ok(Field2 {
            width: self.width,
            height: self.height,
            data,
            real: false,
        }
        .retag())
    }

    pub fn norm_l2(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn sum(&self) -> Complex64 {
        self.data.iter().sum()
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.im.abs()))
    }

    /// Bilinear interpolation at continuous pixel coordinates; reads outside
    /// the grid are zero.
    pub fn bilinear(&self, x: f64, y: f64) -> Complex64 {
        let x0 = x.floor();
        let y0 = y.floor();
        let fx = x - x0;
        let fy = y - y0;
        let (ix, iy) = (x0 as isize, y0 as isize);
        let mut acc = Complex64::new(0.0, 0.0);
        for (dy, wy) in [(0isize, 1.0 - fy), (1, fy)] {
            if wy == 0.0 {
                continue;
            }
            for (dx, wx) in [(0isize, 1.0 - fx), (1, fx)] {
                if wx == 0.0 {
                    continue;
                }
                acc += self.get_or_zero(ix + dx, iy + dy) * (wx * wy);
            }
        }
        acc
    }

    /// Grid-exact rotation by a quarter turn: the sample at `(x, y)` moves to
    /// `(h - 1 - y, x)`, which is a +90° rotation in the y-down frame.
    pub fn rotate90(&self) -> Field2 {
        let (w, h) = self.dims();
        let mut data = vec![Complex64::new(0.0, 0.0); w * h];
        for y in 0..h {
            for x in 0..w {
                let (nx, ny) = (h - 1 - y, x);
                data[ny * h + nx] = self.data[y * w + x];
            }
        }
        Field2 {
            width: h,
            height: w,
            data,
            real: self.real,
        }
    }
}

fn check_dims2(width: usize, height: usize, len: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(param("dims", format!("{width}x{height} must be at least 1x1")));
    }
    if width * height != len {
        return Err(Error::DimensionMismatch(format!(
            "{width}x{height} grid needs {} samples, got {len}",
            width * height
        )));
    }
    Ok(())
}

/// Complex 3D grid, `x` fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct Field3 {
    dims: [usize; 3],
    data: Vec<Complex64>,
}

impl Field3 {
    pub fn zeros(dims: [usize; 3]) -> Self {
        assert!(dims.iter().all(|&d| d >= 1), "field dimensions must be positive");
        Field3 {
            dims,
            data: vec![Complex64::new(0.0, 0.0); dims[0] * dims[1] * dims[2]],
        }
    }

    pub fn from_values(dims: [usize; 3], values: Vec<Complex64>) -> Result<Self> {
        if dims.contains(&0) {
            return Err(param("dims", "volume dimensions must be positive"));
        }
        if dims[0] * dims[1] * dims[2] != values.len() {
            return Err(Error::DimensionMismatch(format!(
                "{dims:?} volume needs {} samples, got {}",
                dims[0] * dims[1] * dims[2],
                values.len()
            )));
        }
        Ok(Field3 { dims, data: values })
    }

    pub fn from_fn(dims: [usize; 3], f: impl Fn(usize, usize, usize) -> Complex64) -> Self {
        let mut out = Field3::zeros(dims);
        for z in 0..dims[2] {
            for y in 0..dims[1] {
                for x in 0..dims[0] {
                    out.data[(z * dims[1] + y) * dims[0] + x] = f(x, y, z);
                }
            }
        }
        out
    }

    #[inline]
    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize, z: usize) -> usize {
        (z * self.dims[1] + y) * self.dims[0] + x
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, z: usize) -> Complex64 {
        self.data[self.index(x, y, z)]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, z: usize, v: Complex64) {
        let i = self.index(x, y, z);
        self.data[i] = v;
    }

    #[inline]
    pub fn get_or_zero(&self, x: isize, y: isize, z: isize) -> Complex64 {
        let [nx, ny, nz] = self.dims;
        if x < 0 || y < 0 || z < 0 || x >= nx as isize || y >= ny as isize || z >= nz as isize {
            Complex64::new(0.0, 0.0)
        } else {
            self.data[self.index(x as usize, y as usize, z as usize)]
        }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.data
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn norm_l2(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Trilinear interpolation; reads outside the grid are zero.
    pub fn trilinear(&self, x: f64, y: f64, z: f64) -> Complex64 {
        let (x0, y0, z0) = (x.floor(), y.floor(), z.floor());
        let (fx, fy, fz) = (x - x0, y - y0, z - z0);
        let (ix, iy, iz) = (x0 as isize, y0 as isize, z0 as isize);
        let mut acc = Complex64::new(0.0, 0.0);
        for (dz, wz) in [(0isize, 1.0 - fz), (1, fz)] {
            if wz == 0.0 {
                continue;
            }
            for (dy, wy) in [(0isize, 1.0 - fy), (1, fy)] {
                if wy == 0.0 {
                    continue;
                }
                for (dx, wx) in [(0isize, 1.0 - fx), (1, fx)] {
                    if wx == 0.0 {
                        continue;
                    }
                    acc += self.get_or_zero(ix + dx, iy + dy, iz + dz) * (wx * wy * wz);
                }
            }
        }
        acc
    }
}

/// A 2D filter that can be sampled at continuous offsets from its origin.
///
/// Grids sample bilinearly through [`CenteredField`]; analytic filters are
/// plain closures `Fn(dx, dy) -> Complex64`.
pub trait FilterSource2 {
    fn sample(&self, dx: f64, dy: f64) -> Complex64;
}

impl<F: Fn(f64, f64) -> Complex64> FilterSource2 for F {
    fn sample(&self, dx: f64, dy: f64) -> Complex64 {
        self(dx, dy)
    }
}

/// A grid filter together with the pixel position of its origin. `pitch`
/// is the filter-space distance between grid samples (1 unless the filter
/// was rendered on a finer grid).
#[derive(Clone, Copy, Debug)]
pub struct CenteredField<'a> {
    pub field: &'a Field2,
    pub center: (f64, f64),
    pub pitch: f64,
}

impl<'a> CenteredField<'a> {
    pub fn new(field: &'a Field2, center: (f64, f64)) -> Self {
        CenteredField {
            field,
            center,
            pitch: 1.0,
        }
    }

    /// Origin at the middle sample, samples `pitch` apart.
    pub fn with_pitch(field: &'a Field2, pitch: f64) -> Self {
        CenteredField {
            pitch,
            ..CenteredField::centered(field)
        }
    }

    /// Origin at the middle sample of an odd-sized grid.
    pub fn centered(field: &'a Field2) -> Self {
        CenteredField {
            field,
            center: ((field.width() as f64 - 1.0) / 2.0, (field.height() as f64 - 1.0) / 2.0),
            pitch: 1.0,
        }
    }
}

impl FilterSource2 for CenteredField<'_> {
    fn sample(&self, dx: f64, dy: f64) -> Complex64 {
        self.field
            .bilinear(self.center.0 + dx / self.pitch, self.center.1 + dy / self.pitch)
    }
}

/// 3D analogue of [`FilterSource2`].
pub trait FilterSource3 {
    fn sample(&self, dx: f64, dy: f64, dz: f64) -> Complex64;
}

impl<F: Fn(f64, f64, f64) -> Complex64> FilterSource3 for F {
    fn sample(&self, dx: f64, dy: f64, dz: f64) -> Complex64 {
        self(dx, dy, dz)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CenteredVolume<'a> {
    pub field: &'a Field3,
    pub center: [f64; 3],
    pub pitch: f64,
}

impl<'a> CenteredVolume<'a> {
    /// Origin at the middle voxel, samples `pitch` apart.
    pub fn with_pitch(field: &'a Field3, pitch: f64) -> Self {
        let d = field.dims();
        CenteredVolume {
            field,
            center: d.map(|n| (n as f64 - 1.0) / 2.0),
            pitch,
        }
    }

    pub fn centered(field: &'a Field3) -> Self {
        CenteredVolume::with_pitch(field, 1.0)
    }
}

impl FilterSource3 for CenteredVolume<'_> {
    fn sample(&self, dx: f64, dy: f64, dz: f64) -> Complex64 {
        let p = self.pitch;
        self.field.trilinear(
            self.center[0] + dx / p,
            self.center[1] + dy / p,
            self.center[2] + dz / p,
        )
    }
}
