//! Image gradients used as signal (magnitude) and frame field (direction).

use crate::error::{Error, Result};
use crate::field::Field2;
use crate::xform::XformField;

#[derive(Clone, Debug, PartialEq)]
pub struct GradientField {
    width: usize,
    height: usize,
    magnitude: Vec<f64>,
    direction: Vec<f64>,
}

impl GradientField {
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn magnitude(&self) -> &[f64] {
        &self.magnitude
    }

    /// Directions in radians from `atan2(gy, gx)`; zero where the magnitude is zero.
    pub fn direction(&self) -> &[f64] {
        &self.direction
    }

    pub fn magnitude_at(&self, x: usize, y: usize) -> f64 {
        self.magnitude[y * self.width + x]
    }

    pub fn direction_at(&self, x: usize, y: usize) -> f64 {
        self.direction[y * self.width + x]
    }

    pub fn magnitude_field(&self) -> Field2 {
        Field2::from_real(self.width, self.height, self.magnitude.clone()).expect("dims match by construction")
    }

    /// Rotation field whose angle at each pixel is the gradient direction.
    pub fn frame_field(&self) -> XformField {
        XformField::rotation2(self.width, self.height, self.direction.clone()).expect("dims match by construction")
    }
}

/// Central differences in the interior, one-sided differences at the borders.
pub fn gradient(image: &Field2) -> Result<GradientField> {
    if !image.is_real() {
        return Err(Error::NotReal("gradient"));
    }
    let (w, h) = image.dims();
    let v = |x: usize, y: usize| image.real_at(x, y);
    let mut magnitude = Vec::with_capacity(w * h);
    let mut direction = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let gx = diff(w, x, |i| v(i, y));
            let gy = diff(h, y, |j| v(x, j));
            let m = (gx * gx + gy * gy).sqrt();
            magnitude.push(m);
            direction.push(if m > 0.0 { gy.atan2(gx) } else { 0.0 });
        }
    }
    Ok(GradientField {
        width: w,
        height: h,
        magnitude,
        direction,
    })
}

fn diff(n: usize, i: usize, f: impl Fn(usize) -> f64) -> f64 {
    if n == 1 {
        0.0
    } else if i == 0 {
        f(1) - f(0)
    } else if i == n - 1 {
        f(n - 1) - f(n - 2)
    } else {
        0.5 * (f(i + 1) - f(i - 1))
    }
}
