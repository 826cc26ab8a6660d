//! Built-in inputs, used when a command is run without input files. Every
//! draw comes from one ChaCha8 stream seeded by `--seed`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xconv::{Complex64, Field2, Field3, Quaternion};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform `[0, 1)` signal.
pub fn signal2(r: &mut ChaCha8Rng, w: usize, h: usize) -> Field2 {
    Field2::from_real(w, h, (0..w * h).map(|_| r.random::<f64>()).collect()).expect("dims")
}

pub fn signal3(r: &mut ChaCha8Rng, n: usize) -> Field3 {
    Field3::from_values(
        [n; 3],
        (0..n * n * n).map(|_| Complex64::new(r.random::<f64>(), 0.0)).collect(),
    )
    .expect("dims")
}

pub fn angles(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| r.random_range(-std::f64::consts::PI..std::f64::consts::PI))
        .collect()
}

/// Log-uniform in `[lo, hi]`.
pub fn scales(r: &mut ChaCha8Rng, n: usize, (lo, hi): (f64, f64)) -> Vec<f64> {
    (0..n).map(|_| r.random_range(lo.ln()..=hi.ln()).exp()).collect()
}

pub fn rotations(r: &mut ChaCha8Rng, n: usize) -> Vec<Quaternion> {
    (0..n)
        .map(|_| loop {
            let v: [f64; 4] = std::array::from_fn(|_| r.random_range(-1.0..1.0));
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.1 && norm <= 1.0 {
                break Quaternion::new(v[0] / norm, v[1] / norm, v[2] / norm, v[3] / norm);
            }
        })
        .collect()
}

/// Smooth anisotropic filter of radius `eps`: a cos² window times a
/// first- and second-harmonic modulation with random phases.
pub fn filter2(r: &mut ChaCha8Rng, eps: f64) -> impl Fn(f64, f64) -> Complex64 + Sync + Copy {
    let (a, b) = (r.random_range(0.3..1.0), r.random_range(0.3..1.0));
    let (t1, t2) = (r.random_range(0.0..6.3), r.random_range(0.0..6.3));
    let s = 0.45 * eps;
    move |x: f64, y: f64| {
        let rr = x.hypot(y);
        if rr >= eps {
            return Complex64::new(0.0, 0.0);
        }
        let w = (std::f64::consts::FRAC_PI_2 * rr / eps).cos().powi(2);
        let th = y.atan2(x);
        let u = rr / s;
        Complex64::new(
            w * (1.0 + a * (th - t1).cos() * u + b * (2.0 * (th - t2)).cos() * u * u),
            0.0,
        )
    }
}

/// Smooth 3D filter of radius `r_max` with degree ≤ 2 angular content.
pub fn filter3(r: &mut ChaCha8Rng, r_max: f64) -> impl Fn(f64, f64, f64) -> Complex64 + Sync + Copy {
    let c: [f64; 8] = std::array::from_fn(|_| r.random_range(-1.0..1.0));
    let s = 0.4 * r_max;
    move |x: f64, y: f64, z: f64| {
        let rr = (x * x + y * y + z * z).sqrt();
        if rr >= r_max {
            return Complex64::new(0.0, 0.0);
        }
        let w = (std::f64::consts::FRAC_PI_2 * rr / r_max).cos().powi(2);
        let (u, v, t) = (x / s, y / s, z / s);
        let p = 1.0
            + c[0] * u
            + c[1] * v
            + c[2] * t
            + c[3] * u * v
            + c[4] * v * t
            + c[5] * t * u
            + c[6] * (u * u - v * v)
            + c[7] * (2.0 * t * t - u * u - v * v) / 3.0;
        Complex64::new(w * p, 0.0)
    }
}
