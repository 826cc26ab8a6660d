mod common;

use common::*;
use rand::Rng;
use xconv::decomp::*;
use xconv::engine::*;
use xconv::fft::{convolve2, Boundary, ConvPlan3, Kernel2, Kernel3};
use xconv::{Complex64, Field2, Field3, Quaternion, XformField};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_angles(r: &mut rand_chacha::ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| r.random_range(-3.2..3.2)).collect()
}

#[test]
fn linear_in_the_signal() {
    let mut r = rng(1);
    let f = decompose_rotation2(&random_filter2(&mut r, 5.0), 12, 10, 24, 5.0).unwrap();
    let fs = decompose_scale2(&random_filter2(&mut r, 5.0), 16, 32, 16, ScaleWindow::for_support(5.0)).unwrap();
    let (h1, h2) = (random_field2(&mut r, 16, 14), random_field2(&mut r, 16, 14));
    let (a, b) = (c(0.7, -1.3), c(-2.0, 0.4));
    let mix = h1.axpby(a, &h2, b).unwrap();
    let t = XformField::rotation2(16, 14, random_angles(&mut r, 224)).unwrap();
    let sc: Vec<f64> = (0..224).map(|_| r.random_range(0.6..1.8)).collect();
    let ts = XformField::scale2(16, 14, sc).unwrap();
    for (t, f) in [(&t, &f), (&ts, &fs)] {
        for op in [xcorr_fast, xconv_fast] {
            let lhs = op(&mix, t, f).unwrap().output;
            let rhs = op(&h1, t, f)
                .unwrap()
                .output
                .axpby(a, &op(&h2, t, f).unwrap().output, b)
                .unwrap();
            assert!(rel2(&lhs, &rhs) < 1e-10);
        }
    }
}

#[test]
fn linear_in_the_filter_and_conjugate_linear_for_correlation() {
    let mut r = rng(2);
    let (g1, g2) = (random_filter2(&mut r, 5.0), random_filter2(&mut r, 5.0));
    let (a, b) = (c(1.1, 0.6), c(-0.3, 2.2));
    let mixed = move |x: f64, y: f64| a * g1(x, y) + b * g2(x, y);
    let dec = |s: &dyn xconv::FilterSource2| decompose_rotation2(s, 12, 10, 24, 5.0).unwrap();
    let (f1, f2, fm) = (dec(&g1), dec(&g2), dec(&mixed));
    let h = random_field2(&mut r, 15, 15);
    let t = XformField::rotation2(15, 15, random_angles(&mut r, 225)).unwrap();
    let conv = |f: &FreqFilter2| xconv_fast(&h, &t, f).unwrap().output;
    let corr = |f: &FreqFilter2| xcorr_fast(&h, &t, f).unwrap().output;
    let want = conv(&f1).axpby(a, &conv(&f2), b).unwrap();
    assert!(rel2(&conv(&fm), &want) < 1e-10);
    let want = corr(&f1).axpby(a.conj(), &corr(&f2), b.conj()).unwrap();
    assert!(rel2(&corr(&fm), &want) < 1e-10);
}

#[test]
fn periodic_translation_equivariance() {
    let mut r = rng(3);
    let (w, h) = (20, 16);
    let f = decompose_rotation2(&random_filter2(&mut r, 4.0), 8, 8, 16, 4.0).unwrap();
    let sig = random_field2(&mut r, w, h);
    let ang = random_angles(&mut r, w * h);
    let (sx, sy) = (7, 3);
    let shift = |x: usize, y: usize| ((x + w - sx) % w, (y + h - sy) % h);
    let sig2 = Field2::from_fn(w, h, |x, y| {
        let (u, v) = shift(x, y);
        sig.get(u, v)
    });
    let ang2: Vec<f64> = (0..w * h)
        .map(|i| {
            let (u, v) = shift(i % w, i / w);
            ang[v * w + u]
        })
        .collect();
    for mode in [Mode::Correlation, Mode::Convolution] {
        let plan = XConvPlan::for_filter(mode, &f).with_boundary(Boundary::Periodic);
        let a = extended(&sig, &XformField::rotation2(w, h, ang.clone()).unwrap(), &f, &plan)
            .unwrap()
            .output;
        let b = extended(&sig2, &XformField::rotation2(w, h, ang2.clone()).unwrap(), &f, &plan)
            .unwrap()
            .output;
        let moved = Field2::from_fn(w, h, |x, y| {
            let (u, v) = shift(x, y);
            a.get(u, v)
        });
        assert!(rel2(&b, &moved) < 1e-12, "{mode:?}");
    }
}

#[test]
fn real_signal_and_filter_give_real_output() {
    let mut r = rng(4);
    let src = random_filter2(&mut r, 6.0);
    let h = Field2::from_real(18, 18, (0..324).map(|_| r.random_range(-1.0..1.0)).collect()).unwrap();
    let t = XformField::rotation2(18, 18, random_angles(&mut r, 324)).unwrap();
    for band in [8, 24] {
        let f = decompose_rotation2(&src, band, 12, 24, 6.0).unwrap();
        for op in [xcorr_fast, xconv_fast] {
            let out = op(&h, &t, &f).unwrap().output;
            assert!(out.max_abs_imag() <= 1e-9 * out.norm_l2());
        }
    }
}

#[test]
fn unit_scale_is_standard_convolution() {
    let mut r = rng(5);
    let fs = decompose_scale2(&random_filter2(&mut r, 6.0), 32, 32, 24, ScaleWindow::for_support(6.0)).unwrap();
    let rec = reconstruct(&fs, None).unwrap();
    let rad = fs.render_radius();
    let k = Kernel2::from_offsets(rad, |x, y| {
        rec.get((x + rad as isize) as usize, (y + rad as isize) as usize)
    });
    let h = random_field2(&mut r, 20, 20);
    let t = XformField::constant_scale2(20, 20, 1.0).unwrap();
    assert!(rel2(&xconv_fast(&h, &t, &fs).unwrap().output, &convolve2(&h, &k)) < 1e-10);
}

#[test]
fn unit_scale_smoothing_is_normalized_blur() {
    let mut r = rng(6);
    let g = |x: f64, y: f64| c((-(x * x + y * y) / 8.0).exp(), 0.0);
    let fs = decompose_scale2(&g, 32, 32, 24, ScaleWindow::for_support(6.0)).unwrap();
    let rec = reconstruct(&fs, None).unwrap();
    let rad = fs.render_radius() as isize;
    let n = 24;
    let h = Field2::from_real(n, n, (0..n * n).map(|_| r.random_range(0.0..1.0)).collect()).unwrap();
    let out = smooth_adaptive(&h, &XformField::constant_scale2(n, n, 1.0).unwrap(), &fs)
        .unwrap()
        .output;
    let mut worst = 0.0f64;
    for y in 0..n as isize {
        for x in 0..n as isize {
            let (mut num, mut den) = (c(0.0, 0.0), c(0.0, 0.0));
            for dy in -rad..=rad {
                for dx in -rad..=rad {
                    let wgt = rec.get((dx + rad) as usize, (dy + rad) as usize);
                    let v = h.get_or_zero(x - dx, y - dy);
                    if x - dx >= 0 && y - dy >= 0 && x - dx < n as isize && y - dy < n as isize {
                        num += wgt * v;
                        den += wgt;
                    }
                }
            }
            worst = worst.max((out.get(x as usize, y as usize) - num / den).norm());
        }
    }
    assert!(worst < 1e-6, "{worst}");
}

#[test]
fn single_harmonic_constant_rotation() {
    let y10 = (3.0 / (4.0 * std::f64::consts::PI)).sqrt();
    let g = |r: f64| {
        if r < 5.0 {
            r * (-r * r / 4.0).exp() * (std::f64::consts::PI * r / 10.0).cos().powi(2)
        } else {
            0.0
        }
    };
    let src = move |x: f64, y: f64, z: f64| {
        c(g((x * x + y * y + z * z).sqrt()) * y10 * z, 0.0)
            * if x == 0.0 && y == 0.0 && z == 0.0 {
                0.0
            } else {
                1.0 / (x * x + y * y + z * z).sqrt()
            }
    };
    let f = decompose_rotation3(&src, 1, 80, 8, 5.0).unwrap();
    for comp in f.components() {
        if (comp.l, comp.m) != (1, 0) {
            assert!(comp.profile.iter().all(|v| v.norm() < 1e-10));
        }
    }
    let q = Quaternion::from_axis_angle([0.3, -0.5, 0.8], 1.1);
    let dims = [12; 3];
    let mut r = rng(7);
    let h = Field3::from_values(dims, (0..1728).map(|_| c(r.random_range(-1.0..1.0), 0.0)).collect()).unwrap();
    let got = xcorr_fast3(&h, &XformField::constant_rotation3(dims, q).unwrap(), &f)
        .unwrap()
        .output;
    let inv = q.conj();
    let rad = f.render_radius();
    let kernel = Kernel3::from_offsets(rad, |x, y, z| {
        let v = inv.rotate([x as f64, y as f64, z as f64]);
        src(v[0], v[1], v[2])
    });
    let want = ConvPlan3::new(dims, rad, Boundary::Zero).correlate(&h, &kernel);
    assert!(rel3(&got, &want) < 1e-3, "{}", rel3(&got, &want));
}

#[test]
fn three_dimensional_identity_matches_reconstruction() {
    let mut r = rng(8);
    let src = random_filter3(&mut r, 3.0);
    let f = decompose_rotation3(&src, 2, 6, 8, 3.0).unwrap();
    let dims = [9, 8, 7];
    let h = Field3::from_fn(dims, |x, y, z| c((x * 3 + y * 5 + z * 7) as f64 % 4.0, 0.0));
    let t = XformField::constant_rotation3(dims, Quaternion::IDENTITY).unwrap();
    let rad = f.render_radius();
    let rec = reconstruct3(&f, None).unwrap();
    let kernel = Kernel3::from_offsets(rad, |x, y, z| {
        rec.get(
            (x + rad as isize) as usize,
            (y + rad as isize) as usize,
            (z + rad as isize) as usize,
        )
    });
    let plan = ConvPlan3::new(dims, rad, Boundary::Zero);
    assert!(rel3(&xcorr_fast3(&h, &t, &f).unwrap().output, &plan.correlate(&h, &kernel)) < 1e-6);
    assert!(rel3(&xconv_fast3(&h, &t, &f).unwrap().output, &plan.convolve(&h, &kernel)) < 1e-6);
}

#[test]
fn group_mismatch_is_rejected() {
    let mut r = rng(9);
    let f = decompose_rotation2(&random_filter2(&mut r, 4.0), 4, 4, 16, 4.0).unwrap();
    let h = random_field2(&mut r, 8, 8);
    let ts = XformField::constant_scale2(8, 8, 1.5).unwrap();
    assert!(xconv_fast(&h, &ts, &f).is_err());
    let t = XformField::constant_rotation2(9, 8, 0.0);
    assert!(xcorr_fast(&h, &t, &f).is_err());
}
