//! Acceptance criteria, one PASS/FAIL line each.

mod common;

use std::io::Write;
use std::time::{Duration, Instant};

use common::*;
use rand::Rng;
use xconv::apps::contour::{match_contours, ContourMatch, ContourScene, CONTOUR_SIGMA};
use xconv::apps::ecd::{ecd, Harness};
use xconv::apps::filters::{checkerboard_scales, gaussian};
use xconv::apps::lic::{lic, orientation_gap, streak_orientation};
use xconv::apps::vote::{build_optimal_filter, detect_pattern, self_response, VoteFilter};
use xconv::decomp::*;
use xconv::engine::*;
use xconv::fft::{convolve2, correlate2, Kernel2};
use xconv::sh::{wigner_d, WignerBlock};
use xconv::{CenteredField, CenteredVolume, Complex64, Field2, Field3, FilterSource2, XformField};

/// Mean precision at rank 1 of the synthetic ECD harness, frozen at the
/// first build.
const ECD_BASELINE: f64 = 0.95;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn oracle_rotation2() -> Outcome {
    let mut r = rng(2024);
    let mut worst = [0.0f64; 4];
    for _ in 0..20 {
        let src = random_filter2(&mut r, 8.0);
        let f = decompose_rotation2(&src, 32, 16, 32, 8.0).unwrap();
        let h = random_field2(&mut r, 24, 24);
        let ang: Vec<f64> = (0..576).map(|_| r.random_range(-3.2..3.2)).collect();
        let t = XformField::rotation2(24, 24, ang).unwrap();
        let rec = reconstruct_fine(&f, None, 2).unwrap();
        let src2 = CenteredField::with_pitch(&rec, 0.5);
        let reach = f.render_radius() as f64;
        let fc = xcorr_fast(&h, &t, &f).unwrap().output;
        let fv = xconv_fast(&h, &t, &f).unwrap().output;
        let e = [
            rel2(&fc, &xcorr_brute(&h, &t, &src2, reach).unwrap().output),
            rel2(&fv, &xconv_brute(&h, &t, &src2, reach).unwrap().output),
            rel2(&fc, &xcorr_spectral(&h, &t, &f).unwrap().output),
            rel2(&fv, &xconv_spectral(&h, &t, &f).unwrap().output),
        ];
        for i in 0..4 {
            worst[i] = worst[i].max(e[i]);
        }
    }
    let pass = worst[0].max(worst[1]) <= 3e-3 && worst[2].max(worst[3]) <= 1e-8;
    outcome(
        pass,
        format!(
            "20 instances; bilinear corr {:.2e} conv {:.2e} (<= 3e-3); spectral {:.1e} {:.1e} (<= 1e-8)",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

fn oracle_scale2() -> Outcome {
    let mut r = rng(2025);
    let mut worst = [0.0f64; 4];
    let (lo, hi) = ScaleWindow::for_support(8.0).guard_band();
    for _ in 0..20 {
        let src = random_filter2(&mut r, 8.0);
        let f = decompose_scale2(&src, 64, 64, 32, ScaleWindow::for_support(8.0)).unwrap();
        let h = random_field2(&mut r, 24, 24);
        let sc: Vec<f64> = (0..576).map(|_| r.random_range(lo.ln()..hi.ln()).exp()).collect();
        let t = XformField::scale2(24, 24, sc).unwrap();
        let rec = reconstruct_fine(&f, None, 2).unwrap();
        let src2 = CenteredField::with_pitch(&rec, 0.5);
        let reach = f.render_radius() as f64;
        let fc = xcorr_fast(&h, &t, &f).unwrap().output;
        let fv = xconv_fast(&h, &t, &f).unwrap().output;
        let e = [
            rel2(&fc, &xcorr_brute(&h, &t, &src2, reach).unwrap().output),
            rel2(&fv, &xconv_brute(&h, &t, &src2, reach).unwrap().output),
            rel2(&fc, &xcorr_spectral(&h, &t, &f).unwrap().output),
            rel2(&fv, &xconv_spectral(&h, &t, &f).unwrap().output),
        ];
        for i in 0..4 {
            worst[i] = worst[i].max(e[i]);
        }
    }
    let pass = worst[0].max(worst[1]) <= 3e-3;
    outcome(
        pass,
        format!(
            "20 instances, s in [{lo}, {hi}]; bilinear corr {:.2e} conv {:.2e} (<= 3e-3); spectral {:.1e} {:.1e}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

fn oracle_rotation3() -> Outcome {
    let mut r = rng(2026);
    let dims = [16; 3];
    let mut worst = [0.0f64; 2];
    for _ in 0..5 {
        let src = random_filter3(&mut r, 6.0);
        let f = decompose_rotation3(&src, 2, 16, 8, 6.0).unwrap();
        let mut h = Field3::zeros(dims);
        for v in h.values_mut() {
            *v = Complex64::new(r.random_range(0.0..1.0), 0.0);
        }
        let qs = (0..4096).map(|_| random_rotation(&mut r)).collect();
        let t = XformField::rotation3(dims, qs).unwrap();
        let rec = reconstruct3_fine(&f, None, 3).unwrap();
        let src3 = CenteredVolume::with_pitch(&rec, 1.0 / 3.0);
        let reach = f.render_radius() as f64;
        worst[0] = worst[0].max(rel3(
            &xcorr_fast3(&h, &t, &f).unwrap().output,
            &xcorr_brute3(&h, &t, &src3, reach).unwrap().output,
        ));
        worst[1] = worst[1].max(rel3(
            &xconv_fast3(&h, &t, &f).unwrap().output,
            &xconv_brute3(&h, &t, &src3, reach).unwrap().output,
        ));
    }
    let (mut unit, mut hom) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let (a, b) = (random_rotation(&mut r), random_rotation(&mut r));
        for l in 0..=4 {
            let (da, db) = (wigner_d(l, a).unwrap(), wigner_d(l, b).unwrap());
            unit = unit.max(da.matmul(&da.adjoint()).max_diff(&WignerBlock::identity(l)));
            hom = hom.max(wigner_d(l, a * b).unwrap().max_diff(&da.matmul(&db)));
        }
    }
    let pass = worst[0].max(worst[1]) <= 3e-3 && unit <= 1e-10 && hom <= 1e-10;
    outcome(
        pass,
        format!(
            "16^3, K=2, 5 instances: corr {:.2e} conv {:.2e} (<= 3e-3); Wigner unitarity {unit:.1e}, homomorphism {hom:.1e} (<= 1e-10)",
            worst[0], worst[1]
        ),
    )
}

fn bookkeeping() -> Outcome {
    let mut r = rng(7);
    let mut bad = Vec::new();
    let src = random_filter2(&mut r, 4.0);
    let h = random_field2(&mut r, 10, 10);
    let t = XformField::rotation2(10, 10, (0..100).map(|i| i as f64 * 0.1).collect()).unwrap();
    let src3 = random_filter3(&mut r, 2.0);
    let h3 = Field3::from_fn([4; 3], |x, y, z| Complex64::new((x + 2 * y + 3 * z) as f64, 0.0));
    let t3 = XformField::rotation3([4; 3], (0..64).map(|_| random_rotation(&mut r)).collect()).unwrap();
    for k in [0usize, 2, 4, 8] {
        let f = decompose_rotation2(&src, k, 4, 16, 4.0).unwrap();
        let want = 2 * (k / 2) + 1;
        for got in [
            xcorr_fast(&h, &t, &f).unwrap().convolutions,
            xconv_fast(&h, &t, &f).unwrap().convolutions,
        ] {
            if got != want {
                bad.push(format!("2D K={k}: {got} != {want}"));
            }
        }
        let f3 = decompose_rotation3(&src3, k, 2, 2 * (k + 1), 2.0).unwrap();
        let want3: usize = (0..=k).map(|l| (2 * l + 1) * (2 * l + 1)).sum();
        for got in [
            xcorr_fast3(&h3, &t3, &f3).unwrap().convolutions,
            xconv_fast3(&h3, &t3, &f3).unwrap().convolutions,
        ] {
            if got != want3 {
                bad.push(format!("3D K={k}: {got} != {want3}"));
            }
        }
    }
    let pass = bad.is_empty();
    outcome(
        pass,
        if pass {
            "2D 1/3/5/9 and 3D 1/35/165/969 convolutions for K = 0/2/4/8".into()
        } else {
            bad.join("; ")
        },
    )
}

/// The retained components evaluated at continuous offsets.
struct Exact<'a>(&'a FreqFilter2);

impl FilterSource2 for Exact<'_> {
    fn sample(&self, x: f64, y: f64) -> Complex64 {
        self.0.components().iter().map(|c| self.0.eval_component(c, x, y)).sum()
    }
}

fn stationary() -> Outcome {
    let mut r = rng(8);
    let src = random_filter2(&mut r, 8.0);
    let h = random_field2(&mut r, 24, 24);
    let (w, hh) = (24, 24);
    let fr = decompose_rotation2(&src, 32, 16, 32, 8.0).unwrap();
    let fs = decompose_scale2(&src, 64, 64, 32, ScaleWindow::for_support(8.0)).unwrap();
    let (sr, ss) = (Exact(&fr), Exact(&fs));
    let mut worst = 0.0f64;
    let check = |t: &XformField, f: &FreqFilter2, k: &Kernel2| {
        let a = rel2(&xcorr_fast(&h, t, f).unwrap().output, &correlate2(&h, k));
        let b = rel2(&xconv_fast(&h, t, f).unwrap().output, &convolve2(&h, k));
        a.max(b)
    };
    for theta in [0.7f64, -2.3] {
        let (s, c) = theta.sin_cos();
        let k = warped_kernel(&sr, fr.render_radius(), |x, y| (c * x + s * y, -s * x + c * y));
        worst = worst.max(check(&XformField::constant_rotation2(w, hh, theta), &fr, &k));
    }
    for sc in [0.6f64, 1.7] {
        let k = warped_kernel(&ss, fs.render_radius(), |x, y| (x / sc, y / sc));
        worst = worst.max(check(&XformField::constant_scale2(w, hh, sc).unwrap(), &fs, &k));
    }
    let id_r = Kernel2::from_offsets(fr.render_radius(), |x, y| {
        let f = reconstruct(&fr, None).unwrap();
        let c = fr.render_radius() as isize;
        f.get((x + c) as usize, (y + c) as usize)
    });
    let rec1 = reconstruct(&fs, None).unwrap();
    let c = fs.render_radius() as isize;
    let id_s = Kernel2::from_offsets(fs.render_radius(), |x, y| rec1.get((x + c) as usize, (y + c) as usize));
    let ident = check(&XformField::constant_rotation2(w, hh, 0.0), &fr, &id_r).max(check(
        &XformField::constant_scale2(w, hh, 1.0).unwrap(),
        &fs,
        &id_s,
    ));
    let pass = worst <= 1e-3 && ident <= 1e-6;
    outcome(
        pass,
        format!("constant rotation/scale {worst:.2e} (<= 1e-3); identity {ident:.1e} (<= 1e-6)"),
    )
}

fn delta_response() -> Outcome {
    let mut r = rng(9);
    let src = random_filter2(&mut r, 8.0);
    let n = 25;
    let q0 = (12usize, 12usize);
    let mut h = Field2::zeros(n, n);
    h.set(q0.0, q0.1, Complex64::new(1.0, 0.0));
    let h = h.retag();
    let fr = decompose_rotation2(&src, 32, 16, 32, 8.0).unwrap();
    let fs = decompose_scale2(&src, 64, 64, 32, ScaleWindow::for_support(8.0)).unwrap();
    let expect = |src: &Exact, warp: &dyn Fn(f64, f64) -> (f64, f64)| {
        Field2::from_fn(n, n, |x, y| {
            let (u, v) = warp(x as f64 - q0.0 as f64, y as f64 - q0.1 as f64);
            src.sample(u, v)
        })
    };
    let theta = r.random_range(-3.0..3.0);
    let angles: Vec<f64> = (0..n * n)
        .map(|i| {
            if i == q0.1 * n + q0.0 {
                theta
            } else {
                r.random_range(-3.0..3.0)
            }
        })
        .collect();
    let (s, c) = theta.sin_cos();
    let got = xconv_fast(&h, &XformField::rotation2(n, n, angles).unwrap(), &fr)
        .unwrap()
        .output;
    let e_rot = rel2(&got, &expect(&Exact(&fr), &|x, y| (c * x + s * y, -s * x + c * y)));
    let sc = 1.6;
    let scales: Vec<f64> = (0..n * n)
        .map(|i| {
            if i == q0.1 * n + q0.0 {
                sc
            } else {
                r.random_range(0.5..2.0)
            }
        })
        .collect();
    let got = xconv_fast(&h, &XformField::scale2(n, n, scales).unwrap(), &fs)
        .unwrap()
        .output;
    let e_sc = rel2(&got, &expect(&Exact(&fs), &|x, y| (x / sc, y / sc)));
    let pass = e_rot <= 1e-3 && e_sc <= 1e-3;
    outcome(pass, format!("rotation {e_rot:.2e}, scale {e_sc:.2e} (<= 1e-3)"))
}

fn truncation() -> Outcome {
    let mut r = rng(10);
    let grid = random_field2(&mut r, 16, 16);
    let f = decompose_rotation2(&CenteredField::centered(&grid), 6, 8, 32, 8.0).unwrap();
    let comps = f.components();
    assert_eq!(comps.len(), 7);
    let (nr, na) = (f.n_radii(), f.n_angles());
    let dr = f.r_max() / nr as f64;
    // Expected squared polar-L2 error over 64 rotations when keeping `mask`.
    let err = |mask: u32| {
        let mut total = 0.0;
        for a in 0..64 {
            let th = 2.0 * std::f64::consts::PI * a as f64 / 64.0;
            for j in 0..nr {
                let rj = (j as f64 + 0.5) * dr;
                for m in 0..na {
                    let phi = 2.0 * std::f64::consts::PI * m as f64 / na as f64;
                    let mut d = Complex64::new(0.0, 0.0);
                    for (i, c) in comps.iter().enumerate() {
                        if mask & (1 << i) == 0 {
                            d += c.profile[j] * Complex64::from_polar(1.0, c.k as f64 * (phi - th));
                        }
                    }
                    total += rj * d.norm_sqr();
                }
            }
        }
        total / 64.0
    };
    let errs: Vec<f64> = (0..128u32).map(err).collect();
    let order = f.by_energy();
    let mut failures = Vec::new();
    for m in 1..=6usize {
        let mask: u32 = order[..m]
            .iter()
            .map(|k| 1u32 << comps.iter().position(|c| c.k == *k).unwrap())
            .sum();
        let best = (0..128u32)
            .filter(|s| s.count_ones() as usize == m)
            .map(|s| errs[s as usize])
            .fold(f64::INFINITY, f64::min);
        if errs[mask as usize] > best * (1.0 + 1e-9) + 1e-12 {
            failures.push(m);
        }
    }
    let pass = failures.is_empty();
    outcome(
        pass,
        if pass {
            "largest-energy subset optimal for every m in 1..=6 (128 subsets, 64 rotations)".into()
        } else {
            format!("suboptimal for m = {failures:?}")
        },
    )
}

fn detection() -> Outcome {
    let t0 = Instant::now();
    let pattern = glyph_scene(41, 41, &[((20.0, 20.0), 0.0)]);
    let filter = build_optimal_filter(&pattern, (20.0, 20.0), 12.0).unwrap();
    let truth = [
        ((24.0, 26.0), 0.0),
        ((70.0, 28.0), 90f64.to_radians()),
        ((46.0, 70.0), 37f64.to_radians()),
    ];
    let image = glyph_scene(96, 96, &truth);
    let full = filter.default_angles();
    let d = detect_pattern(&image, &filter, full).unwrap();
    let mut hit = [false; 3];
    let mut located = d.peaks.len() >= 3;
    for p in d.peaks.iter().take(3) {
        match truth
            .iter()
            .position(|&((x, y), _)| (p.x as f64 - x).hypot(p.y as f64 - y) <= 2.0)
        {
            Some(i) if !hit[i] => hit[i] = true,
            _ => located = false,
        }
    }
    let max = d.peaks.first().map_or(0.0, |p| p.value);
    let spurious = d.peaks.iter().skip(3).map(|p| p.value / max).fold(0.0, f64::max);
    let errs: Vec<f64> = [2usize, 4, 8, 16]
        .iter()
        .map(|&k| rel2(&detect_pattern(&image, &filter, k).unwrap().response, &d.response))
        .collect();
    let monotone = errs.windows(2).all(|w| w[1] <= w[0]);
    let secs = t0.elapsed().as_secs_f64();
    let pass = located && spurious <= 0.7 && monotone && secs < 60.0;
    outcome(
        pass,
        format!(
            "top-3 on centers: {located}; next peak {spurious:.2}·max (<= 0.7); K-sweep errors {:.3?} monotone: {monotone}; {secs:.1}s",
            errs
        ),
    )
}

fn optimality() -> Outcome {
    let fixtures: Vec<(&str, Field2, (usize, usize), f64)> = vec![
        ("glyph", glyph_scene(41, 41, &[((20.0, 20.0), 0.0)]), (20, 20), 12.0),
        ("silhouette", silhouette(31, 15.0), (15, 15), 10.0),
        ("texture", random_field2(&mut rng(12), 25, 25), (12, 12), 7.0),
    ];
    let mut r = rng(13);
    let mut margins = Vec::new();
    let mut pass = true;
    for (name, pattern, p, eps) in &fixtures {
        let f = build_optimal_filter(pattern, (p.0 as f64, p.1 as f64), *eps).unwrap();
        let own = self_response(pattern, &f, *p).unwrap();
        let mut best: f64 = f64::NEG_INFINITY;
        for _ in 0..50 {
            let v: Vec<f64> = f.values().iter().map(|_| r.random_range(0.0..1.0)).collect();
            let s: f64 = v.iter().sum();
            let g = VoteFilter::from_grid(f.support(), v.iter().map(|x| x * f.mass() / s).collect()).unwrap();
            best = best.max(self_response(pattern, &g, *p).unwrap());
        }
        pass &= own > best;
        margins.push(format!("{name} {own:.3} vs {best:.3}"));
    }
    outcome(
        pass,
        format!("own vs best of 50 equal-mass random: {}", margins.join(", ")),
    )
}

fn descriptor() -> Outcome {
    let img = random_field2(&mut rng(14), 40, 40);
    let img = xconv::apps::filters::gaussian_blur(&img, 1.2);
    let a = ecd(&img, (18.0, 21.0), 7.0).unwrap();
    let b = ecd(&img.rotate90(), (39.0 - 21.0, 18.0), 7.0).unwrap();
    let gap = a.distance(&b);
    let res = Harness::default().run().unwrap();
    let p1 = res.curves.precision[0];
    let pass = a.values.len() == 225 && gap <= 0.05 && p1 >= ECD_BASELINE;
    outcome(
        pass,
        format!(
            "length {}; quarter-turn gap {gap:.1e} (<= 0.05); harness precision(1) {p1:.3} (baseline {ECD_BASELINE})",
            a.values.len()
        ),
    )
}

fn smoothing() -> Outcome {
    let mut r = rng(15);
    let (n, tile, eps, sigma) = (72usize, 24usize, 8.0f64, 2.0f64);
    let f = decompose_scale2(&gaussian(sigma), 64, 64, 32, ScaleWindow::for_support(eps)).unwrap();
    let flat = Field2::from_fn_real(40, 40, |_, _| 0.375);
    let sc: Vec<f64> = (0..1600)
        .map(|_| r.random_range(0.5f64.ln()..2f64.ln()).exp())
        .collect();
    let fixed = smooth_adaptive(&flat, &XformField::scale2(40, 40, sc).unwrap(), &f)
        .unwrap()
        .output
        .real_values()
        .iter()
        .map(|v| (v - 0.375).abs())
        .fold(0.0, f64::max);
    let h = random_field2(&mut r, n, n);
    let s = checkerboard_scales(n, n, tile, 1.0, 2.0).unwrap();
    let t = XformField::scale2(n, n, s.clone()).unwrap();
    let with = smooth_adaptive(&h, &t, &f).unwrap().output;
    let opts = SmoothOptions {
        normalize_signal: false,
        divide: true,
    };
    let without = smooth_adaptive_with(&h, &t, &f, opts).unwrap().output;
    let hv = h.real_values();
    let m = eps as usize;
    let (mut e1, mut e2, mut d) = (0.0, 0.0, 0.0);
    for y in 0..n {
        for x in 0..n {
            let (tx, ty) = (x % tile, y % tile);
            if tx < m || ty < m || tx >= tile - m || ty >= tile - m {
                continue;
            }
            let g = gaussian(sigma * s[y * n + x]);
            let rr = (eps * s[y * n + x]).ceil() as isize;
            let (mut num, mut den) = (0.0, 0.0);
            for dy in -rr..=rr {
                for dx in -rr..=rr {
                    let (qx, qy) = (x as isize + dx, y as isize + dy);
                    if qx >= 0 && qy >= 0 && qx < n as isize && qy < n as isize {
                        let w = g(dx as f64, dy as f64).re;
                        num += w * hv[qy as usize * n + qx as usize];
                        den += w;
                    }
                }
            }
            let want = num / den;
            e1 += (with.real_at(x, y) - want).powi(2);
            e2 += (without.real_at(x, y) - want).powi(2);
            d += want * want;
        }
    }
    let (e1, e2) = ((e1 / d).sqrt(), (e2 / d).sqrt());
    let pass = fixed <= 1e-6 && e1 <= 3e-3 && e2 > e1;
    outcome(
        pass,
        format!("fixed point {fixed:.1e} (<= 1e-6); tile interiors {e1:.2e} (<= 3e-3), without signal normalization {e2:.2e}"),
    )
}

fn lic_criterion() -> Outcome {
    let n = 128;
    let c = (n as f64 - 1.0) / 2.0;
    let ang: Vec<f64> = (0..n * n)
        .map(|i| {
            let (x, y) = ((i % n) as f64 - c, (i / n) as f64 - c);
            y.atan2(x) + std::f64::consts::FRAC_PI_2
        })
        .collect();
    let t = XformField::rotation2(n, n, ang.clone()).unwrap();
    let out = lic(&t, 6.0, 1.0, 7).unwrap();
    let (o, coh) = streak_orientation(&out, 3.0).unwrap();
    let (mut s, mut k) = (0.0, 0usize);
    for i in 0..n * n {
        if coh[i] >= 0.5 {
            s += orientation_gap(o[i], ang[i]);
            k += 1;
        }
    }
    let dev = (s / k as f64).to_degrees();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| lic(&t, 6.0, 1.0, 7).unwrap())
    };
    let bits = |f: &Field2| {
        f.values()
            .iter()
            .map(|v| (v.re.to_bits(), v.im.to_bits()))
            .collect::<Vec<_>>()
    };
    let same = [1usize, 2, 5].iter().all(|&th| bits(&run(th)) == bits(&out));
    let pass = dev <= 15.0 && same;
    outcome(
        pass,
        format!("mean deviation {dev:.2} deg over {k} coherent px (<= 15); bit-identical at 1/2/5 threads: {same}"),
    )
}

fn contour_smoke() -> bool {
    // Not a numbered criterion; exercised here so the suite's runtime
    // covers every pipeline.
    let fr = fracture(1, 40f64.to_radians());
    let q = ContourScene::rasterize(fr.size, fr.size, &fr.lower, CONTOUR_SIGMA).unwrap();
    let t = ContourScene::rasterize(fr.size, fr.size, &fr.upper_moved, CONTOUR_SIGMA).unwrap();
    !match_contours(&q, &t, &ContourMatch::new(fr.center, 12.0, 64))
        .unwrap()
        .is_empty()
}

type Criterion = (&'static str, fn() -> Outcome);

#[test]
fn acceptance_criteria() {
    let start = Instant::now();
    let criteria: [Criterion; 12] = [
        ("oracle equivalence, rotation2", oracle_rotation2),
        ("oracle equivalence, scale2", oracle_scale2),
        ("oracle equivalence, rotation3", oracle_rotation3),
        ("reduction bookkeeping", bookkeeping),
        ("stationary reduction", stationary),
        ("delta response", delta_response),
        ("truncation optimality", truncation),
        ("pattern detection", detection),
        ("optimal-filter optimality", optimality),
        ("ECD", descriptor),
        ("adaptive smoothing", smoothing),
        ("LIC", lic_criterion),
    ];
    let mut all = true;
    let mut err = std::io::stderr();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = run();
        all &= o.pass;
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        writeln!(
            err,
            "{verdict} {:>2} {name}: {} [{:.1}s]",
            i + 1,
            o.detail,
            t.elapsed().as_secs_f64()
        )
        .unwrap();
    }
    assert!(contour_smoke());
    let total = start.elapsed();
    let ok = total < Duration::from_secs(600);
    all &= ok;
    writeln!(
        err,
        "{} 13 desk-scale runtime: acceptance suite {:.1}s (<= 600s)",
        if ok { "PASS" } else { "FAIL" },
        total.as_secs_f64()
    )
    .unwrap();
    assert!(all, "acceptance criteria failed");
}
