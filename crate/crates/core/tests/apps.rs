mod common;

use std::f64::consts::PI;

use common::*;
use rand::Rng;
use xconv::apps::contour::{match_contours, ContourMatch, ContourScene, CONTOUR_SIGMA};
use xconv::apps::ecd::{distance, ecd, ecd_batch, match_descriptors, Harness};
use xconv::apps::lic::{lic, orientation_gap, streak_orientation, wrap_half};
use xconv::apps::vote::{build_optimal_filter, detect_pattern};
use xconv::gradient::gradient;
use xconv::xform::wrap_angle;
use xconv::{Field2, XformField};

fn negative_x_share(f: &xconv::apps::VoteFilter) -> f64 {
    let r = f.radius() as isize;
    let left: f64 = (-r..0)
        .flat_map(|dx| (-r..=r).map(move |dy| (dx, dy)))
        .map(|(dx, dy)| f.at(dx, dy))
        .sum();
    left / f.mass()
}

#[test]
fn silhouette_votes_land_left_of_the_frame() {
    let f = build_optimal_filter(&silhouette(31, 15.0), (15.0, 15.0), 10.0).unwrap();
    let share = negative_x_share(&f);
    assert!(share >= 0.6, "{share}");
}

#[test]
fn mass_matches_gradient_support_on_fixtures() {
    for (pattern, p, eps) in [
        (glyph_scene(41, 41, &[((20.0, 20.0), 0.0)]), (20.0, 20.0), 12.0),
        (silhouette(31, 15.0), (15.0, 15.0), 10.0),
    ] {
        let f = build_optimal_filter(&pattern, p, eps).unwrap();
        let g = gradient(&pattern).unwrap();
        let (w, _) = pattern.dims();
        let want: f64 = g
            .magnitude()
            .iter()
            .enumerate()
            .filter(|(i, _)| ((i % w) as f64 - p.0).hypot((i / w) as f64 - p.1) <= eps)
            .map(|(_, m)| m)
            .sum();
        assert!((f.mass() - want).abs() <= 1e-10 * want);
    }
}

#[test]
fn pattern_response_peaks_at_its_own_center() {
    let pattern = glyph_scene(41, 41, &[((20.0, 20.0), 0.0)]);
    let f = build_optimal_filter(&pattern, (20.0, 20.0), 12.0).unwrap();
    let d = detect_pattern(&pattern, &f, f.default_angles()).unwrap();
    let top = d.peaks[0];
    assert!((top.x as f64 - 20.0).hypot(top.y as f64 - 20.0) <= 1.0, "{top:?}");
    let max = d.response.real_values().into_iter().fold(f64::MIN, f64::max);
    assert_eq!(top.value, max);
}

#[test]
fn detection_follows_a_quarter_turn() {
    let pattern = glyph_scene(41, 41, &[((20.0, 20.0), 0.0)]);
    let f = build_optimal_filter(&pattern, (20.0, 20.0), 12.0).unwrap();
    let image = glyph_scene(72, 72, &[((22.0, 24.0), 0.3), ((50.0, 46.0), 2.0)]);
    let a = detect_pattern(&image, &f, 32).unwrap();
    let b = detect_pattern(&image.rotate90(), &f, 32).unwrap();
    for p in a.peaks.iter().take(2) {
        // rotate90 maps (x, y) to (h - 1 - y, x).
        let (x, y) = ((71 - p.y) as f64, p.x as f64);
        let near = b
            .peaks
            .iter()
            .take(2)
            .any(|q| (q.x as f64 - x).hypot(q.y as f64 - y) <= 1.0);
        assert!(near, "{p:?} not found in {:?}", &b.peaks[..2]);
    }
}

#[test]
fn blank_image_yields_zero_response() {
    let pattern = glyph_scene(41, 41, &[((20.0, 20.0), 0.0)]);
    let f = build_optimal_filter(&pattern, (20.0, 20.0), 12.0).unwrap();
    let d = detect_pattern(&Field2::zeros(40, 40), &f, 8).unwrap();
    assert!(d.response.real_values().iter().all(|&v| v == 0.0));
}

#[test]
fn descriptor_distance_is_a_metric() {
    let img = xconv::apps::filters::gaussian_blur(&random_field2(&mut rng(21), 48, 48), 1.5);
    let kps: Vec<(f64, f64)> = (0..6).map(|i| (10.0 + 5.0 * i as f64, 12.0 + 4.0 * i as f64)).collect();
    let d = ecd_batch(&img, &kps, 6.0).unwrap();
    for a in &d {
        assert_eq!(a.distance(a), 0.0);
        for b in &d {
            assert_eq!(a.distance(b), b.distance(a));
            for c in &d {
                assert!(a.distance(c) <= a.distance(b) + b.distance(c) + 1e-12);
            }
        }
    }
}

#[test]
fn random_descriptors_match_at_chance() {
    let mut r = rng(22);
    let (m, s) = (20usize, 2000usize);
    let vec = |r: &mut rand_chacha::ChaCha8Rng| (0..16).map(|_| r.random_range(-1.0..1.0)).collect::<Vec<f64>>();
    let model: Vec<Vec<f64>> = (0..m).map(|_| vec(&mut r)).collect();
    let scene: Vec<Vec<f64>> = (0..s).map(|_| vec(&mut r)).collect();
    let truth: Vec<(usize, usize)> = (0..s).map(|i| (i, r.random_range(0..m))).collect();
    let p1 = match_descriptors(&scene, &model, &truth, 1).unwrap().precision[0];
    let p = 1.0 / m as f64;
    let sigma = (p * (1.0 - p) / s as f64).sqrt();
    assert!((p1 - p).abs() <= 3.0 * sigma, "{p1} vs {p} ± {}", 3.0 * sigma);
}

#[test]
fn harness_precision_at_rank_one() {
    let res = Harness::default().run().unwrap();
    assert!(res.curves.precision[0] >= 0.8);
    assert!(res.curves.recall.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn descriptor_lengths_follow_radius() {
    let img = random_field2(&mut rng(23), 40, 40);
    for (eps, len) in [(3.0, 49), (4.5, 121), (7.0, 225)] {
        let d = ecd(&img, (20.0, 20.0), eps).unwrap();
        assert_eq!(d.values.len(), len);
        assert!((distance(&d.values, &vec![0.0; len]) - 1.0).abs() < 1e-12);
    }
}

fn scenes(f: &Fracture) -> (ContourScene, ContourScene) {
    (
        ContourScene::rasterize(f.size, f.size, &f.lower, CONTOUR_SIGMA).unwrap(),
        ContourScene::rasterize(f.size, f.size, &f.upper_moved, CONTOUR_SIGMA).unwrap(),
    )
}

#[test]
fn fracture_complement_is_found() {
    let f = fracture(1, 40f64.to_radians());
    let (q, t) = scenes(&f);
    let opts = ContourMatch::new(f.center, 12.0, 64);
    let best = match_contours(&q, &t, &opts).unwrap()[0];
    let off = (best.x as f64 - f.moved_center.0).hypot(best.y as f64 - f.moved_center.1);
    assert!(off <= 2.0, "{best:?}");
    assert!(wrap_angle(best.angle - f.angle).abs() <= 3f64.to_radians(), "{best:?}");
    let own = match_contours(&q, &q, &opts).unwrap()[0];
    assert!(own.score < best.score, "{} vs {}", own.score, best.score);
}

#[test]
fn straight_edges_align_antiparallel() {
    let n = 80;
    let query = vec![vec![(0.0, 40.0), (79.0, 40.0)]];
    let beta = 25f64.to_radians();
    let (s, c) = beta.sin_cos();
    let target = vec![vec![
        (40.0 - 60.0 * c, 40.0 - 60.0 * s),
        (40.0 + 60.0 * c, 40.0 + 60.0 * s),
    ]];
    let q = ContourScene::rasterize(n, n, &query, CONTOUR_SIGMA).unwrap();
    let t = ContourScene::rasterize(n, n, &target, CONTOUR_SIGMA).unwrap();
    let best = match_contours(&q, &t, &ContourMatch::new((40.0, 40.0), 10.0, 32)).unwrap()[0];
    // The rotated query edge runs opposite the target edge.
    let gap = wrap_angle(best.angle - beta - PI).abs();
    assert!(gap <= 3f64.to_radians(), "{:.2} deg", gap.to_degrees());
}

#[test]
fn constant_field_streaks_are_horizontal() {
    let t = XformField::constant_rotation2(128, 128, 0.0);
    let out = lic(&t, 6.0, 1.0, 11).unwrap();
    let (o, coh) = streak_orientation(&out, 3.0).unwrap();
    // Mean orientation as the doubled-angle vector average.
    let (mut sx, mut sy) = (0.0, 0.0);
    for (a, w) in o.iter().zip(&coh) {
        sx += w * (2.0 * a).cos();
        sy += w * (2.0 * a).sin();
    }
    let mean = wrap_half(0.5 * sy.atan2(sx));
    assert!(
        orientation_gap(mean, 0.0) <= 5f64.to_radians(),
        "{:.2} deg",
        mean.to_degrees()
    );
}

#[test]
fn lic_is_reproducible() {
    let t = XformField::rotation2(40, 30, (0..1200).map(|i| (i as f64 * 0.01).sin()).collect()).unwrap();
    let a = lic(&t, 4.0, 1.0, 7).unwrap();
    assert_eq!(a, lic(&t, 4.0, 1.0, 7).unwrap());
    assert_ne!(a, lic(&t, 4.0, 1.0, 8).unwrap());
}
