use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, ValueEnum};
use serde::Serialize;
use xconv::apps::contour::{Polyline, CONTOUR_SIGMA, DEFAULT_CANDIDATES};
use xconv::apps::ecd::SUPPORT_PER_SCALE;
use xconv::apps::{
    build_optimal_filter, detect_pattern, ecd_batch, lic_with, match_contours, match_descriptors, ContourMatch,
    ContourScene, Descriptor, LicParams,
};
use xconv::XformField;

use super::*;
use crate::error::{param, CliResult};
use crate::io::container::{self, Contents};
use crate::io::{self as fio, csvio};
use crate::sidecar::Sidecar;

fn check_ext(name: &str, p: &std::path::Path, ext: &str) -> CliResult<()> {
    if p.extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .as_deref()
        == Some(ext)
    {
        Ok(())
    } else {
        Err(param(name, format!("{} must end in .{ext}", p.display())))
    }
}

#[derive(Args, Serialize)]
pub struct DetectArgs {
    /// Image to search.
    #[arg(long)]
    pub input: PathBuf,

    /// Example of the pattern.
    #[arg(long)]
    pub pattern: PathBuf,

    /// Pattern reference point `x,y` [default: pattern image center].
    #[arg(long, value_parser = parse_pair)]
    pub center: Option<(f64, f64)>,

    /// Vote filter support radius.
    #[arg(long, default_value_t = 12.0)]
    pub epsilon: f64,

    /// Band limit K [default: full band, 8⌈ε⌉ rounded to a multiple of 4].
    #[arg(long = "k", visible_alias = "K")]
    pub k: Option<usize>,

    /// Peaks to report.
    #[arg(long, default_value_t = 10)]
    pub top: usize,

    /// CSV of the reported peaks (x, y, response).
    #[arg(long)]
    pub peaks: Option<PathBuf>,

    /// Image of the optimal vote filter.
    #[arg(long)]
    pub filter_out: Option<PathBuf>,

    #[command(flatten)]
    pub out: OutputArgs,
}

pub fn detect(a: DetectArgs) -> CliResult<()> {
    a.out.validate()?;
    positive("epsilon", a.epsilon)?;
    if let Some(k) = a.k {
        nonzero("k", k)?;
    }
    let start = Instant::now();
    let image = fio::read_image(&a.input)?;
    let pattern = fio::read_image(&a.pattern)?;
    let (pw, ph) = pattern.dims();
    let center = a.center.unwrap_or(((pw / 2) as f64, (ph / 2) as f64));
    let vote = build_optimal_filter(&pattern, center, a.epsilon)?;
    let band = a.k.unwrap_or(vote.default_angles());
    let d = detect_pattern(&image, &vote, band)?;
    let m = a.out.write(&d.response)?;
    let top: Vec<_> = d.peaks.iter().take(a.top).collect();
    for p in &top {
        println!("peak ({}, {}) response {:.6e}", p.x, p.y, p.value);
    }
    let mut s = Sidecar::new("detect", &a);
    if let Some(p) = &a.peaks {
        let rows: Vec<[String; 3]> = top
            .iter()
            .map(|p| [p.x.to_string(), p.y.to_string(), p.value.to_string()])
            .collect();
        csvio::write_rows(p, &["x", "y", "response"], &rows)?;
    }
    if let Some(p) = &a.filter_out {
        fio::write_image(p, &vote.to_field(), a.out.bit_depth)?;
    }
    #[derive(Serialize)]
    struct P {
        x: usize,
        y: usize,
        response: f64,
    }
    let peaks: Vec<P> = top
        .iter()
        .map(|p| P {
            x: p.x,
            y: p.y,
            response: p.value,
        })
        .collect();
    s.output(&a.out.output)
        .mapping(m)
        .count("convolutions", d.convolutions)
        .result("band", band.min(vote.default_angles()))
        .result("peaks", peaks);
    finish(&mut s, &a.out.output, start.elapsed())
}

#[derive(Args, Serialize)]
pub struct EcdArgs {
    /// Image.
    #[arg(long)]
    pub input: PathBuf,

    /// CSV of keypoints `x,y,scale`.
    #[arg(long)]
    pub keypoints: PathBuf,

    /// Fixed support radius for every keypoint [default: per keypoint,
    /// --support-per-scale × scale].
    #[arg(long)]
    pub epsilon: Option<f64>,

    /// Support radius per unit of keypoint scale.
    #[arg(long, default_value_t = SUPPORT_PER_SCALE)]
    pub support_per_scale: f64,

    /// Descriptor container to write (.xcf).
    #[arg(short, long)]
    pub output: PathBuf,

    /// Also write descriptors as CSV rows: x, y, support, degenerate, values.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

pub fn ecd(a: EcdArgs) -> CliResult<()> {
    check_ext("output", &a.output, "xcf")?;
    positive("support-per-scale", a.support_per_scale)?;
    if let Some(e) = a.epsilon {
        positive("epsilon", e)?;
    }
    let start = Instant::now();
    let image = fio::read_image(&a.input)?;
    let kps = csvio::read_keypoints(&a.keypoints)?;
    if kps.is_empty() {
        return Err(param(
            "keypoints",
            format!("{} lists no keypoints", a.keypoints.display()),
        ));
    }
    let supports: Vec<f64> = kps
        .iter()
        .map(|k| {
            let s = a.epsilon.unwrap_or(a.support_per_scale * k.2);
            positive("support", s).map(|_| s)
        })
        .collect::<CliResult<_>>()?;
    // One file holds descriptors of one length.
    let side = |s: f64| 2 * s.ceil() as usize + 1;
    if supports.iter().any(|&s| side(s) != side(supports[0])) {
        return Err(param(
            "keypoints",
            "keypoint scales give descriptors of different lengths; pass --epsilon for a common support",
        ));
    }
    let mut out: Vec<Descriptor> = Vec::with_capacity(kps.len());
    for (k, &s) in kps.iter().zip(&supports) {
        out.extend(ecd_batch(&image, &[(k.0, k.1)], s)?);
    }
    let degenerate = out.iter().filter(|d| d.degenerate).count();
    container::write(&a.output, &Contents::Descriptors(out.clone()))?;
    if let Some(p) = &a.csv {
        let n = out[0].values.len();
        let mut header = vec!["x".to_string(), "y".into(), "support".into(), "degenerate".into()];
        header.extend((0..n).map(|i| format!("v{i}")));
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        let rows: Vec<Vec<String>> = out
            .iter()
            .map(|d| {
                let mut r = vec![
                    d.keypoint.0.to_string(),
                    d.keypoint.1.to_string(),
                    d.support.to_string(),
                    (d.degenerate as u8).to_string(),
                ];
                r.extend(d.values.iter().map(|v| v.to_string()));
                r
            })
            .collect();
        csvio::write_rows(p, &header, &rows)?;
    }
    println!(
        "{} descriptors of length {}, {degenerate} degenerate",
        out.len(),
        out[0].values.len()
    );
    let mut s = Sidecar::new("ecd", &a);
    s.output(&a.output)
        .count("descriptors", out.len())
        .count("degenerate", degenerate)
        .result("length", out[0].values.len());
    finish(&mut s, &a.output, start.elapsed())
}

#[derive(Args, Serialize)]
pub struct MatchArgs {
    /// Scene descriptors (.xcf from `ecd`).
    #[arg(long)]
    pub scene: PathBuf,

    /// Model descriptors.
    #[arg(long)]
    pub model: PathBuf,

    /// CSV of true `scene,model` index pairs.
    #[arg(long)]
    pub truth: PathBuf,

    /// Deepest rank scored [default: min(10, model count)].
    #[arg(long)]
    pub r_max: Option<usize>,

    /// Precision/recall CSV: rank, precision, recall.
    #[arg(short, long)]
    pub output: PathBuf,
}

fn read_descriptors(p: &std::path::Path) -> CliResult<Vec<Vec<f64>>> {
    match container::read(p)? {
        Contents::Descriptors(d) => Ok(d.into_iter().map(|d| d.values).collect()),
        c => Err(param(
            "descriptors",
            format!("{} holds a {} filter", p.display(), container::group_name(&c)),
        )),
    }
}

pub fn match_cmd(a: MatchArgs) -> CliResult<()> {
    check_ext("output", &a.output, "csv")?;
    if let Some(r) = a.r_max {
        nonzero("r-max", r)?;
    }
    let start = Instant::now();
    let scene = read_descriptors(&a.scene)?;
    let model = read_descriptors(&a.model)?;
    if scene.first().map(Vec::len) != model.first().map(Vec::len) {
        return Err(param("model", "scene and model descriptors differ in length"));
    }
    let truth = csvio::read_pairs(&a.truth)?;
    let r_max = a.r_max.unwrap_or(model.len().min(10));
    let c = match_descriptors(&scene, &model, &truth, r_max)?;
    let rows: Vec<[String; 3]> = (0..r_max)
        .map(|i| [(i + 1).to_string(), c.precision[i].to_string(), c.recall[i].to_string()])
        .collect();
    csvio::write_rows(&a.output, &["rank", "precision", "recall"], &rows)?;
    println!(
        "precision@1 {:.3}  recall@{r_max} {:.3}  excluded {}",
        c.precision[0],
        c.recall[r_max - 1],
        c.excluded.len()
    );
    let mut s = Sidecar::new("match", &a);
    s.output(&a.output)
        .count("scene", scene.len())
        .count("model", model.len())
        .result("excluded", &c.excluded)
        .result("precision", &c.precision)
        .result("recall", &c.recall);
    finish(&mut s, &a.output, start.elapsed())
}

#[derive(Args, Serialize)]
pub struct ContourArgs {
    /// Query fragment contours: CSV `x,y` vertices, polylines separated by
    /// blank lines.
    #[arg(long)]
    pub query: PathBuf,

    /// Target fragment contours.
    #[arg(long)]
    pub target: PathBuf,

    /// Scene width [default: bounding box of both inputs plus 8].
    #[arg(long)]
    pub width: Option<usize>,

    /// Scene height [default: bounding box of both inputs plus 8].
    #[arg(long)]
    pub height: Option<usize>,

    /// Center `x,y` of the query region [default: query vertex centroid].
    #[arg(long, value_parser = parse_pair)]
    pub center: Option<(f64, f64)>,

    /// Query region radius.
    #[arg(long, default_value_t = 12.0)]
    pub epsilon: f64,

    /// Band limit K.
    #[arg(long = "k", visible_alias = "K", default_value_t = 64)]
    pub k: usize,

    /// Candidate translations refined for angle.
    #[arg(long, default_value_t = DEFAULT_CANDIDATES)]
    pub candidates: usize,

    /// Smoothing of the rasterized contours.
    #[arg(long, default_value_t = CONTOUR_SIGMA)]
    pub sigma: f64,

    /// Placements CSV: x, y, angle_deg, score, residual.
    #[arg(short, long)]
    pub output: PathBuf,
}

pub fn contour(a: ContourArgs) -> CliResult<()> {
    check_ext("output", &a.output, "csv")?;
    positive("epsilon", a.epsilon)?;
    positive("sigma", a.sigma)?;
    nonzero("k", a.k)?;
    nonzero("candidates", a.candidates)?;
    let start = Instant::now();
    let q = csvio::read_polylines(&a.query)?;
    let t = csvio::read_polylines(&a.target)?;
    let points = || q.iter().chain(&t).flatten();
    if points().any(|&(x, y)| x < 0.0 || y < 0.0) {
        return Err(param("query", "vertices must have non-negative coordinates"));
    }
    let extent = |f: fn(&(f64, f64)) -> f64| points().map(f).fold(0.0, f64::max).ceil() as usize + 8;
    let w = a.width.unwrap_or_else(|| extent(|p| p.0));
    let h = a.height.unwrap_or_else(|| extent(|p| p.1));
    let center = match a.center {
        Some(c) => c,
        None => centroid(&q).ok_or_else(|| param("query", format!("{} has no vertices", a.query.display())))?,
    };
    let qs = ContourScene::rasterize(w, h, &q, a.sigma)?;
    let ts = ContourScene::rasterize(w, h, &t, a.sigma)?;
    let mut opts = ContourMatch::new(center, a.epsilon, a.k);
    opts.candidates = a.candidates;
    let placements = match_contours(&qs, &ts, &opts)?;
    let rows: Vec<[String; 5]> = placements
        .iter()
        .map(|p| {
            [
                p.x.to_string(),
                p.y.to_string(),
                p.angle.to_degrees().to_string(),
                p.score.to_string(),
                p.residual.to_string(),
            ]
        })
        .collect();
    csvio::write_rows(&a.output, &["x", "y", "angle_deg", "score", "residual"], &rows)?;
    if let Some(best) = placements.first() {
        println!(
            "best ({}, {}) angle {:.1} deg score {:.4e} residual {:.3}",
            best.x,
            best.y,
            best.angle.to_degrees(),
            best.score,
            best.residual
        );
    }
    let mut s = Sidecar::new("contour", &a);
    s.output(&a.output)
        .count("placements", placements.len())
        .result("scene", (w, h))
        .result("center", center);
    finish(&mut s, &a.output, start.elapsed())
}

fn centroid(lines: &[Polyline]) -> Option<(f64, f64)> {
    let n = lines.iter().map(Vec::len).sum::<usize>();
    if n == 0 {
        return None;
    }
    let (sx, sy) = lines.iter().flatten().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    Some((sx / n as f64, sy / n as f64))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pattern {
    /// Streaks along circles about the center.
    Circular,
    /// One direction everywhere (--angle).
    Constant,
    /// Hyperbolic streaks around a saddle at the center.
    Saddle,
}

#[derive(Args, Serialize)]
pub struct LicArgs {
    /// One-plane PFM of streak directions in radians.
    #[arg(long, conflicts_with = "pattern")]
    pub field: Option<PathBuf>,

    /// Synthetic direction field, used when --field is absent.
    #[arg(long, value_enum, default_value_t = Pattern::Circular)]
    pub pattern: Pattern,

    /// Side of the synthetic field.
    #[arg(long, default_value_t = 128)]
    pub size: usize,

    /// Direction of the constant pattern in degrees.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub angle: f64,

    /// Gaussian sigma along the streaks.
    #[arg(long, default_value_t = 6.0)]
    pub length: f64,

    /// Gaussian sigma across the streaks; must be below --length.
    #[arg(long, default_value_t = 1.0)]
    pub width: f64,

    /// Skip the division by the local filter weight.
    #[arg(long)]
    pub unnormalized: bool,

    #[command(flatten)]
    pub out: OutputArgs,
}

pub fn lic(a: LicArgs, seed: u64) -> CliResult<()> {
    a.out.validate()?;
    nonzero("size", a.size)?;
    let params = LicParams {
        length: a.length,
        width: a.width,
        seed,
        normalized: !a.unnormalized,
    };
    params.filter()?;
    let start = Instant::now();
    let field = match &a.field {
        Some(p) => {
            let d = crate::io::pfm::read(p)?;
            XformField::rotation2(d.width, d.height, d.plane())?
        }
        None => synthetic(a.pattern, a.size, a.angle.to_radians())?,
    };
    let o = lic_with(&field, &params)?;
    let m = a.out.write(&o.output)?;
    let mut s = Sidecar::new("lic", &seeded(&a, seed));
    record_timings(&mut s, &o.timings);
    s.output(&a.out.output)
        .mapping(m)
        .count("convolutions", o.convolutions)
        .count("floored_pixels", o.floored);
    finish(&mut s, &a.out.output, start.elapsed())
}

fn synthetic(p: Pattern, n: usize, angle: f64) -> CliResult<XformField> {
    let c = (n as f64 - 1.0) / 2.0;
    let dir = |x: usize, y: usize| -> f64 {
        let (dx, dy) = (x as f64 - c, y as f64 - c);
        match p {
            Pattern::Circular => dy.atan2(dx) + std::f64::consts::FRAC_PI_2,
            Pattern::Constant => angle,
            // Streaks follow xy = const: tangent (x, -y).
            Pattern::Saddle => (-dy).atan2(dx),
        }
    };
    let v = (0..n * n).map(|i| dir(i % n, i / n)).collect();
    Ok(XformField::rotation2(n, n, v)?)
}
