use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, ValueEnum};
use serde::Serialize;
use xconv::apps::filters::{anisotropic_gaussian, checkerboard_scales, defocus_scales};
use xconv::decomp::{decompose_rotation3, reconstruct3_fine, reconstruct_fine, ScaleWindow, SphFilter3};
use xconv::engine::*;
use xconv::{CenteredField, CenteredVolume, Field2, Quaternion, XformField};

use super::*;
use crate::error::{param, CliResult};
use crate::fixture;
use crate::io::container::{self, Contents};
use crate::io::{self as fio};
use crate::sidecar::Sidecar;

/// Side of the built-in signal.
pub const FIXTURE_SIZE: usize = 24;

#[derive(Args, Serialize)]
pub struct FieldArgs {
    /// Transformation group of the field.
    #[arg(long, value_enum, default_value_t = Group2::Rotation)]
    pub group: Group2,

    /// One-plane PFM holding angles in radians (rotation) or scale factors
    /// (scale). Without it, and without --constant, the field is random:
    /// uniform angles, or log-uniform scales in the guard band [0.5, 2].
    #[arg(long, conflicts_with = "constant")]
    pub field: Option<PathBuf>,

    /// The same transform everywhere: an angle in degrees or a scale factor.
    #[arg(long, allow_negative_numbers = true)]
    pub constant: Option<f64>,
}

impl FieldArgs {
    pub fn build(
        &self,
        dims: (usize, usize),
        window: Option<&ScaleWindow>,
        r: &mut rand_chacha::ChaCha8Rng,
    ) -> CliResult<XformField> {
        let (w, h) = dims;
        Ok(match (self.group, &self.field, self.constant) {
            (Group2::Rotation, Some(p), _) => fio::read_angle_field(p, dims)?,
            (Group2::Scale, Some(p), _) => fio::read_scale_field(p, dims)?,
            (Group2::Rotation, None, Some(d)) => XformField::constant_rotation2(w, h, d.to_radians()),
            (Group2::Scale, None, Some(s)) => XformField::constant_scale2(w, h, s)?,
            (Group2::Rotation, None, None) => XformField::rotation2(w, h, fixture::angles(r, w * h))?,
            (Group2::Scale, None, None) => {
                let band = window.map(|win| win.guard_band()).unwrap_or((1.0, 1.0));
                XformField::scale2(w, h, fixture::scales(r, w * h, band))?
            }
        })
    }
}

#[derive(Args, Serialize)]
pub struct FilterRun {
    /// Signal image (.pgm or .pfm) [default: built-in 24×24 random signal].
    #[arg(long)]
    pub input: Option<PathBuf>,

    #[command(flatten)]
    pub field: FieldArgs,

    #[command(flatten)]
    pub filter: FilterArgs,

    /// Direct summation against the reconstructed filter, warped bilinearly
    /// from a half-pixel-pitch rendering, instead of the FFT pipeline.
    #[arg(long, conflicts_with = "fast")]
    pub brute: bool,

    /// FFT pipeline (the default).
    #[arg(long)]
    pub fast: bool,

    #[command(flatten)]
    pub out: OutputArgs,
}

pub fn filter_run(a: FilterRun, mode: Mode, seed: u64) -> CliResult<()> {
    a.filter.validate()?;
    a.out.validate()?;
    if let Some(c) = a.field.constant {
        if a.field.group == Group2::Scale {
            positive("constant", c)?;
        }
    }
    let start = Instant::now();
    let mut r = fixture::rng(seed);
    let h = match &a.input {
        Some(p) => fio::read_image(p)?,
        None => fixture::signal2(&mut r, FIXTURE_SIZE, FIXTURE_SIZE),
    };
    let eps = a.filter.epsilon;
    let mut fr = fixture::rng(seed ^ 0x5eed);
    let f = a.filter.build(a.field.group, || fixture::filter2(&mut fr, eps))?;
    let t = a.field.build(h.dims(), f.scale_window(), &mut r)?;
    let name = match mode {
        Mode::Correlation => "xcorr",
        Mode::Convolution => "xconv",
    };
    let mut s = Sidecar::new(name, &seeded(&a, seed));
    let (out, convs) = if a.brute {
        let rec = reconstruct_fine(&f, None, 2)?;
        let src = CenteredField::with_pitch(&rec, 0.5);
        let reach = f.render_radius() as f64;
        let t0 = Instant::now();
        let o = match mode {
            Mode::Correlation => xcorr_brute(&h, &t, &src, reach)?,
            Mode::Convolution => xconv_brute(&h, &t, &src, reach)?,
        };
        s.timing("brute", t0.elapsed());
        (o.output, 0)
    } else {
        let o = extended(&h, &t, &f, &XConvPlan::for_filter(mode, &f))?;
        record_timings(&mut s, &o.timings);
        (o.output, o.convolutions)
    };
    let m = a.out.write(&out)?;
    s.output(&a.out.output)
        .mapping(m)
        .count("convolutions", convs)
        .count("components", f.components().len())
        .result("group", f.group().name())
        .result("band", f.band())
        .result("pipeline", if a.brute { "brute" } else { "fast" });
    println!(
        "{name}: {}x{} {} K={} convolutions {convs}",
        h.width(),
        h.height(),
        f.group().name(),
        f.band()
    );
    finish(&mut s, &a.out.output, start.elapsed())
}

#[derive(Args, Serialize)]
pub struct SmoothArgs {
    /// Real signal image.
    #[arg(long)]
    pub input: PathBuf,

    /// One-plane PFM of per-pixel scale factors.
    #[arg(long)]
    pub scales: Option<PathBuf>,

    /// One-plane PFM of per-pixel angles in radians; steers an anisotropic
    /// Gaussian (--sigma along, --sigma-y across).
    #[arg(long)]
    pub angles: Option<PathBuf>,

    /// Checkerboard scale field with square tiles of this many pixels.
    #[arg(long)]
    pub checkerboard: Option<usize>,

    /// Checkerboard scale on even tiles.
    #[arg(long, default_value_t = 1.0)]
    pub scale_a: f64,

    /// Checkerboard scale on odd tiles.
    #[arg(long, default_value_t = 2.0)]
    pub scale_b: f64,

    /// One-plane PFM depth map; scale = lo + strength·|depth - focus|,
    /// clamped to hi.
    #[arg(long)]
    pub depth: Option<PathBuf>,

    /// In-focus depth.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub focus: f64,

    /// Scale growth per unit of depth away from focus.
    #[arg(long, default_value_t = 1.0)]
    pub strength: f64,

    /// Defocus scale range `lo,hi`.
    #[arg(long, value_parser = parse_pair, default_value = "0.5,2")]
    pub scale_range: (f64, f64),

    /// Gaussian sigma (along the field direction for --angles).
    #[arg(long, default_value_t = 2.0)]
    pub sigma: f64,

    /// Gaussian sigma across the field direction [default: --sigma].
    #[arg(long)]
    pub sigma_y: Option<f64>,

    /// Filter support radius; the scale window covers scales in
    /// [0.5, 2] for it.
    #[arg(long, default_value_t = 8.0)]
    pub epsilon: f64,

    /// Band limit K [default: full band].
    #[arg(long = "k", visible_alias = "K")]
    pub k: Option<usize>,

    /// Radial samples [default: 64 for scale, 2⌈ε⌉ for rotation].
    #[arg(long)]
    pub n_radii: Option<usize>,

    /// Angular samples [default: 32 for scale, 4⌈ε⌉ for rotation].
    #[arg(long)]
    pub n_angles: Option<usize>,

    /// Do not divide the signal by s² before blurring. Shows blur bleeding
    /// across scale edges.
    #[arg(long)]
    pub no_signal_normalization: bool,

    /// Skip the division by the blurred weights.
    #[arg(long)]
    pub no_divide: bool,

    #[command(flatten)]
    pub out: OutputArgs,
}

pub fn smooth(a: SmoothArgs, seed: u64) -> CliResult<()> {
    a.out.validate()?;
    positive("sigma", a.sigma)?;
    positive("epsilon", a.epsilon)?;
    if let Some(s) = a.sigma_y {
        positive("sigma-y", s)?;
    }
    let chosen = [
        a.scales.is_some(),
        a.angles.is_some(),
        a.checkerboard.is_some(),
        a.depth.is_some(),
    ];
    if chosen.iter().filter(|&&c| c).count() != 1 {
        return Err(param(
            "field",
            "give exactly one of --scales, --angles, --checkerboard, --depth",
        ));
    }
    let group = if a.angles.is_some() {
        Group2::Rotation
    } else {
        Group2::Scale
    };
    let fa = FilterArgs {
        filter: None,
        filter_image: None,
        k: a.k,
        epsilon: a.epsilon,
        n_radii: a.n_radii,
        n_angles: a.n_angles,
    };
    fa.validate()?;
    let start = Instant::now();
    let h = fio::read_image(&a.input)?;
    let (w, hh) = h.dims();
    let t = if let Some(p) = &a.scales {
        fio::read_scale_field(p, (w, hh))?
    } else if let Some(p) = &a.angles {
        fio::read_angle_field(p, (w, hh))?
    } else if let Some(tile) = a.checkerboard {
        positive("scale-a", a.scale_a)?;
        positive("scale-b", a.scale_b)?;
        XformField::scale2(w, hh, checkerboard_scales(w, hh, tile, a.scale_a, a.scale_b)?)?
    } else {
        let p = a.depth.as_ref().expect("one field chosen");
        let d = fio::pfm::read(p)?;
        if (d.width, d.height) != (w, hh) {
            return Err(param(
                "depth",
                format!("{} does not match the {w}x{hh} signal", p.display()),
            ));
        }
        XformField::scale2(w, hh, defocus_scales(&d.plane(), a.focus, a.strength, a.scale_range)?)?
    };
    let f = decompose_with(&anisotropic_gaussian(a.sigma, a.sigma_y.unwrap_or(a.sigma)), group, &fa)?;
    let opts = SmoothOptions {
        normalize_signal: !a.no_signal_normalization,
        divide: !a.no_divide,
    };
    let o = smooth_adaptive_with(&h, &t, &f, opts)?;
    let m = a.out.write(&o.output)?;
    let mut s = Sidecar::new("smooth", &seeded(&a, seed));
    record_timings(&mut s, &o.timings);
    s.output(&a.out.output)
        .mapping(m)
        .count("convolutions", o.convolutions)
        .count("floored_pixels", o.floored)
        .result("group", f.group().name())
        .result("band", f.band());
    if o.floored > 0 {
        eprintln!("xconv: {} pixels had a vanishing weight and were set to 0", o.floored);
    }
    finish(&mut s, &a.out.output, start.elapsed())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode3 {
    Xcorr,
    Xconv,
}

#[derive(Args, Serialize)]
pub struct Steer3dArgs {
    /// Volume as stacked slices (.pgm or .pfm) [default: random cube of
    /// side --size].
    #[arg(long, requires = "depth")]
    pub input: Option<PathBuf>,

    /// Slices in the input stack.
    #[arg(long)]
    pub depth: Option<usize>,

    /// Side of the random cube.
    #[arg(long, default_value_t = 16)]
    pub size: usize,

    /// Quaternion field as four stacked planes w, x, y, z [default: random
    /// rotation per voxel].
    #[arg(long, conflicts_with = "axis")]
    pub rotations: Option<PathBuf>,

    /// Constant rotation axis `x,y,z`, with --angle.
    #[arg(long, value_parser = parse_triple, requires = "angle", allow_negative_numbers = true)]
    pub axis: Option<[f64; 3]>,

    /// Constant rotation angle in degrees.
    #[arg(long, requires = "axis", allow_negative_numbers = true)]
    pub angle: Option<f64>,

    /// Rotation3 filter container [default: random smooth filter].
    #[arg(long)]
    pub filter: Option<PathBuf>,

    /// Maximum harmonic degree.
    #[arg(long = "k", visible_alias = "K", default_value_t = 2)]
    pub k: usize,

    /// Filter support radius in voxels.
    #[arg(long, default_value_t = 6.0)]
    pub epsilon: f64,

    /// Radial shells.
    #[arg(long, default_value_t = 16)]
    pub n_radii: usize,

    /// Polar and azimuthal samples per shell; at least 2(K+1).
    #[arg(long, default_value_t = 8)]
    pub n_angular: usize,

    #[arg(long, value_enum, default_value_t = Mode3::Xcorr)]
    pub mode: Mode3,

    /// Direct summation against the reconstructed filter, warped
    /// trilinearly from a third-voxel-pitch rendering.
    #[arg(long)]
    pub brute: bool,

    #[command(flatten)]
    pub out: OutputArgs,
}

pub fn steer3d(a: Steer3dArgs, seed: u64) -> CliResult<()> {
    a.out.validate()?;
    positive("epsilon", a.epsilon)?;
    nonzero("size", a.size)?;
    nonzero("n-radii", a.n_radii)?;
    let start = Instant::now();
    let mut r = fixture::rng(seed);
    let h = match &a.input {
        Some(p) => fio::read_volume(p, a.depth.unwrap_or(0))?,
        None => fixture::signal3(&mut r, a.size),
    };
    let dims = h.dims();
    let n = dims.iter().product();
    let t = match (&a.rotations, a.axis, a.angle) {
        (Some(p), _, _) => fio::read_rotation_field(p, dims)?,
        (None, Some(ax), Some(deg)) => {
            let norm = (ax[0] * ax[0] + ax[1] * ax[1] + ax[2] * ax[2]).sqrt();
            positive("axis", norm)?;
            XformField::constant_rotation3(dims, Quaternion::from_axis_angle(ax, deg.to_radians()))?
        }
        _ => XformField::rotation3(dims, fixture::rotations(&mut r, n))?,
    };
    let f: SphFilter3 = match &a.filter {
        Some(p) => match container::read(p)? {
            Contents::Filter3(f) => f,
            c => {
                return Err(param(
                    "filter",
                    format!("{} holds a {} filter", p.display(), container::group_name(&c)),
                ))
            }
        },
        None => {
            let mut fr = fixture::rng(seed ^ 0x5eed);
            decompose_rotation3(
                &fixture::filter3(&mut fr, a.epsilon),
                a.k,
                a.n_radii,
                a.n_angular,
                a.epsilon,
            )?
        }
    };
    let mut s = Sidecar::new("steer3d", &seeded(&a, seed));
    let (out, convs) = if a.brute {
        let rec = reconstruct3_fine(&f, None, 3)?;
        let src = CenteredVolume::with_pitch(&rec, 1.0 / 3.0);
        let reach = f.render_radius() as f64;
        let t0 = Instant::now();
        let o = match a.mode {
            Mode3::Xcorr => xcorr_brute3(&h, &t, &src, reach)?,
            Mode3::Xconv => xconv_brute3(&h, &t, &src, reach)?,
        };
        s.timing("brute", t0.elapsed());
        (o.output, 0)
    } else {
        let o = match a.mode {
            Mode3::Xcorr => xcorr_fast3(&h, &t, &f)?,
            Mode3::Xconv => xconv_fast3(&h, &t, &f)?,
        };
        record_timings(&mut s, &o.timings);
        (o.output, o.convolutions)
    };
    let stack: Field2 = fio::volume_as_stack(&out);
    let m = a.out.write(&stack)?;
    s.output(&a.out.output)
        .mapping(m)
        .count("convolutions", convs)
        .result("dims", dims)
        .result("band", f.band());
    println!(
        "steer3d: {}x{}x{} K={} convolutions {convs}",
        dims[0],
        dims[1],
        dims[2],
        f.band()
    );
    finish(&mut s, &a.out.output, start.elapsed())
}
