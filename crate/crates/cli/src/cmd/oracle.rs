use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, ValueEnum};
use serde::Serialize;
use xconv::decomp::{decompose_rotation3, reconstruct3_fine, reconstruct_fine};
use xconv::engine::*;
use xconv::{CenteredField, CenteredVolume, Field2, Field3, XformField};

use super::engine::FIXTURE_SIZE;
use super::*;
use crate::error::{param, CliError, CliResult};
use crate::fixture;
use crate::io as fio;
use crate::sidecar::Sidecar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleGroup {
    Rotation2,
    Scale2,
    Rotation3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Which {
    Xcorr,
    Xconv,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Oracle {
    /// Direct sums over a bilinearly (trilinearly) warped rendering.
    Bilinear,
    /// Per-pixel steering of the harmonics in closed form (rotation2 only).
    Spectral,
}

#[derive(Args, Serialize)]
pub struct OracleArgs {
    #[arg(long, value_enum, default_value_t = OracleGroup::Rotation2)]
    pub group: OracleGroup,

    #[arg(long, value_enum, default_value_t = Which::Both)]
    pub mode: Which,

    #[arg(long, value_enum, default_value_t = Oracle::Bilinear)]
    pub oracle: Oracle,

    /// Random instances to draw.
    #[arg(long, default_value_t = 1)]
    pub instances: usize,

    /// Grid side [default: 24 in 2D, 16 in 3D].
    #[arg(long)]
    pub size: Option<usize>,

    /// Filter support radius [default: 8 in 2D, 6 in 3D].
    #[arg(long)]
    pub epsilon: Option<f64>,

    /// Band limit [default: full band in 2D, degree 2 in 3D].
    #[arg(long = "k", visible_alias = "K")]
    pub k: Option<usize>,

    /// Largest accepted relative L2 error; exceeding it exits with code 1.
    #[arg(long, default_value_t = 3e-3)]
    pub tolerance: f64,

    /// Supplied 2D signal instead of a random one (one instance).
    #[arg(long)]
    pub input: Option<PathBuf>,

    /// Supplied one-plane PFM field matching --input.
    #[arg(long, requires = "input")]
    pub field: Option<PathBuf>,

    /// Supplied 2D filter container.
    #[arg(long)]
    pub filter: Option<PathBuf>,

    /// JSON report path.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Default, Serialize)]
struct Tally {
    xcorr: Option<f64>,
    xconv: Option<f64>,
    convolutions: usize,
}

impl Tally {
    fn add(slot: &mut Option<f64>, e: f64) {
        *slot = Some(slot.map_or(e, |v: f64| v.max(e)));
    }
}

pub fn rel(a: &[xconv::Complex64], b: &[xconv::Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}

pub fn oracle_check(a: OracleArgs, seed: u64) -> CliResult<()> {
    nonzero("instances", a.instances)?;
    positive("tolerance", a.tolerance)?;
    if let Some(e) = a.epsilon {
        positive("epsilon", e)?;
    }
    if a.oracle == Oracle::Spectral && a.group == OracleGroup::Scale2 {
        return Err(param("oracle", "the spectral oracle exists for rotation groups only"));
    }
    if a.group == OracleGroup::Rotation3 && (a.input.is_some() || a.filter.is_some()) {
        return Err(param("input", "supplied inputs are 2D only"));
    }
    let start = Instant::now();
    let mut r = fixture::rng(seed);
    let modes: &[Mode] = match a.mode {
        Which::Xcorr => &[Mode::Correlation],
        Which::Xconv => &[Mode::Convolution],
        Which::Both => &[Mode::Correlation, Mode::Convolution],
    };
    let mut tally = Tally::default();
    let instances = if a.input.is_some() { 1 } else { a.instances };
    for _ in 0..instances {
        match a.group {
            OracleGroup::Rotation2 | OracleGroup::Scale2 => run2(&a, modes, &mut r, &mut tally)?,
            OracleGroup::Rotation3 => run3(&a, modes, &mut r, &mut tally)?,
        }
    }
    let worst = tally.xcorr.unwrap_or(0.0).max(tally.xconv.unwrap_or(0.0));
    for (name, e) in [("xcorr", tally.xcorr), ("xconv", tally.xconv)] {
        if let Some(e) = e {
            println!("{name}: max relative L2 {e:.3e}");
        }
    }
    println!("convolutions per run: {}", tally.convolutions);
    let pass = worst <= a.tolerance;
    println!(
        "{} (tolerance {:e}, {instances} instance(s))",
        if pass { "PASS" } else { "FAIL" },
        a.tolerance
    );
    if let Some(p) = &a.report {
        let mut s = Sidecar::new("oracle-check", &seeded(&a, seed));
        s.count("convolutions", tally.convolutions)
            .result("max_relative_l2", &tally)
            .result("pass", pass)
            .timing("total", start.elapsed());
        let text = serde_json::to_string_pretty(&s).expect("report serializes");
        std::fs::write(p, text + "\n").map_err(crate::error::io_err(p))?;
    }
    if pass {
        Ok(())
    } else {
        Err(CliError::Contract(format!(
            "oracle mismatch {worst:.3e} exceeds tolerance {:e}",
            a.tolerance
        )))
    }
}

fn run2(a: &OracleArgs, modes: &[Mode], r: &mut rand_chacha::ChaCha8Rng, tally: &mut Tally) -> CliResult<()> {
    let group = if a.group == OracleGroup::Scale2 {
        Group2::Scale
    } else {
        Group2::Rotation
    };
    let n = a.size.unwrap_or(FIXTURE_SIZE);
    nonzero("size", n)?;
    let h: Field2 = match &a.input {
        Some(p) => fio::read_image(p)?,
        None => fixture::signal2(r, n, n),
    };
    let eps = a.epsilon.unwrap_or(8.0);
    let fa = FilterArgs {
        filter: a.filter.clone(),
        filter_image: None,
        k: a.k,
        epsilon: eps,
        n_radii: None,
        n_angles: None,
    };
    let f = fa.build(group, || fixture::filter2(r, eps))?;
    let fields = super::engine::FieldArgs {
        group,
        field: a.field.clone(),
        constant: None,
    };
    let t: XformField = fields.build(h.dims(), f.scale_window(), r)?;
    let rec = reconstruct_fine(&f, None, 2)?;
    let src = CenteredField::with_pitch(&rec, 0.5);
    let reach = f.render_radius() as f64;
    for &m in modes {
        let fast = extended(&h, &t, &f, &XConvPlan::for_filter(m, &f))?;
        tally.convolutions = fast.convolutions;
        let want = match (a.oracle, m) {
            (Oracle::Bilinear, Mode::Correlation) => xcorr_brute(&h, &t, &src, reach)?.output,
            (Oracle::Bilinear, Mode::Convolution) => xconv_brute(&h, &t, &src, reach)?.output,
            (Oracle::Spectral, Mode::Correlation) => xcorr_spectral(&h, &t, &f)?.output,
            (Oracle::Spectral, Mode::Convolution) => xconv_spectral(&h, &t, &f)?.output,
        };
        let e = rel(fast.output.values(), want.values());
        match m {
            Mode::Correlation => Tally::add(&mut tally.xcorr, e),
            Mode::Convolution => Tally::add(&mut tally.xconv, e),
        }
    }
    Ok(())
}

fn run3(a: &OracleArgs, modes: &[Mode], r: &mut rand_chacha::ChaCha8Rng, tally: &mut Tally) -> CliResult<()> {
    let n = a.size.unwrap_or(16);
    nonzero("size", n)?;
    let eps = a.epsilon.unwrap_or(6.0);
    let k = a.k.unwrap_or(2);
    let h: Field3 = fixture::signal3(r, n);
    let t = XformField::rotation3([n; 3], fixture::rotations(r, n * n * n))?;
    let src = fixture::filter3(r, eps);
    let f = decompose_rotation3(&src, k, 16, (2 * (k + 1)).max(8), eps)?;
    let rec = reconstruct3_fine(&f, None, 3)?;
    let vol = CenteredVolume::with_pitch(&rec, 1.0 / 3.0);
    let reach = f.render_radius() as f64;
    for &m in modes {
        let (fast, want) = match (a.oracle, m) {
            (Oracle::Bilinear, Mode::Correlation) => (xcorr_fast3(&h, &t, &f)?, xcorr_brute3(&h, &t, &vol, reach)?),
            (Oracle::Bilinear, Mode::Convolution) => (xconv_fast3(&h, &t, &f)?, xconv_brute3(&h, &t, &vol, reach)?),
            (Oracle::Spectral, Mode::Correlation) => (xcorr_fast3(&h, &t, &f)?, xcorr_spectral3(&h, &t, &f)?),
            (Oracle::Spectral, Mode::Convolution) => (xconv_fast3(&h, &t, &f)?, xconv_spectral3(&h, &t, &f)?),
        };
        tally.convolutions = fast.convolutions;
        let e = rel(fast.output.values(), want.output.values());
        match m {
            Mode::Correlation => Tally::add(&mut tally.xcorr, e),
            Mode::Convolution => Tally::add(&mut tally.xconv, e),
        }
    }
    Ok(())
}
