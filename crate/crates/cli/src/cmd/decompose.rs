use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, ValueEnum};
use serde::Serialize;
use xconv::apps::filters::anisotropic_gaussian;
use xconv::decomp::{decompose_rotation3, reconstruct, reconstruct3, FreqFilter2, SphFilter3};
use xconv::{CenteredField, CenteredVolume, Field2, Field3};

use super::*;
use crate::error::{param, CliResult};
use crate::fixture;
use crate::io::container::{self, Contents};
use crate::io::{self as fio, pfm};
use crate::sidecar::Sidecar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecompGroup {
    Rotation,
    Scale,
    Rotation3,
}

#[derive(Args, Serialize)]
pub struct DecomposeArgs {
    /// 2D filter image; its center pixel is the origin.
    #[arg(long, conflicts_with_all = ["gaussian", "volume"])]
    pub filter_image: Option<PathBuf>,

    /// Gaussian filter with this sigma (along x).
    #[arg(long, conflicts_with = "volume")]
    pub gaussian: Option<f64>,

    /// Gaussian sigma along y [default: --gaussian].
    #[arg(long, requires = "gaussian")]
    pub sigma_y: Option<f64>,

    /// 3D filter as stacked slices, centered; needs --depth.
    #[arg(long, requires = "depth")]
    pub volume: Option<PathBuf>,

    /// Slices in --volume.
    #[arg(long)]
    pub depth: Option<usize>,

    #[arg(long, value_enum, default_value_t = DecompGroup::Rotation)]
    pub group: DecompGroup,

    /// Band limit: K for 2D groups (|k| <= K/2 kept), maximum degree for
    /// rotation3 [default: full band in 2D, 2 in 3D].
    #[arg(long = "k", visible_alias = "K")]
    pub k: Option<usize>,

    /// Support radius in pixels.
    #[arg(long, default_value_t = 8.0)]
    pub epsilon: f64,

    /// Radial samples [default: 2⌈ε⌉ rotation, 64 scale, 16 rotation3].
    #[arg(long)]
    pub n_radii: Option<usize>,

    /// Angular samples [default: 4⌈ε⌉ rotation, 32 scale, max(8, 2(K+1))
    /// rotation3].
    #[arg(long)]
    pub n_angles: Option<usize>,

    /// Filter container to write (.xcf).
    #[arg(short, long)]
    pub output: PathBuf,

    /// PFM stack of the rendered components, one plane per frequency in
    /// stored order (complex as re, im, 0). For rotation3 each (l, m) is a
    /// block of z-slices.
    #[arg(long)]
    pub components: Option<PathBuf>,

    /// PFM of the band-limited reconstruction (a slice stack for rotation3).
    #[arg(long)]
    pub reconstruct: Option<PathBuf>,
}

fn check_pfm(name: &str, p: &Option<PathBuf>) -> CliResult<()> {
    match p {
        Some(p)
            if p.extension()
                .and_then(|e| e.to_str())
                .map(str::to_ascii_lowercase)
                .as_deref()
                != Some("pfm") =>
        {
            Err(param(name, format!("{} must end in .pfm", p.display())))
        }
        _ => Ok(()),
    }
}

pub fn decompose(a: DecomposeArgs, seed: u64) -> CliResult<()> {
    positive("epsilon", a.epsilon)?;
    check_pfm("components", &a.components)?;
    check_pfm("reconstruct", &a.reconstruct)?;
    if let Some(s) = a.gaussian {
        positive("gaussian", s)?;
    }
    if let Some(s) = a.sigma_y {
        positive("sigma-y", s)?;
    }
    let three = a.group == DecompGroup::Rotation3;
    if three && a.filter_image.is_some() {
        return Err(param(
            "filter-image",
            "rotation3 needs --volume, --gaussian or the built-in filter",
        ));
    }
    if !three && a.volume.is_some() {
        return Err(param("volume", "a volume decomposes only under --group rotation3"));
    }
    let start = Instant::now();
    let mut s = Sidecar::new("decompose", &seeded(&a, seed));
    let t0 = Instant::now();
    let mut r = fixture::rng(seed ^ 0x5eed);
    let contents = if three {
        let k = a.k.unwrap_or(2);
        let nr = a.n_radii.unwrap_or(16);
        let na = a.n_angles.unwrap_or((2 * (k + 1)).max(8));
        nonzero("n-radii", nr)?;
        let f = match (&a.volume, a.gaussian) {
            (Some(p), _) => {
                let v = fio::read_volume(p, a.depth.unwrap_or(0))?;
                decompose_rotation3(&CenteredVolume::centered(&v), k, nr, na, a.epsilon)?
            }
            (None, Some(sx)) => {
                let sy = a.sigma_y.unwrap_or(sx);
                let g =
                    move |x: f64, y: f64, z: f64| anisotropic_gaussian(sx, sy)(x, y) * (-z * z / (2.0 * sy * sy)).exp();
                decompose_rotation3(&g, k, nr, na, a.epsilon)?
            }
            (None, None) => decompose_rotation3(&fixture::filter3(&mut r, a.epsilon), k, nr, na, a.epsilon)?,
        };
        Contents::Filter3(f)
    } else {
        let group = if a.group == DecompGroup::Scale {
            Group2::Scale
        } else {
            Group2::Rotation
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
        let f = match (&a.filter_image, a.gaussian) {
            (Some(p), _) => {
                let img = fio::read_image(p)?;
                decompose_with(&CenteredField::centered(&img), group, &fa)?
            }
            (None, Some(sx)) => decompose_with(&anisotropic_gaussian(sx, a.sigma_y.unwrap_or(sx)), group, &fa)?,
            (None, None) => decompose_with(&fixture::filter2(&mut r, a.epsilon), group, &fa)?,
        };
        Contents::Filter2(f)
    };
    s.timing("decompose", t0.elapsed());
    container::write(&a.output, &contents)?;
    let energies = match &contents {
        Contents::Filter2(f) => report2(f, &a, &mut s)?,
        Contents::Filter3(f) => report3(f, &a, &mut s)?,
        Contents::Descriptors(_) => unreachable!(),
    };
    s.output(&a.output).result("energies", energies);
    finish(&mut s, &a.output, start.elapsed())
}

#[derive(Serialize)]
struct Energy {
    l: Option<usize>,
    k: i32,
    energy: f64,
}

fn report2(f: &FreqFilter2, a: &DecomposeArgs, s: &mut Sidecar) -> CliResult<Vec<Energy>> {
    println!(
        "{} K={} components {}",
        f.group().name(),
        f.band(),
        f.components().len()
    );
    let mut out = Vec::new();
    for k in f.by_energy() {
        let e = f.energy(f.component(k).expect("stored"));
        println!("  k={k:>4}  energy {e:.6e}");
        out.push(Energy { l: None, k, energy: e });
    }
    if let Some(p) = &a.components {
        let planes: Vec<Field2> = f
            .frequencies()
            .iter()
            .map(|&k| reconstruct(f, Some(&[k])))
            .collect::<Result<_, _>>()?;
        pfm::write(p, &stack(&planes))?;
        s.result("components_file", p);
    }
    if let Some(p) = &a.reconstruct {
        pfm::write(p, &pfm::Pfm::from_field(&reconstruct(f, None)?))?;
        s.result("reconstruction_file", p);
    }
    Ok(out)
}

fn report3(f: &SphFilter3, a: &DecomposeArgs, s: &mut Sidecar) -> CliResult<Vec<Energy>> {
    println!("rotation3 degree {} components {}", f.band(), f.components().len());
    let dr = f.r_max() / f.n_radii() as f64;
    let mut out = Vec::new();
    for c in f.components() {
        let e: f64 = c
            .profile
            .iter()
            .enumerate()
            .map(|(j, z)| ((j as f64 + 0.5) * dr).powi(2) * z.norm_sqr())
            .sum();
        println!("  l={} m={:>3}  energy {e:.6e}", c.l, c.m);
        out.push(Energy {
            l: Some(c.l),
            k: c.m,
            energy: e,
        });
    }
    if let Some(p) = &a.components {
        let planes: Vec<Field2> = f
            .components()
            .iter()
            .map(|c| reconstruct3(f, Some(&[(c.l, c.m)])).map(|v| fio::volume_as_stack(&v)))
            .collect::<Result<_, _>>()?;
        pfm::write(p, &stack(&planes))?;
        s.result("components_file", p);
    }
    if let Some(p) = &a.reconstruct {
        let v: Field3 = reconstruct3(f, None)?;
        pfm::write(p, &pfm::Pfm::from_field(&fio::volume_as_stack(&v)))?;
        s.result("reconstruction_file", p);
    }
    Ok(out)
}

/// Planes of equal size stacked top to bottom.
fn stack(planes: &[Field2]) -> pfm::Pfm {
    let (w, h) = planes[0].dims();
    let values = planes.iter().flat_map(|p| p.values().iter().copied()).collect();
    pfm::Pfm::from_field(
        &Field2::from_complex(w, h * planes.len(), values)
            .expect("equal planes")
            .retag(),
    )
}
