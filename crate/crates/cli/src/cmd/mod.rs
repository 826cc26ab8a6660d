pub mod apps;
pub mod decompose;
pub mod engine;
pub mod oracle;

use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, ValueEnum};
use serde::Serialize;
use xconv::decomp::{decompose_rotation2, decompose_scale2, FreqFilter2, ScaleWindow};
use xconv::engine::Timings;
use xconv::{CenteredField, Field2, FilterSource2, Group};

use crate::error::{param, CliResult};
use crate::io::container::{self, Contents};
use crate::io::{self as fio, pgm::Mapping};
use crate::sidecar::Sidecar;

pub fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let v = parse_list(s, 2)?;
    Ok((v[0], v[1]))
}

pub fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    let v = parse_list(s, 3)?;
    Ok([v[0], v[1], v[2]])
}

fn parse_list(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("`{t}` is not a number")))
        .collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(format!("expected {n} comma-separated numbers, got {}", v.len()));
    }
    Ok(v)
}

fn parse_bits(s: &str) -> Result<u8, String> {
    match s {
        "8" => Ok(8),
        "16" => Ok(16),
        _ => Err(format!("`{s}` is not 8 or 16")),
    }
}

pub fn positive(name: &str, v: f64) -> CliResult<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(param(name, format!("must be positive, got {v}")))
    }
}

pub fn nonzero(name: &str, v: usize) -> CliResult<()> {
    if v > 0 {
        Ok(())
    } else {
        Err(param(name, "must be at least 1"))
    }
}

#[derive(Args, Serialize)]
pub struct OutputArgs {
    /// Output image. `.pfm` keeps values (complex as re, im, 0); `.pgm` is
    /// the real part, min-max normalized, mapping in the sidecar.
    #[arg(short, long)]
    pub output: PathBuf,

    /// Bits per sample for `.pgm` output.
    #[arg(long, default_value_t = 8, value_parser = parse_bits)]
    pub bit_depth: u8,
}

impl OutputArgs {
    /// Rejects bad extensions before any computation.
    pub fn validate(&self) -> CliResult<()> {
        match self
            .output
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .as_deref()
        {
            Some("pgm") | Some("pfm") => Ok(()),
            _ => Err(param(
                "output",
                format!("{} must end in .pgm or .pfm", self.output.display()),
            )),
        }
    }

    pub fn write(&self, field: &Field2) -> CliResult<Option<Mapping>> {
        fio::write_image(&self.output, field, self.bit_depth)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Group2 {
    Rotation,
    Scale,
}

impl Group2 {
    pub fn group(self) -> Group {
        match self {
            Group2::Rotation => Group::Rotation2,
            Group2::Scale => Group::Scale2,
        }
    }
}

/// How a 2D filter is obtained and sampled.
#[derive(Args, Serialize)]
pub struct FilterArgs {
    /// Decomposed filter container written by `decompose`.
    #[arg(long, conflicts_with = "filter_image")]
    pub filter: Option<PathBuf>,

    /// Filter image; its center pixel is the origin. Without either flag a
    /// random smooth filter drawn from the seed is used.
    #[arg(long)]
    pub filter_image: Option<PathBuf>,

    /// Band limit K: keeps frequencies |k| <= K/2 [default: full band of the
    /// sampling, n_angles for rotation and n_radii for scale].
    #[arg(long = "k", visible_alias = "K")]
    pub k: Option<usize>,

    /// Filter support radius in pixels.
    #[arg(long, default_value_t = 8.0)]
    pub epsilon: f64,

    /// Radial samples [default: 2⌈ε⌉ for rotation, 64 for scale].
    #[arg(long)]
    pub n_radii: Option<usize>,

    /// Angular samples [default: 4⌈ε⌉ for rotation, 32 for scale].
    #[arg(long)]
    pub n_angles: Option<usize>,
}

impl FilterArgs {
    pub fn validate(&self) -> CliResult<()> {
        positive("epsilon", self.epsilon)?;
        if let Some(n) = self.n_radii {
            nonzero("n-radii", n)?;
        }
        if let Some(n) = self.n_angles {
            nonzero("n-angles", n)?;
        }
        Ok(())
    }

    /// Sampling `(n_radii, n_angles)` and band for `group`.
    pub fn sampling(&self, group: Group2) -> (usize, usize, usize) {
        let e = self.epsilon.ceil() as usize;
        let (nr, na) = match group {
            Group2::Rotation => (self.n_radii.unwrap_or(2 * e), self.n_angles.unwrap_or(4 * e)),
            Group2::Scale => (self.n_radii.unwrap_or(64), self.n_angles.unwrap_or(32)),
        };
        let full = match group {
            Group2::Rotation => na,
            Group2::Scale => nr,
        };
        (nr, na, self.k.unwrap_or(full))
    }

    /// Loads or decomposes the filter. `fallback` supplies the random
    /// filter when no file is given.
    pub fn build<F: FilterSource2 + Sync>(
        &self,
        group: Group2,
        fallback: impl FnOnce() -> F,
    ) -> CliResult<FreqFilter2> {
        if let Some(p) = &self.filter {
            return match container::read(p)? {
                Contents::Filter2(f) if f.group() == group.group() => Ok(f),
                c => Err(param(
                    "filter",
                    format!(
                        "{} holds a {} filter, the field is {}",
                        p.display(),
                        container::group_name(&c),
                        group.group().name()
                    ),
                )),
            };
        }
        match &self.filter_image {
            Some(p) => {
                let img = fio::read_image(p)?;
                decompose_with(&CenteredField::centered(&img), group, self)
            }
            None => decompose_with(&fallback(), group, self),
        }
    }
}

pub fn decompose_with<S: FilterSource2 + ?Sized>(src: &S, group: Group2, a: &FilterArgs) -> CliResult<FreqFilter2> {
    let (nr, na, k) = a.sampling(group);
    Ok(match group {
        Group2::Rotation => decompose_rotation2(src, k, nr, na, a.epsilon)?,
        Group2::Scale => decompose_scale2(src, k, nr, na, ScaleWindow::for_support(a.epsilon))?,
    })
}

pub fn record_timings(s: &mut Sidecar, t: &Timings) {
    s.timing("render", t.render)
        .timing("convolve", t.convolve)
        .timing("combine", t.combine);
}

pub fn finish(s: &mut Sidecar, primary: &Path, total: Duration) -> CliResult<()> {
    s.timing("total", total);
    let p = s.write_for(primary)?;
    println!("wrote {} and {}", primary.display(), p.display());
    Ok(())
}

/// Command parameters with the global seed merged in, for the sidecar.
pub fn seeded(a: &impl Serialize, seed: u64) -> serde_json::Value {
    let mut v = serde_json::to_value(a).expect("parameters serialize");
    if let Some(m) = v.as_object_mut() {
        m.insert("seed".into(), seed.into());
    }
    v
}
