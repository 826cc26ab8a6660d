//! Little-endian binary container for decomposed filters and descriptor
//! sets.
//!
//! ```text
//! magic    b"XCVF"
//! version  u32 = 1
//! group    u32  1 rotation2, 2 scale2, 3 rotation3, 4 descriptor set
//! K        u32  band limit (0 for descriptor sets)
//! dims     u32 × 3
//!            rotation2  n_radii, n_angles, components
//!            scale2     n_radii, n_angles, components
//!            rotation3  n_radii, n_angular, components
//!            ECD        side, count, 0
//! geometry f64 × 6
//!            rotation2  r_max, 0…
//!            scale2     r_min, r_max, support, taper, center re, center im
//!            rotation3  r_max, 0…
//!            ECD        0…
//! planes   one per component / descriptor
//!            rotation2  i32 k,        n_radii × (f64 re, f64 im)
//!            scale2     i32 k,        n_angles × (f64 re, f64 im)
//!            rotation3  u32 l, i32 m, n_radii × (f64 re, f64 im)
//!            ECD        f64 x, f64 y, f64 support, u32 degenerate, side² × f64
//! ```

use std::path::Path;

use xconv::apps::Descriptor;
use xconv::decomp::{Component2, FreqFilter2, ScaleWindow, SphComponent, SphFilter3};
use xconv::{Complex64, Group};

use crate::error::{format_err, io_err, CliResult};

const MAGIC: &[u8; 4] = b"XCVF";
const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub enum Contents {
    Filter2(FreqFilter2),
    Filter3(SphFilter3),
    Descriptors(Vec<Descriptor>),
}

#[derive(Default)]
struct Writer(Vec<u8>);

impl Writer {
    fn u32(&mut self, v: u32) {
        self.0.extend(v.to_le_bytes());
    }
    fn i32(&mut self, v: i32) {
        self.0.extend(v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend(v.to_le_bytes());
    }
    fn c64(&mut self, v: Complex64) {
        self.f64(v.re);
        self.f64(v.im);
    }
    fn header(&mut self, group: u32, band: usize, dims: [usize; 3], geom: [f64; 6]) {
        self.0.extend(MAGIC);
        self.u32(VERSION);
        self.u32(group);
        self.u32(band as u32);
        dims.iter().for_each(|&d| self.u32(d as u32));
        geom.iter().for_each(|&g| self.f64(g));
    }
}

pub fn encode(c: &Contents) -> Vec<u8> {
    let mut w = Writer::default();
    match c {
        Contents::Filter2(f) => {
            let comps = f.components();
            match f.scale_window() {
                None => {
                    w.header(
                        1,
                        f.band(),
                        [f.n_radii(), f.n_angles(), comps.len()],
                        [f.r_max(), 0.0, 0.0, 0.0, 0.0, 0.0],
                    );
                }
                Some(win) => {
                    let c = f.center_value().unwrap_or_default();
                    w.header(
                        2,
                        f.band(),
                        [f.n_radii(), f.n_angles(), comps.len()],
                        [win.r_min, win.r_max, win.support, win.taper, c.re, c.im],
                    );
                }
            }
            for comp in comps {
                w.i32(comp.k);
                comp.profile.iter().for_each(|&v| w.c64(v));
            }
        }
        Contents::Filter3(f) => {
            let comps = f.components();
            w.header(
                3,
                f.band(),
                [f.n_radii(), f.n_angular(), comps.len()],
                [f.r_max(), 0.0, 0.0, 0.0, 0.0, 0.0],
            );
            for comp in comps {
                w.u32(comp.l as u32);
                w.i32(comp.m);
                comp.profile.iter().for_each(|&v| w.c64(v));
            }
        }
        Contents::Descriptors(ds) => {
            let side = ds
                .first()
                .map_or(0, |d| (d.values.len() as f64).sqrt().round() as usize);
            w.header(4, 0, [side, ds.len(), 0], [0.0; 6]);
            for d in ds {
                w.f64(d.keypoint.0);
                w.f64(d.keypoint.1);
                w.f64(d.support);
                w.u32(d.degenerate as u32);
                d.values.iter().for_each(|&v| w.f64(v));
            }
        }
    }
    w.0
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl Reader<'_> {
    fn take<const N: usize>(&mut self) -> CliResult<[u8; N]> {
        let s = self
            .bytes
            .get(self.pos..self.pos + N)
            .ok_or_else(|| format_err(self.path, "truncated container"))?;
        self.pos += N;
        Ok(s.try_into().expect("length checked"))
    }
    fn u32(&mut self) -> CliResult<u32> {
        self.take().map(u32::from_le_bytes)
    }
    fn i32(&mut self) -> CliResult<i32> {
        self.take().map(i32::from_le_bytes)
    }
    fn f64(&mut self) -> CliResult<f64> {
        self.take().map(f64::from_le_bytes)
    }
    fn c64(&mut self) -> CliResult<Complex64> {
        Ok(Complex64::new(self.f64()?, self.f64()?))
    }
    fn profile(&mut self, n: usize) -> CliResult<Vec<Complex64>> {
        (0..n).map(|_| self.c64()).collect()
    }
}

pub fn decode(bytes: &[u8], path: &Path) -> CliResult<Contents> {
    if !bytes.starts_with(MAGIC) {
        return Err(format_err(path, "not an xconv container (bad magic)"));
    }
    let mut r = Reader { bytes, pos: 4, path };
    let version = r.u32()?;
    if version != VERSION {
        return Err(format_err(path, format!("unsupported container version {version}")));
    }
    let group = r.u32()?;
    let band = r.u32()? as usize;
    let dims = [r.u32()? as usize, r.u32()? as usize, r.u32()? as usize];
    let mut geom = [0.0; 6];
    for g in geom.iter_mut() {
        *g = r.f64()?;
    }
    let bad = |e: xconv::Error| format_err(path, e.to_string());
    let out = match group {
        1 | 2 => {
            let len = if group == 1 { dims[0] } else { dims[1] };
            let mut comps = Vec::with_capacity(dims[2]);
            for _ in 0..dims[2] {
                let k = r.i32()?;
                comps.push(Component2 {
                    k,
                    profile: r.profile(len)?,
                });
            }
            let f = if group == 1 {
                FreqFilter2::from_radial_profiles(dims[1], geom[0], comps)
            } else {
                let window = ScaleWindow {
                    r_min: geom[0],
                    r_max: geom[1],
                    support: geom[2],
                    taper: geom[3],
                };
                FreqFilter2::from_log_polar_profiles(dims[0], window, Complex64::new(geom[4], geom[5]), comps)
            }
            .map_err(bad)?;
            if f.band() / 2 != band / 2 {
                return Err(format_err(
                    path,
                    format!("band {band} disagrees with stored frequencies"),
                ));
            }
            Contents::Filter2(f)
        }
        3 => {
            let mut comps = Vec::with_capacity(dims[2]);
            for _ in 0..dims[2] {
                let l = r.u32()? as usize;
                let m = r.i32()?;
                comps.push(SphComponent {
                    l,
                    m,
                    profile: r.profile(dims[0])?,
                });
            }
            Contents::Filter3(SphFilter3::from_profiles(band, dims[1], geom[0], comps).map_err(bad)?)
        }
        4 => {
            let n = dims[0] * dims[0];
            let mut ds = Vec::with_capacity(dims[1]);
            for _ in 0..dims[1] {
                let keypoint = (r.f64()?, r.f64()?);
                let support = r.f64()?;
                let degenerate = r.u32()? != 0;
                let values = (0..n).map(|_| r.f64()).collect::<CliResult<_>>()?;
                ds.push(Descriptor {
                    keypoint,
                    support,
                    values,
                    degenerate,
                });
            }
            Contents::Descriptors(ds)
        }
        g => return Err(format_err(path, format!("unknown group tag {g}"))),
    };
    if r.pos != bytes.len() {
        return Err(format_err(path, "trailing bytes after container"));
    }
    Ok(out)
}

pub fn read(path: &Path) -> CliResult<Contents> {
    decode(&std::fs::read(path).map_err(io_err(path))?, path)
}

pub fn write(path: &Path, c: &Contents) -> CliResult<()> {
    std::fs::write(path, encode(c)).map_err(io_err(path))
}

pub fn group_name(c: &Contents) -> &'static str {
    match c {
        Contents::Filter2(f) => match f.group() {
            Group::Scale2 => "scale2",
            _ => "rotation2",
        },
        Contents::Filter3(_) => "rotation3",
        Contents::Descriptors(_) => "descriptors",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use xconv::decomp::{decompose_rotation2, decompose_rotation3, decompose_scale2};

    fn filter(x: f64, y: f64) -> Complex64 {
        Complex64::new((-(x * x + 2.0 * y * y) / 6.0).exp(), 0.1 * x)
    }

    fn round_trip(c: Contents) {
        let p = Path::new("t.xcf");
        assert_eq!(decode(&encode(&c), p).unwrap(), c);
    }

    #[test]
    fn rotation2_round_trip() {
        round_trip(Contents::Filter2(decompose_rotation2(&filter, 6, 5, 16, 4.0).unwrap()));
    }

    #[test]
    fn scale2_round_trip() {
        let f = decompose_scale2(&filter, 8, 16, 12, ScaleWindow::for_support(4.0)).unwrap();
        round_trip(Contents::Filter2(f));
    }

    #[test]
    fn rotation3_round_trip() {
        let g = |x: f64, y: f64, z: f64| Complex64::new((-(x * x + y * y + z * z) / 4.0).exp() * (1.0 + z), 0.0);
        round_trip(Contents::Filter3(decompose_rotation3(&g, 2, 4, 8, 3.0).unwrap()));
    }

    #[test]
    fn descriptors_round_trip() {
        let d = Descriptor {
            keypoint: (3.0, 4.5),
            support: 1.0,
            values: (0..9).map(|i| i as f64 / 9.0).collect(),
            degenerate: false,
        };
        round_trip(Contents::Descriptors(vec![d.clone(), d]));
    }

    #[test]
    fn corrupt_input_is_rejected() {
        let p = Path::new("t.xcf");
        let mut b = encode(&Contents::Filter2(decompose_rotation2(&filter, 2, 3, 8, 3.0).unwrap()));
        assert!(decode(&b[..b.len() - 1], p).is_err());
        b[0] = b'Y';
        assert!(decode(&b, p).is_err());
    }
}
