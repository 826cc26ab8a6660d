//! 3D rotational steering: one FFT correlation per `(l, m, m')` triple,
//! combined with Wigner-D weights per voxel.

use std::time::Instant;

use num_complex::Complex64;

use crate::decomp::SphFilter3;
use crate::error::{param, Error, Result};
use crate::fft::ConvPlan3;
use crate::field::Field3;
use crate::sh::{wigner_d_unit, WignerBlock};
use crate::xform::{Group, XformField};

use super::{ordered_sum, Clock, ComponentId, Mode, Response, XConvPlan};

/// Runs a 3D plan.
///
/// Correlation: `out(p) = Σ conj(D^l_{m,m'}(R_p))·(H ⋆ f_l^{m'}Y_l^m)(p)`.
/// Convolution: `out = Σ (H·D^l_{m,m'}(R_·)) ∗ f_l^{m'}Y_l^m`.
pub fn extended3(h: &Field3, t: &XformField, filter: &SphFilter3, plan: &XConvPlan) -> Result<Response<Field3>> {
    if h.dims() != t.dims() {
        return Err(Error::DimensionMismatch(format!(
            "signal is {:?} but transformation field is {:?}",
            h.dims(),
            t.dims()
        )));
    }
    t.expect_group(Group::Rotation3)?;
    if plan.group != Group::Rotation3 {
        return Err(Error::GroupMismatch {
            expected: "rotation3",
            found: plan.group.name(),
        });
    }
    let mut triples = Vec::with_capacity(plan.retained.len());
    for id in &plan.retained {
        match *id {
            ComponentId::Sph { l, m, mp }
                if l <= filter.band() && m.unsigned_abs() as usize <= l && mp.unsigned_abs() as usize <= l =>
            {
                triples.push((l, m, mp))
            }
            _ => return Err(param("plan", format!("{id:?} is not a component of the filter"))),
        }
    }
    let rots = t.rotations().expect("rotations");
    let lmax = triples.iter().map(|t| t.0).max().unwrap_or(0);
    let clock = Clock::default();
    // Wigner blocks per voxel, degree-major.
    let blocks: Vec<Vec<WignerBlock>> = clock.render(|| {
        rots.iter()
            .map(|&q| (0..=lmax).map(|l| wigner_d_unit(l, q)).collect())
            .collect()
    });
    let dims = h.dims();
    let conv = ConvPlan3::new(dims, filter.render_radius(), plan.boundary);
    let spec = match plan.mode {
        Mode::Correlation => Some(clock.render(|| conv.signal_spectrum(h))),
        Mode::Convolution => None,
    };
    let n = h.values().len();
    let out = ordered_sum(triples.len(), n, |i| {
        let (l, m, mp) = triples[i];
        let kernel = clock.render(|| filter.render_pair(l, m, mp));
        match plan.mode {
            Mode::Correlation => {
                let g = clock.convolve(|| {
                    conv.convolve_spectra(
                        spec.as_ref().expect("spectrum"),
                        &conv.kernel_spectrum(&kernel.adjoint()),
                    )
                });
                g.values()
                    .iter()
                    .zip(&blocks)
                    .map(|(v, b)| v * b[l].get(m, mp).conj())
                    .collect()
            }
            Mode::Convolution => {
                let vals: Vec<Complex64> = h
                    .values()
                    .iter()
                    .zip(&blocks)
                    .map(|(v, b)| v * b[l].get(m, mp))
                    .collect();
                let sig = Field3::from_values(dims, vals).expect("dims");
                clock.convolve(|| conv.convolve(&sig, &kernel)).values().to_vec()
            }
        }
    });
    let t0 = Instant::now();
    let output = Field3::from_values(dims, out)?;
    let (convolutions, timings) = clock.finish(t0.elapsed());
    Ok(Response {
        output,
        plan: plan.clone(),
        convolutions,
        timings,
    })
}

pub fn xcorr_fast3(h: &Field3, t: &XformField, filter: &SphFilter3) -> Result<Response<Field3>> {
    extended3(h, t, filter, &XConvPlan::for_sph(Mode::Correlation, filter))
}

pub fn xconv_fast3(h: &Field3, t: &XformField, filter: &SphFilter3) -> Result<Response<Field3>> {
    extended3(h, t, filter, &XConvPlan::for_sph(Mode::Convolution, filter))
}
