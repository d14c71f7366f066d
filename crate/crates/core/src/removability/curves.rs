use alloc::vec::Vec;

use super::length_area::{short_circle, short_segment};
use super::{slope, ALPHA_FLOOR, SMALL_ENERGY};
use crate::error::{Error, Result};
use crate::quadrature::{spherical_area, Region, AREA_TOL};
use crate::runner::Runner;
use crate::sphere::{RationalMap, C64};

/// Short circles `γ̂_n` with radii in `(0.9 r/2ⁿ, r/2ⁿ)` and radial
/// segments `ℓ̂_n` joining `γ̂_n` to `γ̂_{n+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSystem {
    pub center: C64,
    pub r: f64,
    pub radii: Vec<f64>,
    pub circle_lengths: Vec<f64>,
    pub angles: Vec<f64>,
    pub segment_lengths: Vec<f64>,
    /// `β` in the fit `L(γ̂_n) ≈ K 2^(−β n)`; infinite when all lengths
    /// vanish.
    pub beta: f64,
    /// `max(L(γ̂_0), K)`.
    pub constant: f64,
    /// The same for the segments.
    pub segment_constant: f64,
    /// Circle lengths are at most `constant · 2^(−α n/2)` with
    /// `α =` [`ALPHA_FLOOR`], and likewise for the segments.
    pub decay_holds: bool,
}

/// Fitted `β` and `max(L_0, K)`.
fn envelope(lengths: &[f64]) -> (f64, f64) {
    let first = lengths.first().copied().unwrap_or(0.0);
    let pts: Vec<(f64, f64)> =
        lengths.iter().enumerate().filter(|(_, &l)| l > 0.0).map(|(n, &l)| (n as f64, libm::log2(l))).collect();
    match slope(&pts) {
        Some((b, a)) => (-b, first.max(libm::exp2(a))),
        None if pts.is_empty() => (f64::INFINITY, 0.0),
        None => (f64::NAN, first),
    }
}

pub fn build_curve_system<R: Runner>(
    f: &RationalMap,
    p: C64,
    r: f64,
    depth: usize,
    exceptional: &[C64],
    runner: &R,
) -> Result<CurveSystem> {
    let energy = spherical_area(f, &Region::disk(p, 2.0 * r)?, AREA_TOL)?;
    if energy > SMALL_ENERGY {
        return Err(Error::Admissibility { energy, limit: SMALL_ENERGY });
    }
    let mut radii = Vec::with_capacity(depth + 1);
    let mut circle_lengths = Vec::with_capacity(depth + 1);
    for n in 0..=depth {
        let outer = libm::ldexp(r, -(n as i32));
        let a = Region::annulus(p, 0.9 * outer, outer)?.with_excluded(exceptional.to_vec());
        let c = short_circle(f, &a, runner)?;
        radii.push(c.param);
        circle_lengths.push(c.length);
    }
    let mut angles = Vec::with_capacity(depth);
    let mut segment_lengths = Vec::with_capacity(depth);
    for n in 0..depth {
        let a = Region::annulus(p, radii[n + 1], radii[n])?.with_excluded(exceptional.to_vec());
        let s = short_segment(f, &a, runner)?;
        angles.push(s.param);
        segment_lengths.push(s.length);
    }
    let (beta, constant) = envelope(&circle_lengths);
    let (_, segment_constant) = envelope(&segment_lengths);
    let below = |ls: &[f64], k: f64| {
        ls.iter().enumerate().all(|(n, &l)| l <= k * libm::exp2(-ALPHA_FLOOR * n as f64 / 2.0) * (1.0 + 1e-9))
    };
    let decay_holds = below(&circle_lengths, constant) && below(&segment_lengths, segment_constant);
    Ok(CurveSystem {
        center: p,
        r,
        radii,
        circle_lengths,
        angles,
        segment_lengths,
        beta,
        constant,
        segment_constant,
        decay_holds,
    })
}
