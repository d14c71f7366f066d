use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use super::components::trace_boundary;
use super::probe::ProbeBall;
use crate::error::{Error, Result};
use crate::fit::{fit_rational, Fit};
use crate::sphere::{AffineMap, RationalMap, SpherePoint, C64};

/// Largest accepted mean squared chordal residual of a bubble fit.
pub const TOL_FIT: f64 = 1e-6;

/// Polar sample grid `|ζ| ≤ radius`.
pub fn sample_grid(radius: f64) -> Vec<C64> {
    let mut out = alloc::vec![C64::new(0.0, 0.0)];
    let mut r = radius;
    for _ in 0..6 {
        for k in 0..24 {
            let t = 2.0 * PI * (k as f64 + 0.5 * (out.len() % 2) as f64) / 24.0;
            out.push(C64::from_polar(r, t));
        }
        r *= 0.5;
    }
    out
}

/// Fits a map of the given degree to `ζ ↦ F(center + scale·ζ)` on
/// `|ζ| ≤ 4`, skipping samples inside the `exclusions` (in `ζ`).
pub fn rescale_fit(f: &RationalMap, gauge: AffineMap, degree: usize, exclusions: &[(C64, f64)]) -> Result<Fit> {
    let samples: Vec<(C64, SpherePoint)> = sample_grid(4.0)
        .into_iter()
        .filter(|z| exclusions.iter().all(|(c, r)| (z - c).norm() > *r))
        .map(|z| (z, f.value(gauge.apply(z))))
        .collect();
    if samples.len() < 4 * degree + 4 {
        return Err(Error::Fit(format!("only {} samples outside the exclusions", samples.len())));
    }
    let fit = fit_rational(&samples, degree)?;
    if fit.map.degree() < degree {
        return Err(Error::Fit(format!("degree {} below cluster size {degree}", fit.map.degree())));
    }
    if !(fit.mse <= TOL_FIT) {
        return Err(Error::Fit(format!("mean squared residual {:.3e} above {TOL_FIT:e}", fit.mse)));
    }
    Ok(fit)
}

/// Affine map `A` putting `R ∘ A` in the canonical gauge: the preimages of
/// `w` have barycenter 0, `R⁻¹(𝔅)` has diameter 1, and the farthest
/// preimage of `w + ρ` lies on the positive real axis.
pub fn canonical_gauge(r: &RationalMap, ball: &ProbeBall) -> Result<AffineMap> {
    let d = r.degree();
    if d == 0 {
        return Err(Error::InvalidArgument("constant map has no gauge".into()));
    }
    let roots = r.preimages(SpherePoint::Finite(ball.w))?;
    if roots.len() != d {
        return Err(Error::RootCount { expected: d, found: roots.len() });
    }
    let b = roots.iter().sum::<C64>() / d as f64;
    let mut pts = Vec::new();
    for &z in &roots {
        pts.extend(trace_boundary(r, z, ball)?);
    }
    let mut s: f64 = 0.0;
    for (i, a) in pts.iter().enumerate() {
        for q in &pts[i + 1..] {
            s = s.max((a - q).norm());
        }
    }
    if !(s > 0.0) {
        return Err(Error::InvalidArgument("preimage of the probe ball has zero diameter".into()));
    }
    let edge = r.preimages(SpherePoint::Finite(ball.boundary_point(0.0)))?;
    let far = edge
        .iter()
        .map(|z| (z - b) / s)
        .fold(C64::new(0.0, 0.0), |acc, z| if z.norm() > acc.norm() + 1e-12 { z } else { acc });
    let rot = if far.norm() > 0.0 { far / far.norm() } else { C64::new(1.0, 0.0) };
    AffineMap::new(rot * s, b)
}

/// `R ∘ A` for the canonical `A`.
pub fn canonical_form(r: &RationalMap, ball: &ProbeBall) -> Result<(RationalMap, AffineMap)> {
    let a = canonical_gauge(r, ball)?;
    Ok((r.precompose_affine(&a)?, a))
}

/// Sup chordal distance between the canonical forms of two maps, small
/// exactly when they agree up to affine precomposition.
pub fn affine_distance(r1: &RationalMap, r2: &RationalMap, ball: &ProbeBall) -> Result<f64> {
    if r1.degree() != r2.degree() {
        return Ok(2.0);
    }
    let (c1, _) = canonical_form(r1, ball)?;
    let (c2, _) = canonical_form(r2, ball)?;
    Ok(c1.sup_chordal_distance(&c2, &sample_grid(2.0)))
}
