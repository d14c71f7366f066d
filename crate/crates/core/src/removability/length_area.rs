use alloc::vec::Vec;
use core::f64::consts::PI;

use super::NUDGE;
use crate::error::{Error, Result};
use crate::quadrature::{spherical_area, spherical_length, Path, Region, RegionKind, AREA_TOL, LENGTH_TOL};
use crate::runner::Runner;
use crate::sphere::{RationalMap, C64};

/// Radii or angles tried per scan.
pub const SCAN: usize = 64;
/// Relative slack on the length-area constants for quadrature error.
pub const LENGTH_AREA_SLACK: f64 = 1e-3;

/// The shortest curve found in a scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ShortCurve {
    /// Radius of the circle or angle of the segment.
    pub param: f64,
    pub length: f64,
    /// `C ℰ(A)`.
    pub bound: f64,
    pub energy: f64,
    pub constant: f64,
    /// `(param, length)` for every scanned curve.
    pub scan: Vec<(f64, f64)>,
}

impl ShortCurve {
    pub fn holds(&self) -> bool {
        self.length * self.length <= self.bound
    }
}

fn annulus(region: &Region) -> Result<(C64, f64, f64)> {
    match region.kind {
        RegionKind::Annulus { center, inner, outer } => Ok((center, inner, outer)),
        _ => Err(Error::InvalidArgument("length-area scans need an annulus".into())),
    }
}

/// `m = log(r_out / r_in) / 2π`.
pub fn annulus_modulus(inner: f64, outer: f64) -> f64 {
    libm::log(outer / inner) / (2.0 * PI)
}

fn scan<R: Runner>(
    f: &RationalMap,
    region: &Region,
    params: Vec<f64>,
    curve: &(dyn Fn(f64) -> Path + Sync),
    constant: f64,
    runner: &R,
) -> Result<ShortCurve> {
    let energy = spherical_area(f, region, AREA_TOL)?;
    let lengths: Vec<Result<f64>> = runner.map(params.len(), &|i| spherical_length(f, &curve(params[i]), LENGTH_TOL));
    let scan: Vec<(f64, f64)> = params.into_iter().zip(lengths.into_iter().collect::<Result<Vec<_>>>()?).collect();
    let (param, length) = scan.iter().copied().fold((f64::NAN, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    let constant = constant * (1.0 + LENGTH_AREA_SLACK);
    Ok(ShortCurve { param, length, bound: constant * energy, energy, constant, scan })
}

/// Shortest of [`SCAN`] concentric circles in the annulus. Averaging
/// `L(ρ)²/ρ ≤ 2π ∫ ρ_F² ρ dθ` over `log ρ` gives `L² ≤ ℰ(A)/m`.
pub fn short_circle<R: Runner>(f: &RationalMap, region: &Region, runner: &R) -> Result<ShortCurve> {
    let (c, r0, r1) = annulus(region)?;
    let m = annulus_modulus(r0, r1);
    let radii = (0..SCAN)
        .map(|i| {
            let mut rho = r0 * libm::pow(r1 / r0, (i as f64 + 0.5) / SCAN as f64);
            for e in &region.excluded {
                let d = (e - c).norm();
                if (d - rho).abs() < NUDGE {
                    rho = d + NUDGE;
                }
            }
            rho
        })
        .collect();
    scan(f, region, radii, &|rho| Path::circle(c, rho), 1.0 / m, runner)
}

/// Shortest of [`SCAN`] radial segments across the annulus. Averaging
/// `L(θ)² ≤ log(r_out/r_in) ∫ ρ_F² ρ dρ` over `θ` gives `L² ≤ m ℰ(A)`.
pub fn short_segment<R: Runner>(f: &RationalMap, region: &Region, runner: &R) -> Result<ShortCurve> {
    let (c, r0, r1) = annulus(region)?;
    let m = annulus_modulus(r0, r1);
    let angles = (0..SCAN)
        .map(|i| {
            let mut t = 2.0 * PI * (i as f64 + 0.5) / SCAN as f64;
            for e in &region.excluded {
                let d = e - c;
                let mut gap = (d.arg() - t).abs() % (2.0 * PI);
                gap = gap.min(2.0 * PI - gap);
                if d.norm() > 0.0 && gap < NUDGE {
                    t = d.arg() + NUDGE;
                }
            }
            t
        })
        .collect();
    let seg = |t: f64| {
        let u = C64::from_polar(1.0, t);
        Path::segment(c + u * r0, c + u * r1)
    };
    scan(f, region, angles, &seg, m, runner)
}
