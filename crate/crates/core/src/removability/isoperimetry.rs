use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::{spherical_area, spherical_length, Path, Region, RegionKind, AREA_TOL, LENGTH_TOL};
use crate::sphere::{RationalMap, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct Defect {
    pub energy: f64,
    /// Distance of the energy to `4πℤ`.
    pub defect: f64,
    /// `Σ L(γ_i)²` over the boundary circles.
    pub boundary_bound: f64,
    pub lengths: Vec<f64>,
}

impl Defect {
    pub fn ratio(&self) -> f64 {
        if self.boundary_bound > 0.0 {
            self.defect / self.boundary_bound
        } else if self.defect == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

fn boundary_circles(region: &Region) -> Result<Vec<(C64, f64)>> {
    match &region.kind {
        RegionKind::Disk { center, radius } => Ok(alloc::vec![(*center, *radius)]),
        RegionKind::Annulus { center, inner, outer } => Ok(alloc::vec![(*center, *outer), (*center, *inner)]),
        RegionKind::DiskMinusDisks { center, radius, holes } => {
            let mut v = alloc::vec![(*center, *radius)];
            v.extend(holes.iter().copied());
            Ok(v)
        }
        _ => Err(Error::InvalidArgument("defect needs a disk with circular holes".into())),
    }
}

/// Energy of a disk with circular holes against the squared spherical
/// lengths of its boundary circles.
pub fn isoperimetric_defect(f: &RationalMap, region: &Region) -> Result<Defect> {
    let circles = boundary_circles(region)?;
    let energy = spherical_area(f, region, AREA_TOL)?;
    let k = libm::round(energy / (4.0 * PI));
    let defect = (energy - 4.0 * PI * k).abs();
    let lengths: Vec<f64> = circles
        .iter()
        .map(|&(c, r)| spherical_length(f, &Path::circle(c, r), LENGTH_TOL))
        .collect::<Result<_>>()?;
    let boundary_bound = lengths.iter().map(|l| l * l).sum();
    Ok(Defect { energy, defect, boundary_bound, lengths })
}
