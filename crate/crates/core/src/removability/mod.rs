//! Quantitative checks of the estimates behind removability: isoperimetric
//! defect, decay of energy on small disks, short circles and segments in
//! annuli, curve systems shrinking to a point, and Hölder moduli.
//!
//! Exceptional sets are finite and stored in [`Region::excluded`]; curves
//! passing through one of their points are nudged off it by [`NUDGE`].
//!
//! [`Region::excluded`]: crate::quadrature::Region

mod curves;
mod decay;
mod holder;
mod isoperimetry;
mod length_area;

use alloc::vec::Vec;

pub use curves::{build_curve_system, CurveSystem};
pub use decay::{energy_decay, DecayReport};
pub use holder::{holder_modulus, HolderReport};
pub use isoperimetry::{isoperimetric_defect, Defect};
pub use length_area::{annulus_modulus, short_circle, short_segment, ShortCurve, LENGTH_AREA_SLACK, SCAN};

use crate::sphere::RationalMap;

/// Exponent asserted in the decay estimates.
pub const ALPHA_FLOOR: f64 = 0.5;
/// Energy bound under which the decay estimates apply.
pub const SMALL_ENERGY: f64 = 2.0 * core::f64::consts::PI;
/// Offset in radius or angle moving a curve off an exceptional point.
pub const NUDGE: f64 = 1e-9;

/// Ten maps of degrees 1 to 5 used by the area and defect suites.
pub fn catalog() -> Vec<(&'static str, RationalMap)> {
    let m = |num: &[f64], den: &[f64]| RationalMap::from_real(num, den).expect("catalog maps are valid");
    alloc::vec![
        ("z", m(&[0.0, 1.0], &[1.0])),
        ("(z-1)/(z+2)", m(&[-1.0, 1.0], &[2.0, 1.0])),
        ("z^2", m(&[0.0, 0.0, 1.0], &[1.0])),
        ("z+1/z", m(&[1.0, 0.0, 1.0], &[0.0, 1.0])),
        ("z^3", m(&[0.0, 0.0, 0.0, 1.0], &[1.0])),
        ("(z^3-1)/(2z^2+1)", m(&[-1.0, 0.0, 0.0, 1.0], &[1.0, 0.0, 2.0])),
        ("z^4-z", m(&[0.0, -1.0, 0.0, 0.0, 1.0], &[1.0])),
        ("1/(z^4+3)", m(&[1.0], &[3.0, 0.0, 0.0, 0.0, 1.0])),
        ("z^5", m(&[0.0, 0.0, 0.0, 0.0, 0.0, 1.0], &[1.0])),
        ("(z^5+z)/(3z^2-1)", m(&[0.0, 1.0, 0.0, 0.0, 0.0, 1.0], &[-1.0, 0.0, 3.0])),
    ]
}

/// Least-squares slope of `y` against `x`; `None` with fewer than two
/// distinct abscissae.
pub(crate) fn slope(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let b = sxy / sxx;
    Some((b, my - b * mx))
}
