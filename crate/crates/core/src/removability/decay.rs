use alloc::vec::Vec;

use super::{slope, ALPHA_FLOOR, SMALL_ENERGY};
use crate::error::{Error, Result};
use crate::quadrature::{energy_profile, log_radii};
use crate::sphere::{RationalMap, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub center: C64,
    /// `r, r/2, …, r/2^(k−1)`.
    pub radii: Vec<f64>,
    pub energies: Vec<f64>,
    /// Slope of `log ℰ` against `log ρ` over the radii with `ℰ ≤ 2π`;
    /// infinite when every energy vanishes.
    pub alpha_hat: f64,
    /// `ℰ(B(p, r)) ≤ 2π`.
    pub admissible: bool,
    pub degenerate: bool,
    /// `ℰ(B(p, s)) ≤ (s/r)^α ℰ(B(p, r))` at every radius with
    /// `α =` [`ALPHA_FLOOR`].
    pub decay_holds: bool,
}

/// Energies of `B(p, r/2^i)` for `i < k` and the fitted decay exponent.
pub fn energy_decay(f: &RationalMap, p: C64, r: f64, k: usize) -> Result<DecayReport> {
    if k < 2 {
        return Err(Error::InvalidArgument("need at least two radii".into()));
    }
    let r_min = libm::ldexp(r, -(k as i32 - 1));
    let radii = log_radii(r_min, r, k);
    let energies = if f.is_constant() {
        alloc::vec![0.0; k]
    } else {
        energy_profile(f, p, r_min, r, k)?.energies
    };
    let top = energies[0];
    let degenerate = energies.iter().all(|&e| e == 0.0);
    let pts: Vec<(f64, f64)> = radii
        .iter()
        .zip(&energies)
        .filter(|(_, &e)| e > 0.0 && e <= SMALL_ENERGY)
        .map(|(&s, &e)| (libm::log(s), libm::log(e)))
        .collect();
    let alpha_hat = if degenerate { f64::INFINITY } else { slope(&pts).map_or(f64::NAN, |s| s.0) };
    let decay_holds = radii.iter().zip(&energies).all(|(&s, &e)| e <= libm::pow(s / r, ALPHA_FLOOR) * top);
    Ok(DecayReport { center: p, radii, energies, alpha_hat, admissible: top <= SMALL_ENERGY, degenerate, decay_holds })
}
