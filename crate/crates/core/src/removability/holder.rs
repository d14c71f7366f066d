use alloc::vec::Vec;
use core::f64::consts::PI;

use super::{slope, SMALL_ENERGY};
use crate::error::{Error, Result};
use crate::quadrature::{spherical_area, Region, AREA_TOL};
use crate::sphere::{chordal_distance, RationalMap, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct HolderReport {
    pub center: C64,
    pub r: f64,
    /// Exponent over pairs in `B(q, r/2)`, fitted to the largest chordal
    /// distance per dyadic scale of `|p − p'|` below `r/8`.
    pub exponent: f64,
    /// Smallest `C` with `d(F(p), F(p')) ≤ C |p − p'|^exponent` on all pairs.
    pub constant: f64,
    /// Exponent of `d(F(q), F(q + t))` as `t → 0`.
    pub local_exponent: f64,
    pub pairs: usize,
    /// `F` is constant on the samples; both exponents are infinite.
    pub degenerate: bool,
}

/// Sunflower points filling `B(q, r/2)`.
fn samples(q: C64, r: f64, count: usize) -> Vec<C64> {
    let golden = PI * (3.0 - libm::sqrt(5.0));
    (0..count)
        .map(|k| q + C64::from_polar(0.5 * r * libm::sqrt((k as f64 + 0.5) / count as f64), k as f64 * golden))
        .collect()
}

fn local_exponent(f: &RationalMap, q: C64, r: f64) -> f64 {
    let v = f.value(q);
    let pts: Vec<(f64, f64)> = (4..16)
        .filter_map(|k| {
            let t = libm::ldexp(0.5 * r, -k);
            let d = (0..8)
                .map(|j| chordal_distance(v, f.value(q + C64::from_polar(t, 0.3 + j as f64 * PI / 4.0))))
                .fold(0.0, f64::max);
            (d > 0.0).then(|| (libm::log(t), libm::log(d)))
        })
        .collect();
    slope(&pts).map_or(f64::INFINITY, |s| s.0)
}

pub fn holder_modulus(f: &RationalMap, q: C64, r: f64, count: usize) -> Result<HolderReport> {
    if count < 8 {
        return Err(Error::InvalidArgument("need at least 8 samples".into()));
    }
    let energy = spherical_area(f, &Region::disk(q, 2.5 * r)?, AREA_TOL)?;
    if energy > SMALL_ENERGY {
        return Err(Error::Admissibility { energy, limit: SMALL_ENERGY });
    }
    let pts = samples(q, r, count);
    let values: Vec<_> = pts.iter().map(|&z| f.value(z)).collect();
    let mut pairs = Vec::with_capacity(count * (count - 1) / 2);
    for i in 0..count {
        for j in i + 1..count {
            pairs.push(((pts[i] - pts[j]).norm(), chordal_distance(values[i], values[j])));
        }
    }
    if pairs.iter().all(|p| p.1 == 0.0) {
        return Ok(HolderReport {
            center: q,
            r,
            exponent: f64::INFINITY,
            constant: 0.0,
            local_exponent: f64::INFINITY,
            pairs: pairs.len(),
            degenerate: true,
        });
    }
    // upper envelope per dyadic scale
    let mut bins: Vec<(i32, f64, f64)> = Vec::new();
    for &(delta, d) in pairs.iter().filter(|p| p.0 < 0.125 * r && p.1 > 0.0) {
        let b = libm::floor(libm::log2(delta / r)) as i32;
        match bins.iter_mut().find(|e| e.0 == b) {
            Some(e) if d > e.2 => *e = (b, delta, d),
            Some(_) => {}
            None => bins.push((b, delta, d)),
        }
    }
    let env: Vec<(f64, f64)> = bins.iter().map(|e| (libm::log(e.1), libm::log(e.2))).collect();
    let exponent = slope(&env).map_or(1.0, |s| s.0);
    let constant = pairs.iter().filter(|p| p.0 > 0.0).map(|p| p.1 / libm::pow(p.0, exponent)).fold(0.0, f64::max);
    Ok(HolderReport {
        center: q,
        r,
        exponent,
        constant,
        local_exponent: local_exponent(f, q, r),
        pairs: pairs.len(),
        degenerate: false,
    })
}
