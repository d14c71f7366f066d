//! Spherical area and length of rational maps by adaptive cubature.

mod engine;
mod region;
mod rules;

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

pub use engine::{Estimate, QuadOptions};
pub use region::{Path, Region, RegionKind};

use engine::{integrate, integrate_1d, Hint};
use region::Chart;

use crate::error::{Error, Result};
use crate::sphere::{chordal_distance, MoebiusMap, RationalMap, SpherePoint, C64};

/// Default absolute tolerance for spherical lengths.
pub const LENGTH_TOL: f64 = 1e-8;
/// Default relative tolerance for spherical areas.
pub const AREA_TOL: f64 = 1e-6;

/// Points where the density of `f` may concentrate, with the scale of the
/// feature at each point.
fn features(f: &RationalMap) -> Vec<(C64, f64)> {
    if f.is_constant() {
        return Vec::new();
    }
    let mut pts: Vec<C64> = Vec::new();
    for w in [SpherePoint::ZERO, SpherePoint::Infinity, SpherePoint::new(1.0, 0.0)] {
        if let Ok(p) = f.preimages(w) {
            pts.extend(p);
        }
    }
    if let Ok(c) = f.critical_points() {
        pts.extend(c.into_iter().filter_map(|p| p.finite()));
    }
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    pts.dedup_by(|a, b| (*a - *b).norm() <= 1e-15 * (1.0 + b.norm()));
    pts.into_iter().filter_map(|h| feature_scale(f, h).map(|s| (h, s))).collect()
}

/// Smallest dyadic `s` for which `s · max ρ` on the circle `|z − h| = s`
/// reaches 1/4, i.e. the radius at which the map starts to cover a visible
/// part of the sphere.
fn feature_scale(f: &RationalMap, h: C64) -> Option<f64> {
    if !h.is_finite() {
        return None;
    }
    for k in (0..=60).rev() {
        let s = libm::ldexp(1.0, -k) * (1.0 + h.norm());
        let mut best = 0.0f64;
        for j in 0..8 {
            let (sn, cs) = libm::sincos(j as f64 * PI / 4.0 + 0.1);
            best = best.max(f.spherical_derivative(h + C64::new(s * cs, s * sn)));
        }
        if s * best >= 0.25 {
            return Some(s);
        }
    }
    None
}

/// Features within this many feature scales of a chart refine it.
const HINT_REACH: f64 = 8.0;

/// Area integrator for one map with cached refinement hints.
#[derive(Debug, Clone)]
pub struct AreaIntegrator {
    map: RationalMap,
    features: Vec<(C64, f64)>,
    opts: QuadOptions,
}

impl AreaIntegrator {
    pub fn new(map: RationalMap, opts: QuadOptions) -> Self {
        let features = features(&map);
        AreaIntegrator { map, features, opts }
    }

    pub fn map(&self) -> &RationalMap {
        &self.map
    }

    /// Feature points with their scales.
    pub fn features(&self) -> &[(C64, f64)] {
        &self.features
    }

    /// `∫ w(z) ρ(z)² dA` over a chart.
    fn chart<W: Fn(C64) -> f64>(&self, chart: &Chart, weight: W, opts: &QuadOptions) -> Result<Estimate> {
        if self.map.is_constant() {
            return Ok(Estimate { value: 0.0, error: 0.0, cells: 0 });
        }
        let hints: Vec<Hint> = self
            .features
            .iter()
            .flat_map(|&(h, s)| {
                chart.locate_near(h, HINT_REACH * s).into_iter().map(move |(u, v, all_v)| Hint { u, v, size: s, all_v })
            })
            .collect();
        let f = |u: f64, v: f64| {
            let (z, jac) = chart.map(u, v);
            if jac == 0.0 {
                0.0
            } else {
                self.map.density(z) * jac * weight(z)
            }
        };
        integrate(f, chart.domain(), chart.initial(), &hints, |c| chart.extent(c), opts)
    }

    fn signed(&self, pieces: &[(f64, Chart)]) -> Result<Estimate> {
        let k = pieces.len().max(1) as f64;
        let opts = QuadOptions { rel_tol: self.opts.rel_tol / k, ..self.opts };
        let mut out = Estimate { value: 0.0, error: 0.0, cells: 0 };
        for (s, ch) in pieces {
            let e = self.chart(ch, |_| 1.0, &opts)?;
            out.value += s * e.value;
            out.error += e.error;
            out.cells += e.cells;
        }
        out.value = out.value.max(0.0);
        Ok(out)
    }

    /// `ℰ(U)` with its error estimate.
    pub fn area(&self, region: &Region) -> Result<Estimate> {
        if !region.is_bounded() {
            return self.full_plane(1.0);
        }
        self.signed(&region.pieces()?)
    }

    /// `ℰ(U ∩ [x0, x1] × [y0, y1])`.
    pub fn area_clipped(&self, region: &Region, rect: [f64; 4]) -> Result<Estimate> {
        self.signed(&region.clip_pieces(rect[0], rect[1], rect[2], rect[3]))
    }

    /// Full-plane area with the chart split at `|z| = r0`; the outer part is
    /// the disk `|w| < 1/r0` for `F(1/w)`.
    pub fn full_plane(&self, r0: f64) -> Result<Estimate> {
        if r0 <= 0.0 {
            return Err(Error::InvalidArgument("split radius must be positive".into()));
        }
        let inner = self.area(&Region::disk(C64::new(0.0, 0.0), r0)?)?;
        let g = AreaIntegrator::new(self.map.precompose(&MoebiusMap::inversion())?, self.opts);
        let outer = g.area(&Region::disk(C64::new(0.0, 0.0), 1.0 / r0)?)?;
        Ok(Estimate { value: inner.value + outer.value, error: inner.error + outer.error, cells: inner.cells + outer.cells })
    }

    /// Energies of the disks `B(p, ρ)` for increasing `radii`, accumulated
    /// over annuli so the result is monotone.
    pub fn nested_disks(&self, p: C64, radii: &[f64]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(radii.len());
        let mut acc = 0.0;
        let mut prev = 0.0;
        for &r in radii {
            if r < prev {
                return Err(Error::InvalidArgument("radii must increase".into()));
            }
            if r > prev {
                let ch = Chart::polar(p, prev, r);
                acc += self.chart(&ch, |_| 1.0, &self.opts)?.value;
            }
            out.push(acc);
            prev = r;
        }
        Ok(out)
    }

    /// `∫_{B(c, r)} w ρ² dA` for a bounded weight.
    pub fn weighted_disk<W: Fn(C64) -> f64>(&self, c: C64, r: f64, weight: W) -> Result<Estimate> {
        self.chart(&Chart::polar(c, 0.0, r), weight, &self.opts)
    }
}

/// Spherical area `ℰ(U)` of `f` over `region` to relative tolerance `tol`.
pub fn spherical_area(f: &RationalMap, region: &Region, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    Ok(AreaIntegrator::new(f.clone(), QuadOptions::with_rel_tol(tol)).area(region)?.value)
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument("tolerance must be positive".into()))
    }
}

/// Spherical length `L(γ)` of `f` along `path` to absolute tolerance `tol`.
pub fn spherical_length(f: &RationalMap, path: &Path, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    if f.is_constant() {
        return Ok(0.0);
    }
    let feats = features(f);
    let arcs = path.arcs();
    let per = tol / arcs.len().max(1) as f64;
    let mut total = 0.0;
    for arc in arcs {
        let (_, speed) = arc.at(0.0);
        if speed == 0.0 {
            continue;
        }
        let mut breaks = vec![0.0, 1.0];
        for k in 1..16 {
            breaks.push(k as f64 / 16.0);
        }
        for &(h, s) in &feats {
            let (t, d) = arc.nearest(h);
            let w = s.max(d) / speed;
            if w >= 0.25 {
                continue;
            }
            let mut step = w;
            while step < 0.5 {
                breaks.push(t - step);
                breaks.push(t + step);
                step *= 2.0;
            }
            breaks.push(t);
        }
        let wraps = matches!(arc, region::Arc::Circle { .. });
        let mut b: Vec<f64> = breaks
            .into_iter()
            .filter_map(|x| if wraps { Some(x - libm::floor(x)) } else { (0.0..=1.0).contains(&x).then_some(x) })
            .collect();
        b.push(0.0);
        b.push(1.0);
        b.sort_by(f64::total_cmp);
        b.dedup();
        let opts = QuadOptions { rel_tol: 0.0, abs_tol: per, max_cells: 200_000 };
        let e = integrate_1d(
            |t| {
                let (z, sp) = arc.at(t);
                f.spherical_derivative(z) * sp
            },
            &b,
            &opts,
        )?;
        total += e.value;
    }
    Ok(total)
}

/// Energies of concentric disks about a center.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyProfile {
    pub center: C64,
    /// Decreasing radii.
    pub radii: Vec<f64>,
    /// `ℰ(B(center, radii[i]))`.
    pub energies: Vec<f64>,
    pub tol: f64,
}

impl EnergyProfile {
    /// `(rho, energy)` rows.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.radii.iter().copied().zip(self.energies.iter().copied())
    }
}

/// `k` logarithmically spaced radii from `r_max` down to `r_min`.
pub fn log_radii(r_min: f64, r_max: f64, k: usize) -> Vec<f64> {
    (0..k)
        .map(|i| {
            if i + 1 == k {
                r_min
            } else {
                r_max * libm::pow(r_min / r_max, i as f64 / (k - 1) as f64)
            }
        })
        .collect()
}

pub fn energy_profile(f: &RationalMap, p: C64, r_min: f64, r_max: f64, k: usize) -> Result<EnergyProfile> {
    energy_profile_tol(f, p, r_min, r_max, k, AREA_TOL)
}

pub fn energy_profile_tol(f: &RationalMap, p: C64, r_min: f64, r_max: f64, k: usize, tol: f64) -> Result<EnergyProfile> {
    check_tol(tol)?;
    if !(r_min > 0.0 && r_min < r_max && r_max.is_finite()) {
        return Err(Error::InvalidArgument("need 0 < r_min < r_max".into()));
    }
    if k < 2 {
        return Err(Error::InvalidArgument("need at least two radii".into()));
    }
    let radii = log_radii(r_min, r_max, k);
    let mut inc: Vec<f64> = radii.clone();
    inc.reverse();
    let mut energies = AreaIntegrator::new(f.clone(), QuadOptions::with_rel_tol(tol)).nested_disks(p, &inc)?;
    energies.reverse();
    Ok(EnergyProfile { center: p, radii, energies, tol })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaCheck {
    pub measured: f64,
    pub expected: f64,
    pub pass: bool,
}

/// Total area against `4π deg R`.
pub fn total_area_check(r: &RationalMap, tol: f64) -> Result<AreaCheck> {
    total_area_check_split(r, tol, 1.0)
}

/// As [`total_area_check`] with the two charts meeting at `|z| = r0`.
pub fn total_area_check_split(r: &RationalMap, tol: f64, r0: f64) -> Result<AreaCheck> {
    check_tol(tol)?;
    let opts = QuadOptions::with_rel_tol(tol * 0.25);
    let measured = AreaIntegrator::new(r.clone(), opts).full_plane(r0)?.value;
    let expected = 4.0 * PI * r.degree() as f64;
    let pass = (measured - expected).abs() <= tol * expected.max(1.0);
    Ok(AreaCheck { measured, expected, pass })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountingCheck {
    /// `Σ log(r/|z|)` over solutions of `R(z) = a` in `|z| < r`.
    pub lhs: f64,
    /// `(1/4π) ∫₀ʳ 𝒜(R, B(0,t)) dt/t`.
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
}

/// Counting function of `a`-points against the characteristic.
///
/// The bounded term is the larger of the excess observed at radius 1 and
/// `log(1/[R(0), a])`, the constant of the first main theorem with the
/// chordal distance normalized to at most 1, plus 0.1.
pub fn ahlfors_shimizu_check(r: &RationalMap, a: SpherePoint, radius: f64) -> Result<CountingCheck> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument("radius must be positive".into()));
    }
    let (n0, d0) = r.eval_homogeneous(C64::new(0.0, 0.0));
    let hits = match a {
        SpherePoint::Infinity => d0.norm() <= 1e-14 * n0.norm(),
        SpherePoint::Finite(a) => (n0 - a * d0).norm() <= 1e-14 * (n0.norm() + a.norm() * d0.norm()),
    };
    if hits {
        return Err(Error::Precondition("R(0) equals the target value".into()));
    }
    let at = |rad: f64| -> Result<(f64, f64)> { Ok((counting(r, a, rad)?, characteristic(r, rad)?)) };
    let (l1, r1) = at(1.0)?;
    let fmt = -libm::log(0.5 * chordal_distance(r.value(C64::new(0.0, 0.0)), a));
    let slack = (l1 - r1).max(0.0).max(fmt) + 0.1;
    let (lhs, rhs) = at(radius)?;
    Ok(CountingCheck { lhs, rhs, slack, pass: lhs <= rhs + slack })
}

/// `Σ_{R(z)=a, |z|<r} log(r/|z|)` with multiplicity.
pub fn counting(r: &RationalMap, a: SpherePoint, radius: f64) -> Result<f64> {
    if r.is_constant() {
        return Ok(0.0);
    }
    let pts = r.preimages(a)?;
    Ok(pts.iter().filter(|z| z.norm() < radius).map(|z| libm::log(radius / z.norm())).sum())
}

/// `(1/4π) ∫₀ʳ 𝒜(R, B(0,t)) dt/t = (1/4π) ∫_{B(0,r)} ρ² log(r/|z|) dA`.
pub fn characteristic(r: &RationalMap, radius: f64) -> Result<f64> {
    let integ = AreaIntegrator::new(r.clone(), QuadOptions::with_rel_tol(1e-8));
    let e = integ.weighted_disk(C64::new(0.0, 0.0), radius, |z| {
        let n = z.norm();
        if n == 0.0 {
            0.0
        } else {
            libm::log(radius / n)
        }
    })?;
    Ok(e.value / (4.0 * PI))
}
