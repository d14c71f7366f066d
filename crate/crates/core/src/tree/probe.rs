use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::sphere::{chordal_distance, RationalMap, SpherePoint, C64};

/// Smallest accepted chordal margin of a probe ball.
pub const DELTA_MIN: f64 = 0.05;
/// Probe centers are kept in `|w| ≤ W_MAX`.
pub const W_MAX: f64 = 3.0;
const GRID: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeBall {
    pub w: C64,
    pub rho: f64,
    /// Chordal distance from `B(w, 2ρ)` to the nearest obstacle.
    pub margin: f64,
}

impl ProbeBall {
    pub fn contains(&self, z: C64) -> bool {
        (z - self.w).norm() < self.rho
    }

    pub fn boundary_point(&self, theta: f64) -> C64 {
        self.w + C64::from_polar(self.rho, theta)
    }
}

/// Sets a probe ball has to keep away from: isolated points and the region
/// enclosed by a closed curve.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Obstacles {
    pub points: Vec<C64>,
    /// Closed polyline; points it winds around are forbidden.
    pub curve: Vec<C64>,
}

impl Obstacles {
    /// Critical values of `limit` together with the image of `∂B(p, r)`
    /// under it and the critical values of `members` at critical points in
    /// `B(p, r)`.
    pub fn new(limit: &RationalMap, members: &[&RationalMap], p: C64, r: f64) -> Result<Self> {
        let mut points = Vec::new();
        if !limit.is_constant() {
            for v in limit.critical_values()? {
                if let SpherePoint::Finite(v) = v {
                    points.push(v);
                }
            }
        }
        for f in members {
            for c in f.critical_points()? {
                if let SpherePoint::Finite(c) = c {
                    if (c - p).norm() < r {
                        if let SpherePoint::Finite(v) = f.value(c) {
                            points.push(v);
                        }
                    }
                }
            }
        }
        let mut curve = Vec::with_capacity(256);
        for k in 0..256 {
            let z = p + C64::from_polar(r, 2.0 * PI * k as f64 / 256.0);
            match limit.value(z) {
                SpherePoint::Finite(v) => curve.push(v),
                SpherePoint::Infinity => curve.push(C64::new(1e300, 0.0)),
            }
        }
        Ok(Obstacles { points, curve })
    }

    fn winding(&self, w: C64) -> i64 {
        let n = self.curve.len();
        if n < 2 {
            return 0;
        }
        let mut total = 0.0;
        for k in 0..n {
            let a = self.curve[k] - w;
            let b = self.curve[(k + 1) % n] - w;
            total += (b / a).arg();
        }
        libm::round(total / (2.0 * PI)) as i64
    }

    fn samples(&self) -> impl Iterator<Item = C64> + '_ {
        let n = self.curve.len();
        let mids = (0..n).map(move |k| 0.5 * (self.curve[k] + self.curve[(k + 1) % n]));
        self.points.iter().copied().chain(self.curve.iter().copied()).chain(mids)
    }

    fn euclidean_gap(&self, w: C64) -> f64 {
        let mut d = f64::INFINITY;
        for o in &self.points {
            d = d.min((o - w).norm());
        }
        let n = self.curve.len();
        for k in 0..n {
            d = d.min(segment_distance(w, self.curve[k], self.curve[(k + 1) % n]));
        }
        d
    }

    /// Ball at `w` of radius 0.4 times the distance to the obstacles and
    /// its chordal margin, or `None` inside the forbidden region.
    pub fn ball_at(&self, w: C64) -> Option<ProbeBall> {
        if self.winding(w) != 0 {
            return None;
        }
        let d = self.euclidean_gap(w);
        if !(d > 0.0) {
            return None;
        }
        let rho = if d.is_finite() { 0.4 * d } else { 0.4 * (1.0 + w.norm()) };
        let mut margin = f64::INFINITY;
        for o in self.samples() {
            let v = o - w;
            let q = if v.norm() > 2.0 * rho { w + v * (2.0 * rho / v.norm()) } else { o };
            margin = margin.min(chordal_distance(SpherePoint::Finite(o), SpherePoint::Finite(q)));
        }
        Some(ProbeBall { w, rho, margin: margin.min(2.0) })
    }
}

fn segment_distance(z: C64, a: C64, b: C64) -> f64 {
    let ab = b - a;
    let l2 = ab.norm_sqr();
    if l2 == 0.0 || !l2.is_finite() {
        return (z - a).norm().min((z - b).norm());
    }
    let t = (((z - a) * ab.conj()).re / l2).clamp(0.0, 1.0);
    (a + ab * t - z).norm()
}

/// Fibonacci lattice on the sphere, projected to the plane.
fn sphere_grid() -> impl Iterator<Item = C64> {
    let golden = PI * (3.0 - libm::sqrt(5.0));
    (0..GRID).filter_map(move |k| {
        let zc = 1.0 - (2.0 * k as f64 + 1.0) / GRID as f64;
        let rad = libm::sqrt(1.0 - zc * zc);
        let t = golden * k as f64;
        let p = SpherePoint::from_unit_vector([rad * libm::cos(t), rad * libm::sin(t), zc]);
        p.finite().filter(|w| w.norm() <= W_MAX)
    })
}

/// Probe ball maximizing the margin over a fixed grid on the sphere.
pub fn choose_probe_ball(obstacles: &Obstacles) -> Result<ProbeBall> {
    let mut best: Option<ProbeBall> = None;
    for w in sphere_grid() {
        if let Some(b) = obstacles.ball_at(w) {
            if best.is_none_or(|x| b.margin > x.margin) {
                best = Some(b);
            }
        }
    }
    match best {
        Some(b) if b.margin >= DELTA_MIN => Ok(b),
        Some(b) => Err(Error::ProbeMargin { margin: b.margin, minimum: DELTA_MIN }),
        None => Err(Error::ProbeMargin { margin: 0.0, minimum: DELTA_MIN }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_limit_prefers_far_side() {
        let f = RationalMap::identity();
        let obs = Obstacles::new(&f, &[], C64::new(0.0, 0.0), 0.1).unwrap();
        let b = choose_probe_ball(&obs).unwrap();
        assert!(b.w.norm() > 2.5, "{b:?}");
        assert!(b.margin > 0.3);
        // brute-force oracle over a polar grid
        let mut best: f64 = 0.0;
        for i in 1..=50 {
            for j in 0..32 {
                let w = C64::from_polar(0.06 * i as f64, 2.0 * PI * j as f64 / 32.0);
                if let Some(x) = obs.ball_at(w) {
                    best = best.max(x.margin);
                }
            }
        }
        assert!(b.margin >= best - 0.05);
    }

    #[test]
    fn winding_excludes_image() {
        let f = RationalMap::identity();
        let obs = Obstacles::new(&f, &[], C64::new(0.0, 0.0), 1.0).unwrap();
        assert!(obs.ball_at(C64::new(0.5, 0.0)).is_none());
        assert!(obs.ball_at(C64::new(2.0, 0.0)).is_some());
    }

    #[test]
    fn dense_obstacles_fail() {
        let m = 20000;
        let golden = PI * (3.0 - libm::sqrt(5.0));
        let pts = (0..m)
            .filter_map(|k| {
                let zc = 1.0 - (2.0 * k as f64 + 1.0) / m as f64;
                let rad = libm::sqrt(1.0 - zc * zc);
                let t = 1.3 * golden * k as f64;
                SpherePoint::from_unit_vector([rad * libm::cos(t), rad * libm::sin(t), zc]).finite()
            })
            .collect();
        let obs = Obstacles { points: pts, curve: Vec::new() };
        assert!(matches!(choose_probe_ball(&obs), Err(Error::ProbeMargin { .. })));
    }
}
