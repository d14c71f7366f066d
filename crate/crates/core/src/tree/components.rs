use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::probe::ProbeBall;
use crate::error::{Error, Result};
use crate::sphere::{RationalMap, SpherePoint, C64};

/// Boundary samples per component.
pub const BOUNDARY_POINTS: usize = 64;
/// Random probe values per one-to-one check.
pub const ONE_TO_ONE_SAMPLES: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct PreimageComponent {
    pub n: u64,
    /// Solution of `F_n(z) = w` inside the component.
    pub center: C64,
    pub diameter: f64,
    /// `min |γ − center| / diameter`.
    pub inner: f64,
    /// `max |γ − center| / diameter`.
    pub outer: f64,
    pub boundary: Vec<C64>,
    pub one_to_one: bool,
}

impl PreimageComponent {
    pub fn contains(&self, z: C64) -> bool {
        point_in_polygon(z, &self.boundary)
    }
}

/// `F(z)` and `F'(z)` at a finite non-pole, with a bound on the rounding
/// error of the value.
fn value_and_derivative(f: &RationalMap, z: C64) -> Option<(C64, C64, f64)> {
    let (n, dn) = f.num().eval_with_derivative(z);
    let (d, dd) = f.den().eval_with_derivative(z);
    if d.norm() == 0.0 {
        return None;
    }
    let v = n / d;
    let noise = 16.0 * f64::EPSILON * (magnitude(f.num(), z) + v.norm() * magnitude(f.den(), z)) / d.norm();
    Some((v, (dn * d - n * dd) / (d * d), noise))
}

/// `Σ |a_k| |z|^k`.
fn magnitude(p: &crate::sphere::Polynomial, z: C64) -> f64 {
    let r = z.norm();
    p.coeffs().iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
}

fn newton(f: &RationalMap, mut z: C64, target: C64) -> Option<(C64, C64)> {
    let tol = 1e-13 * (1.0 + target.norm());
    for _ in 0..12 {
        let (v, dv, noise) = value_and_derivative(f, z)?;
        let res = v - target;
        if res.norm() <= tol.max(noise) {
            return Some((z, dv));
        }
        if dv.norm() == 0.0 {
            return None;
        }
        z -= res / dv;
    }
    let (v, dv, noise) = value_and_derivative(f, z)?;
    ((v - target).norm() <= (1e-9 * (1.0 + target.norm())).max(4.0 * noise)).then_some((z, dv))
}

/// Follows the branch of `F⁻¹ ∘ path` from `z` over `s ∈ [0, 1]` with
/// adaptive Euler–Newton steps.
fn follow(f: &RationalMap, mut z: C64, path: &dyn Fn(f64) -> C64) -> Result<C64> {
    let mut s = 0.0;
    let mut h: f64 = 0.25;
    let (_, mut dv, _) = value_and_derivative(f, z).ok_or_else(|| Error::Continuation("start at a pole".into()))?;
    while s < 1.0 {
        let step = h.min(1.0 - s);
        let t = path(s + step);
        if dv.norm() == 0.0 {
            return Err(Error::Continuation(format!("critical point near {z}")));
        }
        let dz = (t - path(s)) / dv;
        let guess = z + dz;
        match newton(f, guess, t) {
            Some((zn, dn)) if (zn - guess).norm() <= 0.25 * dz.norm() + 1e-14 * (1.0 + z.norm()) => {
                z = zn;
                dv = dn;
                s += step;
                h = (2.0 * step).min(0.25);
            }
            _ => {
                h = 0.5 * step;
                if h < 1e-12 {
                    return Err(Error::Continuation(format!("step underflow near {z}")));
                }
            }
        }
    }
    Ok(z)
}

/// Traces `F⁻¹(∂𝔅)` starting from the solution `z0` of `F(z) = w`.
pub fn trace_boundary(f: &RationalMap, z0: C64, ball: &ProbeBall) -> Result<Vec<C64>> {
    let (w, rho) = (ball.w, ball.rho);
    let mut z = follow(f, z0, &|s| w + rho * s)?;
    let mut out = Vec::with_capacity(BOUNDARY_POINTS);
    out.push(z);
    let dt = 2.0 * PI / BOUNDARY_POINTS as f64;
    for k in 0..BOUNDARY_POINTS - 1 {
        let t0 = k as f64 * dt;
        z = follow(f, z, &|s| ball.boundary_point(t0 + s * dt))?;
        out.push(z);
    }
    Ok(out)
}

pub fn point_in_polygon(z: C64, poly: &[C64]) -> bool {
    let n = poly.len();
    let mut inside = false;
    for k in 0..n {
        let (a, b) = (poly[k], poly[(k + 1) % n]);
        if (a.im > z.im) != (b.im > z.im) {
            let x = a.re + (z.im - a.im) / (b.im - a.im) * (b.re - a.re);
            if z.re < x {
                inside = !inside;
            }
        }
    }
    inside
}

fn diameter(points: &[C64]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            d = d.max((a - b).norm());
        }
    }
    d
}

/// Distance between two closed polylines.
pub fn polyline_distance(a: &[C64], b: &[C64]) -> f64 {
    let seg = |z: C64, p: C64, q: C64| {
        let pq = q - p;
        let l2 = pq.norm_sqr();
        if l2 == 0.0 {
            return (z - p).norm();
        }
        let t = (((z - p) * pq.conj()).re / l2).clamp(0.0, 1.0);
        (p + pq * t - z).norm()
    };
    let one_way = |a: &[C64], b: &[C64]| {
        let mut d = f64::INFINITY;
        for &z in a {
            for k in 0..b.len() {
                d = d.min(seg(z, b[k], b[(k + 1) % b.len()]));
            }
        }
        d
    };
    one_way(a, b).min(one_way(b, a))
}

pub fn union_diameter<'a>(components: impl Iterator<Item = &'a PreimageComponent>) -> f64 {
    let pts: Vec<C64> = components.flat_map(|c| c.boundary.iter().copied()).collect();
    diameter(&pts)
}

fn solutions(f: &RationalMap, w: C64) -> Result<Vec<C64>> {
    let roots = f.preimages(SpherePoint::Finite(w))?;
    if roots.len() != f.degree() {
        return Err(Error::RootCount { expected: f.degree(), found: roots.len() });
    }
    Ok(roots)
}

/// Components of `F_n⁻¹(𝔅)` compactly contained in `B(p, r)`.
pub fn preimage_components(f: &RationalMap, ball: &ProbeBall, p: C64, r: f64, n: u64) -> Result<Vec<PreimageComponent>> {
    let roots = solutions(f, ball.w)?;
    let mut out = Vec::new();
    for z in roots.into_iter().filter(|z| (z - p).norm() < r) {
        let boundary = trace_boundary(f, z, ball)?;
        if boundary.iter().any(|b| (b - p).norm() >= r) {
            continue;
        }
        let diam = diameter(&boundary);
        let (lo, hi) = boundary
            .iter()
            .map(|b| (b - z).norm())
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), d| (lo.min(d), hi.max(d)));
        out.push(PreimageComponent {
            n,
            center: z,
            diameter: diam,
            inner: lo / diam,
            outer: hi / diam,
            boundary,
            one_to_one: false,
        });
    }
    if !out.is_empty() {
        check_one_to_one(f, ball, &mut out, n)?;
    }
    Ok(out)
}

/// Marks each component that holds exactly one solution of `F(z) = w'` for
/// every one of a fixed set of random `w' ∈ 𝔅`.
pub fn check_one_to_one(f: &RationalMap, ball: &ProbeBall, components: &mut [PreimageComponent], seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ok = alloc::vec![true; components.len()];
    for _ in 0..ONE_TO_ONE_SAMPLES {
        let rad = ball.rho * libm::sqrt(rng.gen::<f64>()) * 0.95;
        let w = ball.w + C64::from_polar(rad, 2.0 * PI * rng.gen::<f64>());
        let roots = solutions(f, w)?;
        for (c, flag) in components.iter().zip(ok.iter_mut()) {
            if roots.iter().filter(|&&z| c.contains(z)).count() != 1 {
                *flag = false;
            }
        }
    }
    for (c, flag) in components.iter_mut().zip(ok) {
        c.one_to_one = flag;
    }
    Ok(())
}
