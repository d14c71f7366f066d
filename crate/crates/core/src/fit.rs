//! Least-squares fitting of rational maps to sampled values on the sphere.
//!
//! A homogeneous linearized fit (smallest right singular vector of the
//! system `N(ζ)·y − D(ζ)·x = 0` with reweighting) provides a start for
//! Levenberg–Marquardt on the chordal residuals.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::sphere::{Polynomial, RationalMap, SpherePoint, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct Fit {
    pub map: RationalMap,
    /// Mean squared chordal residual.
    pub mse: f64,
    /// Largest chordal residual.
    pub max_residual: f64,
}

fn homogeneous(samples: &[(C64, SpherePoint)]) -> Vec<(C64, C64, C64)> {
    samples
        .iter()
        .map(|&(z, w)| {
            let (x, y) = w.homogeneous();
            (z, x, y)
        })
        .collect()
}

fn powers(z: C64, d: usize) -> Vec<C64> {
    let mut p = Vec::with_capacity(d + 1);
    let mut acc = C64::new(1.0, 0.0);
    for _ in 0..=d {
        p.push(acc);
        acc *= z;
    }
    p
}

fn eval(c: &[C64], pw: &[C64]) -> C64 {
    c.iter().zip(pw).map(|(a, b)| a * b).sum()
}

/// Complex chordal residuals `2 (N y − D x) / ‖(N, D)‖` for coefficient
/// vector `p = (a_0..a_d, b_0..b_d)`.
fn residuals(p: &[C64], data: &[(Vec<C64>, C64, C64)], d: usize) -> Vec<C64> {
    let (a, b) = p.split_at(d + 1);
    data.iter()
        .map(|(pw, x, y)| {
            let n = eval(a, pw);
            let m = eval(b, pw);
            let h = libm::sqrt(n.norm_sqr() + m.norm_sqr());
            if h == 0.0 {
                C64::new(2.0, 0.0)
            } else {
                (n * y - m * x) * (2.0 / h)
            }
        })
        .collect()
}

fn cost(r: &[C64]) -> f64 {
    r.iter().map(|e| e.norm_sqr()).sum()
}

fn linearized(data: &[(Vec<C64>, C64, C64)], d: usize, weights: &[f64]) -> Vec<C64> {
    let k = 2 * (d + 1);
    let m = data.len().max(k);
    let mut a = DMatrix::<C64>::zeros(m, k);
    for (i, ((pw, x, y), w)) in data.iter().zip(weights).enumerate() {
        for j in 0..=d {
            a[(i, j)] = pw[j] * y * *w;
            a[(i, d + 1 + j)] = -pw[j] * x * *w;
        }
    }
    let svd = a.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let (mut best, mut idx) = (f64::INFINITY, 0);
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s < best {
            best = *s;
            idx = i;
        }
    }
    // with fewer rows than unknowns the null space is not among the values
    if svd.singular_values.len() < k {
        idx = k - 1;
    }
    (0..k).map(|j| vt[(idx, j)].conj()).collect()
}

fn normalize(p: &mut [C64]) {
    let s: f64 = libm::sqrt(p.iter().map(|c| c.norm_sqr()).sum::<f64>());
    if s > 0.0 {
        // fix the phase on the largest coefficient for reproducibility
        let big = p.iter().copied().fold(C64::new(0.0, 0.0), |a, b| if b.norm() > a.norm() { b } else { a });
        let phase = big.conj() / big.norm();
        for c in p.iter_mut() {
            *c = *c * phase / s;
        }
    }
}

fn levenberg_marquardt(mut p: Vec<C64>, data: &[(Vec<C64>, C64, C64)], d: usize, iters: usize) -> Vec<C64> {
    let k = p.len();
    let nr = 2 * data.len();
    let mut r = residuals(&p, data, d);
    let mut c = cost(&r);
    let mut lambda = 1e-3;
    for _ in 0..iters {
        if c < 1e-28 {
            break;
        }
        let mut jac = DMatrix::<f64>::zeros(nr, 2 * k);
        for j in 0..2 * k {
            let mut q = p.clone();
            let h = 1e-7;
            if j % 2 == 0 {
                q[j / 2].re += h;
            } else {
                q[j / 2].im += h;
            }
            let rq = residuals(&q, data, d);
            for i in 0..data.len() {
                let dr = (rq[i] - r[i]) / h;
                jac[(2 * i, j)] = dr.re;
                jac[(2 * i + 1, j)] = dr.im;
            }
        }
        let rv = DVector::<f64>::from_iterator(nr, r.iter().flat_map(|e| [e.re, e.im]));
        let jt = jac.transpose();
        let jtj = &jt * &jac;
        let g = &jt * &rv;
        let mut improved = false;
        for _ in 0..12 {
            let mut m = jtj.clone();
            for i in 0..2 * k {
                m[(i, i)] += lambda * (jtj[(i, i)] + 1e-12);
            }
            let Some(step) = m.lu().solve(&(-&g)) else {
                lambda *= 10.0;
                continue;
            };
            let mut q = p.clone();
            for j in 0..k {
                q[j] += C64::new(step[2 * j], step[2 * j + 1]);
            }
            normalize(&mut q);
            let rq = residuals(&q, data, d);
            let cq = cost(&rq);
            if cq < c {
                let rel = (c - cq) / c.max(1e-300);
                p = q;
                r = rq;
                c = cq;
                lambda = (lambda * 0.3).max(1e-12);
                improved = rel > 1e-12;
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    p
}

/// Fits a rational map of degree at most `degree` to `(ζ, value)` samples.
pub fn fit_rational(samples: &[(C64, SpherePoint)], degree: usize) -> Result<Fit> {
    if samples.len() < 2 * degree + 2 {
        return Err(Error::Fit("too few samples".into()));
    }
    let d = degree;
    let data: Vec<(Vec<C64>, C64, C64)> = homogeneous(samples).into_iter().map(|(z, x, y)| (powers(z, d), x, y)).collect();
    if d == 0 {
        // chordal barycenter of the sample values
        let mut v = [0.0; 3];
        for &(_, w) in samples {
            let u = w.to_unit_vector();
            for i in 0..3 {
                v[i] += u[i];
            }
        }
        let w = SpherePoint::from_unit_vector(v);
        let map = RationalMap::constant(w);
        return Ok(finish(map, samples));
    }
    let mut weights = vec![1.0; data.len()];
    let mut p = linearized(&data, d, &weights);
    for _ in 0..3 {
        let (a, b) = p.split_at(d + 1);
        for (w, (pw, _, _)) in weights.iter_mut().zip(&data) {
            let h = libm::sqrt(eval(a, pw).norm_sqr() + eval(b, pw).norm_sqr());
            *w = if h > 0.0 { 1.0 / h } else { 1.0 };
        }
        p = linearized(&data, d, &weights);
    }
    normalize(&mut p);
    let p = levenberg_marquardt(p, &data, d, 200);
    let (a, b) = p.split_at(d + 1);
    let map = RationalMap::new(Polynomial::new(a.to_vec()), Polynomial::new(b.to_vec()))?;
    Ok(finish(map, samples))
}

fn finish(map: RationalMap, samples: &[(C64, SpherePoint)]) -> Fit {
    let mut sum = 0.0;
    let mut max: f64 = 0.0;
    for &(z, w) in samples {
        let e = crate::sphere::chordal_distance(map.value(z), w);
        sum += e * e;
        max = max.max(e);
    }
    Fit { map, mse: sum / samples.len() as f64, max_residual: max }
}
