//! Simultaneous polynomial root finding (Aberth–Ehrlich iteration).
//!
//! All roots are refined together; no root is ever divided out of the
//! polynomial, so clustered and multiple roots keep a small backward error.
//! Initial approximations are placed on circles whose radii come from the
//! upper convex hull of `(k, log|a_k|)` (the Newton polygon), which keeps the
//! iteration well behaved when root moduli span many orders of magnitude.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;


use super::C64;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    pub max_iter: usize,
    /// Accepted backward error `|p(z)| / Σ|a_k||z|^k`.
    pub tol: f64,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions { max_iter: 800, tol: 1e-11 }
    }
}

/// Roots of `Σ coeffs[k] z^k`. Exact zero low-order coefficients yield exact
/// zero roots.
pub fn find_roots(coeffs: &[C64], opts: &RootOptions) -> Result<Vec<C64>> {
    let mut hi = coeffs.len();
    while hi > 0 && is_zero(coeffs[hi - 1]) {
        hi -= 1;
    }
    if hi == 0 {
        return Err(Error::InvalidArgument("roots of the zero polynomial".into()));
    }
    let mut lo = 0;
    while is_zero(coeffs[lo]) {
        lo += 1;
    }
    let mut roots = vec![C64::new(0.0, 0.0); lo];
    let p = &coeffs[lo..hi];
    let n = p.len() - 1;
    match n {
        0 => {}
        1 => roots.push(-p[0] / p[1]),
        _ => roots.extend(aberth(p, opts)?),
    }
    Ok(roots)
}

fn is_zero(c: C64) -> bool {
    c.re == 0.0 && c.im == 0.0
}

fn initial_guesses(p: &[C64]) -> Vec<C64> {
    let n = p.len() - 1;
    let logs: Vec<f64> = p
        .iter()
        .map(|c| if is_zero(*c) { f64::NEG_INFINITY } else { libm::log(c.norm()) })
        .collect();
    // upper convex hull of (k, log|a_k|)
    let mut hull: Vec<usize> = Vec::new();
    for k in 0..=n {
        if logs[k] == f64::NEG_INFINITY {
            continue;
        }
        while hull.len() >= 2 {
            let (i, j) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (j as f64 - i as f64) * (logs[k] - logs[i]) - (k as f64 - i as f64) * (logs[j] - logs[i]);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(k);
    }
    let mut z = Vec::with_capacity(n);
    let sigma = 0.7;
    for w in hull.windows(2) {
        let (i, j) = (w[0], w[1]);
        let m = j - i;
        let radius = libm::exp((logs[i] - logs[j]) / m as f64);
        for q in 0..m {
            let theta = 2.0 * PI * q as f64 / m as f64 + 2.0 * PI * i as f64 / n as f64 + sigma;
            z.push(C64::from_polar(radius, theta));
        }
    }
    z
}

/// Newton correction `p/p'` plus the backward error at `z`, evaluated in the
/// reversed polynomial when `|z| > 1`.
fn newton_ratio(p: &[C64], z: C64) -> (C64, f64) {
    let n = p.len() - 1;
    if z.norm() <= 1.0 {
        let (mut v, mut d, mut s) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0), 0.0);
        let az = z.norm();
        for &c in p.iter().rev() {
            d = d * z + v;
            v = v * z + c;
            s = s * az + c.norm();
        }
        (v / d, v.norm() / s)
    } else {
        let y = z.inv();
        let ay = y.norm();
        let (mut q, mut dq, mut s) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0), 0.0);
        for &c in p.iter() {
            dq = dq * y + q;
            q = q * y + c;
            s = s * ay + c.norm();
        }
        // p(z) = z^n q(y), p'(z) = z^{n-1} (n q − y q')
        let denom = q * n as f64 - y * dq;
        (z * q / denom, q.norm() / s)
    }
}

fn aberth(p: &[C64], opts: &RootOptions) -> Result<Vec<C64>> {
    let n = p.len() - 1;
    let mut z = initial_guesses(p);
    let mut done = vec![false; n];
    let eps = f64::EPSILON;
    for _ in 0..opts.max_iter {
        let mut all = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (ratio, backward) = newton_ratio(p, z[i]);
            if !ratio.re.is_finite() || !ratio.im.is_finite() {
                // exact root (p' may vanish too at a multiple root)
                if backward <= opts.tol {
                    done[i] = true;
                    continue;
                }
                let bump = C64::new(libm::sqrt(eps), libm::sqrt(eps)) * (1.0 + z[i].norm());
                z[i] += bump;
                all = false;
                continue;
            }
            let mut s = C64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let d = z[i] - z[j];
                    if !is_zero(d) {
                        s += d.inv();
                    }
                }
            }
            let step = ratio / (C64::new(1.0, 0.0) - ratio * s);
            z[i] -= step;
            if step.norm() <= 4.0 * eps * z[i].norm() || backward <= eps {
                done[i] = true;
            } else {
                all = false;
            }
        }
        if all {
            break;
        }
    }
    let max_residual = z.iter().map(|&zi| newton_ratio(p, zi).1).fold(0.0, f64::max);
    if !(max_residual <= opts.tol) {
        return Err(Error::RootsNotConverged { max_residual });
    }
    Ok(z)
}
