//! Globally adaptive cubature over rectangles in a parameter plane.
//!
//! Every cell carries a tensor Kronrod estimate and the difference to the
//! embedded tensor Gauss estimate. The cell with the largest error is bisected
//! along the axis whose mixed Gauss/Kronrod difference dominates. Cells are
//! bisected up front until they are no larger than the hinted feature size
//! or their distance from the hint, so narrow spikes cannot hide between
//! nodes or behind a cell boundary.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::rules::{WG, WK, XK};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_cells: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { rel_tol: 1e-6, abs_tol: 1e-18, max_cells: 60_000 }
    }
}

impl QuadOptions {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        QuadOptions { rel_tol, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub cells: usize,
}

/// Parameter rectangle `[u0, u1] × [v0, v1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Cell {
    pub u0: f64,
    pub u1: f64,
    pub v0: f64,
    pub v1: f64,
}

impl Cell {
    fn split(&self, along_u: bool) -> (Cell, Cell) {
        if along_u {
            let m = 0.5 * (self.u0 + self.u1);
            (Cell { u1: m, ..*self }, Cell { u0: m, ..*self })
        } else {
            let m = 0.5 * (self.v0 + self.v1);
            (Cell { v1: m, ..*self }, Cell { v0: m, ..*self })
        }
    }
}

/// A feature location in parameter space with the largest admissible
/// Euclidean cell extent around it.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Hint {
    pub u: f64,
    pub v: f64,
    pub size: f64,
    /// Match every cell touching `u`, whatever its `v` range.
    pub all_v: bool,
}

struct Scored {
    cell: Cell,
    value: f64,
    error: f64,
    split_u: bool,
    seq: usize,
}

impl PartialEq for Scored {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Scored {}
impl PartialOrd for Scored {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Scored {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error).then(other.seq.cmp(&self.seq))
    }
}

fn rule<F: Fn(f64, f64) -> f64>(f: &F, c: &Cell) -> (f64, f64, bool) {
    let (hu, hv) = (0.5 * (c.u1 - c.u0), 0.5 * (c.v1 - c.v0));
    let (mu, mv) = (0.5 * (c.u1 + c.u0), 0.5 * (c.v1 + c.v0));
    let (mut kk, mut gg, mut gk, mut kg) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..15 {
        let u = mu + hu * XK[i];
        let (mut rk, mut rg) = (0.0, 0.0);
        for j in 0..15 {
            let y = f(u, mv + hv * XK[j]);
            rk += WK[j] * y;
            rg += WG[j] * y;
        }
        kk += WK[i] * rk;
        gg += WG[i] * rg;
        gk += WG[i] * rk;
        kg += WK[i] * rg;
    }
    let s = hu * hv;
    let (kk, gg, gk, kg) = (kk * s, gg * s, gk * s, kg * s);
    let err = (kk - gg).abs();
    // gk: Gauss in u only; large |kk − gk| means the u direction is unresolved
    let split_u = (kk - gk).abs() >= (kk - kg).abs();
    (kk, err, split_u)
}

/// Cells near a hint are refined to at most this multiple of their distance
/// from it.
const GRADING: f64 = 1.0;

/// Integrates `f(u, v)` over `domain`. `extent(cell)` returns the Euclidean
/// size of a cell along `u` and `v`; it is used only for hint refinement.
pub(crate) fn integrate<F, E>(f: F, domain: Cell, initial: (usize, usize), hints: &[Hint], extent: E, opts: &QuadOptions) -> Result<Estimate>
where
    F: Fn(f64, f64) -> f64,
    E: Fn(&Cell) -> (f64, f64),
{
    let mut cells: Vec<Cell> = Vec::new();
    let (nu, nv) = initial;
    for i in 0..nu.max(1) {
        for j in 0..nv.max(1) {
            let du = (domain.u1 - domain.u0) / nu.max(1) as f64;
            let dv = (domain.v1 - domain.v0) / nv.max(1) as f64;
            cells.push(Cell {
                u0: domain.u0 + du * i as f64,
                u1: if i + 1 == nu.max(1) { domain.u1 } else { domain.u0 + du * (i + 1) as f64 },
                v0: domain.v0 + dv * j as f64,
                v1: if j + 1 == nv.max(1) { domain.v1 } else { domain.v0 + dv * (j + 1) as f64 },
            });
        }
    }
    // graded pre-refinement around hints
    for h in hints {
        let mut guard = 0;
        loop {
            let mut changed = false;
            let mut next = Vec::with_capacity(cells.len() + 4);
            for c in cells.drain(..) {
                let (eu, ev) = extent(&c);
                // Euclidean distance from the hint, through the local scale
                let du = (h.u - h.u.clamp(c.u0, c.u1)) * eu / (c.u1 - c.u0);
                let dv = if h.all_v { 0.0 } else { (h.v - h.v.clamp(c.v0, c.v1)) * ev / (c.v1 - c.v0) };
                let dist = libm::sqrt(du * du + dv * dv);
                if eu.max(ev) > h.size.max(GRADING * dist) {
                    let (a, b) = c.split(eu >= ev);
                    next.push(a);
                    next.push(b);
                    changed = true;
                    continue;
                }
                next.push(c);
            }
            cells = next;
            guard += 1;
            if !changed || guard > 200 || cells.len() > opts.max_cells / 2 {
                break;
            }
        }
    }

    let mut heap = BinaryHeap::with_capacity(cells.len() * 2);
    let (mut total, mut total_err) = (0.0, 0.0);
    let mut seq = 0;
    for c in cells {
        let (value, error, split_u) = rule(&f, &c);
        total += value;
        total_err += error;
        heap.push(Scored { cell: c, value, error, split_u, seq });
        seq += 1;
    }
    let mut refreshed = 0usize;
    loop {
        if total_err <= opts.abs_tol.max(opts.rel_tol * total.abs()) {
            break;
        }
        if heap.len() >= opts.max_cells {
            let (value, error) = resum(&heap);
            if error <= opts.abs_tol.max(opts.rel_tol * value.abs()) {
                break;
            }
            return Err(Error::BudgetExceeded { value, error });
        }
        let worst = heap.pop().expect("heap is never empty");
        let (a, b) = worst.cell.split(worst.split_u);
        total -= worst.value;
        total_err -= worst.error;
        for c in [a, b] {
            let (value, error, split_u) = rule(&f, &c);
            total += value;
            total_err += error;
            heap.push(Scored { cell: c, value, error, split_u, seq });
            seq += 1;
        }
        refreshed += 1;
        if refreshed % 512 == 0 {
            // the running sums drift; recompute them exactly
            let (v, e) = resum(&heap);
            total = v;
            total_err = e;
        }
    }
    let (value, error) = resum(&heap);
    Ok(Estimate { value, error, cells: heap.len() })
}

/// Sums in a fixed order (by creation sequence) so results are reproducible.
fn resum(heap: &BinaryHeap<Scored>) -> (f64, f64) {
    let mut items: Vec<(usize, f64, f64)> = heap.iter().map(|s| (s.seq, s.value, s.error)).collect();
    items.sort_unstable_by_key(|t| t.0);
    let mut v = 0.0;
    let mut comp = 0.0;
    let mut e = 0.0;
    for (_, x, err) in items {
        // Kahan summation
        let y = x - comp;
        let t = v + y;
        comp = (t - v) - y;
        v = t;
        e += err;
    }
    (v, e)
}

/// Adaptive Gauss–Kronrod over consecutive intervals of the sorted `breaks`.
pub(crate) fn integrate_1d<F: Fn(f64) -> f64>(f: F, breaks: &[f64], opts: &QuadOptions) -> Result<Estimate> {
    struct Seg {
        a: f64,
        b: f64,
        value: f64,
        error: f64,
    }
    let eval = |a: f64, b: f64| {
        let (h, m) = (0.5 * (b - a), 0.5 * (b + a));
        let (mut k, mut g) = (0.0, 0.0);
        for i in 0..15 {
            let y = f(m + h * XK[i]);
            k += WK[i] * y;
            g += WG[i] * y;
        }
        (k * h, ((k - g) * h).abs())
    };
    let mut segs: Vec<Seg> = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let (value, error) = eval(w[0], w[1]);
            Seg { a: w[0], b: w[1], value, error }
        })
        .collect();
    loop {
        let value: f64 = segs.iter().map(|s| s.value).sum();
        let error: f64 = segs.iter().map(|s| s.error).sum();
        if error <= opts.abs_tol.max(opts.rel_tol * value.abs()) {
            return Ok(Estimate { value, error, cells: segs.len() });
        }
        if segs.len() >= opts.max_cells {
            return Err(Error::BudgetExceeded { value, error });
        }
        let (idx, _) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error).then(y.0.cmp(&x.0)))
            .expect("nonempty");
        let s = segs.swap_remove(idx);
        let m = 0.5 * (s.a + s.b);
        let (v1, e1) = eval(s.a, m);
        let (v2, e2) = eval(m, s.b);
        segs.push(Seg { a: s.a, b: m, value: v1, error: e1 });
        segs.push(Seg { a: m, b: s.b, value: v2, error: e2 });
        // keep a positional order so summation is reproducible
        segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Cell {
        Cell { u0: 0.0, u1: 1.0, v0: 0.0, v1: 1.0 }
    }

    fn ext(c: &Cell) -> (f64, f64) {
        (c.u1 - c.u0, c.v1 - c.v0)
    }

    #[test]
    fn polynomial_exact() {
        let e = integrate(|u, v| u * u * v, unit(), (1, 1), &[], ext, &QuadOptions::default()).unwrap();
        assert!((e.value - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(e.cells, 1);
    }

    #[test]
    fn narrow_peak_found_with_hint() {
        // ∫∫ s²/(s² + (u−a)² + (v−b)²)² over the plane is π; s tiny
        let (a, b, s) = (0.3, 0.6, 1e-9);
        let f = |u: f64, v: f64| {
            let r2 = (u - a).powi(2) + (v - b).powi(2);
            s * s / (s * s + r2).powi(2)
        };
        let hint = Hint { u: a, v: b, size: s, all_v: false };
        let with = integrate(f, unit(), (1, 1), &[hint], ext, &QuadOptions::with_rel_tol(1e-8)).unwrap();
        assert!((with.value - core::f64::consts::PI).abs() < 1e-6, "{}", with.value);
    }

    #[test]
    fn budget_is_reported() {
        let opts = QuadOptions { rel_tol: 1e-14, abs_tol: 0.0, max_cells: 8 };
        let r = integrate(|u, v| (u * 40.0).sin().abs() * v, unit(), (1, 1), &[], ext, &opts);
        assert!(matches!(r, Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn line_rule() {
        let e = integrate_1d(|x| x.sqrt(), &[0.0, 1.0], &QuadOptions::with_rel_tol(1e-10)).unwrap();
        assert!((e.value - 2.0 / 3.0).abs() < 1e-9);
    }
}
