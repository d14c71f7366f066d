use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::sphere::C64;

#[derive(Debug, Clone, PartialEq)]
pub enum RegionKind {
    Disk { center: C64, radius: f64 },
    Annulus { center: C64, inner: f64, outer: f64 },
    Rect { x0: f64, x1: f64, y0: f64, y1: f64 },
    DiskMinusDisks { center: C64, radius: f64, holes: Vec<(C64, f64)> },
    FullPlane,
}

/// A planar domain together with a finite exceptional set. The exceptional
/// points have zero area and are skipped by curve constructions.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub kind: RegionKind,
    pub excluded: Vec<C64>,
}

fn positive(x: f64, what: &str) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(alloc::format!("{what} must be positive and finite")))
    }
}

impl Region {
    pub fn disk(center: C64, radius: f64) -> Result<Self> {
        positive(radius, "radius")?;
        Ok(Region { kind: RegionKind::Disk { center, radius }, excluded: Vec::new() })
    }

    pub fn unit_disk() -> Self {
        Region { kind: RegionKind::Disk { center: C64::new(0.0, 0.0), radius: 1.0 }, excluded: Vec::new() }
    }

    pub fn annulus(center: C64, inner: f64, outer: f64) -> Result<Self> {
        positive(inner, "inner radius")?;
        positive(outer, "outer radius")?;
        if inner >= outer {
            return Err(Error::InvalidArgument("annulus needs inner < outer".into()));
        }
        Ok(Region { kind: RegionKind::Annulus { center, inner, outer }, excluded: Vec::new() })
    }

    pub fn rect(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        if !(x0 < x1 && y0 < y1) || ![x0, x1, y0, y1].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidArgument("rectangle needs x0 < x1 and y0 < y1".into()));
        }
        Ok(Region { kind: RegionKind::Rect { x0, x1, y0, y1 }, excluded: Vec::new() })
    }

    pub fn disk_minus_disks(center: C64, radius: f64, holes: Vec<(C64, f64)>) -> Result<Self> {
        positive(radius, "radius")?;
        for (i, &(c, r)) in holes.iter().enumerate() {
            positive(r, "hole radius")?;
            if (c - center).norm() + r >= radius {
                return Err(Error::InvalidArgument("hole is not inside the outer disk".into()));
            }
            for &(c2, r2) in &holes[..i] {
                if (c - c2).norm() <= r + r2 {
                    return Err(Error::InvalidArgument("holes overlap".into()));
                }
            }
        }
        Ok(Region { kind: RegionKind::DiskMinusDisks { center, radius, holes }, excluded: Vec::new() })
    }

    pub fn full_plane() -> Self {
        Region { kind: RegionKind::FullPlane, excluded: Vec::new() }
    }

    pub fn with_excluded(mut self, points: Vec<C64>) -> Self {
        self.excluded = points;
        self
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self.kind, RegionKind::FullPlane)
    }

    pub fn contains(&self, z: C64) -> bool {
        if self.excluded.contains(&z) {
            return false;
        }
        match &self.kind {
            RegionKind::Disk { center, radius } => (z - center).norm() < *radius,
            RegionKind::Annulus { center, inner, outer } => {
                let d = (z - center).norm();
                d > *inner && d < *outer
            }
            RegionKind::Rect { x0, x1, y0, y1 } => z.re > *x0 && z.re < *x1 && z.im > *y0 && z.im < *y1,
            RegionKind::DiskMinusDisks { center, radius, holes } => {
                (z - center).norm() < *radius && holes.iter().all(|(c, r)| (z - c).norm() > *r)
            }
            RegionKind::FullPlane => true,
        }
    }

    /// `[x0, x1, y0, y1]`, or `None` for the full plane.
    pub fn bounding_box(&self) -> Option<[f64; 4]> {
        let disk = |c: C64, r: f64| [c.re - r, c.re + r, c.im - r, c.im + r];
        match &self.kind {
            RegionKind::Disk { center, radius } => Some(disk(*center, *radius)),
            RegionKind::Annulus { center, outer, .. } => Some(disk(*center, *outer)),
            RegionKind::Rect { x0, x1, y0, y1 } => Some([*x0, *x1, *y0, *y1]),
            RegionKind::DiskMinusDisks { center, radius, .. } => Some(disk(*center, *radius)),
            RegionKind::FullPlane => None,
        }
    }

    /// Euclidean area of the region.
    pub fn euclidean_area(&self) -> f64 {
        match &self.kind {
            RegionKind::Disk { radius, .. } => PI * radius * radius,
            RegionKind::Annulus { inner, outer, .. } => PI * (outer * outer - inner * inner),
            RegionKind::Rect { x0, x1, y0, y1 } => (x1 - x0) * (y1 - y0),
            RegionKind::DiskMinusDisks { radius, holes, .. } => {
                PI * (radius * radius - holes.iter().map(|(_, r)| r * r).sum::<f64>())
            }
            RegionKind::FullPlane => f64::INFINITY,
        }
    }

    /// Signed chart decomposition of a bounded region.
    pub(crate) fn pieces(&self) -> Result<Vec<(f64, Chart)>> {
        Ok(match &self.kind {
            RegionKind::Disk { center, radius } => vec![(1.0, Chart::polar(*center, 0.0, *radius))],
            RegionKind::Annulus { center, inner, outer } => vec![(1.0, Chart::polar(*center, *inner, *outer))],
            RegionKind::Rect { x0, x1, y0, y1 } => vec![(1.0, Chart::Rect { x0: *x0, x1: *x1, y0: *y0, y1: *y1 })],
            RegionKind::DiskMinusDisks { center, radius, holes } => {
                let mut v = vec![(1.0, Chart::polar(*center, 0.0, *radius))];
                v.extend(holes.iter().map(|&(c, r)| (-1.0, Chart::polar(c, 0.0, r))));
                v
            }
            RegionKind::FullPlane => return Err(Error::UnboundedDomain),
        })
    }

    /// Signed chart decomposition of `rect ∩ self`.
    pub(crate) fn clip_pieces(&self, x0: f64, x1: f64, y0: f64, y1: f64) -> Vec<(f64, Chart)> {
        match &self.kind {
            RegionKind::Disk { center, radius } => clip_disk(x0, x1, y0, y1, *center, *radius),
            RegionKind::Annulus { center, inner, outer } => {
                let mut v = clip_disk(x0, x1, y0, y1, *center, *outer);
                v.extend(clip_disk(x0, x1, y0, y1, *center, *inner).into_iter().map(|(s, c)| (-s, c)));
                v
            }
            RegionKind::Rect { x0: a0, x1: a1, y0: b0, y1: b1 } => {
                let (lx, hx, ly, hy) = (x0.max(*a0), x1.min(*a1), y0.max(*b0), y1.min(*b1));
                if lx < hx && ly < hy {
                    vec![(1.0, Chart::Rect { x0: lx, x1: hx, y0: ly, y1: hy })]
                } else {
                    Vec::new()
                }
            }
            RegionKind::DiskMinusDisks { center, radius, holes } => {
                let mut v = clip_disk(x0, x1, y0, y1, *center, *radius);
                for &(c, r) in holes {
                    v.extend(clip_disk(x0, x1, y0, y1, c, r).into_iter().map(|(s, ch)| (-s, ch)));
                }
                v
            }
            RegionKind::FullPlane => vec![(1.0, Chart::Rect { x0, x1, y0, y1 })],
        }
    }
}

fn clip_disk(x0: f64, x1: f64, y0: f64, y1: f64, c: C64, r: f64) -> Vec<(f64, Chart)> {
    let (lx, hx) = (x0.max(c.re - r), x1.min(c.re + r));
    if lx >= hx {
        return Vec::new();
    }
    // rectangle fully inside the disk
    let corners = [C64::new(x0, y0), C64::new(x0, y1), C64::new(x1, y0), C64::new(x1, y1)];
    if corners.iter().all(|z| (z - c).norm() <= r) {
        return vec![(1.0, Chart::Rect { x0, x1, y0, y1 })];
    }
    // breakpoints where the active boundary switches between edge and arc
    let mut xs = vec![lx, hx];
    for y in [y0, y1] {
        let dy = y - c.im;
        if dy.abs() < r {
            let w = libm::sqrt(r * r - dy * dy);
            for x in [c.re - w, c.re + w] {
                if x > lx && x < hx {
                    xs.push(x);
                }
            }
        }
    }
    if c.re > lx && c.re < hx {
        xs.push(c.re);
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mut out = Vec::new();
    for w in xs.windows(2) {
        if w[1] > w[0] {
            let chart = Chart::Clip { x0: w[0], x1: w[1], y0, y1, c, r };
            let mid = 0.5 * (w[0] + w[1]);
            let (lo, hi) = chart.clip_range(mid);
            if hi > lo {
                out.push((1.0, chart));
            }
        }
    }
    out
}

/// Parametrization of a planar piece by a parameter rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Chart {
    /// `z = c + u e^{iv}`, `u ∈ [r0, r1]`, `v ∈ [0, 2π]`.
    Polar { c: C64, r0: f64, r1: f64 },
    Rect { x0: f64, x1: f64, y0: f64, y1: f64 },
    /// Vertical slices of `[x0, x1] × [y0, y1] ∩ B(c, r)`, `v ∈ [0, 1]`.
    Clip { x0: f64, x1: f64, y0: f64, y1: f64, c: C64, r: f64 },
}

impl Chart {
    pub fn polar(c: C64, r0: f64, r1: f64) -> Self {
        Chart::Polar { c, r0, r1 }
    }

    fn clip_range(&self, x: f64) -> (f64, f64) {
        match *self {
            Chart::Clip { y0, y1, c, r, .. } => {
                let dx = x - c.re;
                let h = libm::sqrt((r * r - dx * dx).max(0.0));
                (y0.max(c.im - h), y1.min(c.im + h))
            }
            _ => (0.0, 0.0),
        }
    }

    pub fn domain(&self) -> super::engine::Cell {
        use super::engine::Cell;
        match *self {
            Chart::Polar { r0, r1, .. } => Cell { u0: r0, u1: r1, v0: 0.0, v1: 2.0 * PI },
            Chart::Rect { x0, x1, y0, y1 } => Cell { u0: x0, u1: x1, v0: y0, v1: y1 },
            Chart::Clip { x0, x1, .. } => Cell { u0: x0, u1: x1, v0: 0.0, v1: 1.0 },
        }
    }

    pub fn initial(&self) -> (usize, usize) {
        match *self {
            Chart::Polar { .. } => (2, 8),
            Chart::Rect { .. } => (2, 2),
            Chart::Clip { .. } => (2, 2),
        }
    }

    /// Point and area Jacobian at parameters `(u, v)`.
    #[inline]
    pub fn map(&self, u: f64, v: f64) -> (C64, f64) {
        match *self {
            Chart::Polar { c, .. } => {
                let (s, co) = libm::sincos(v);
                (c + C64::new(u * co, u * s), u)
            }
            Chart::Rect { .. } => (C64::new(u, v), 1.0),
            Chart::Clip { .. } => {
                let (lo, hi) = self.clip_range(u);
                let h = (hi - lo).max(0.0);
                (C64::new(u, lo + v * h), h)
            }
        }
    }

    /// Parameters of `z`, if it lies in the closed piece. The flag marks
    /// points whose `v` coordinate is degenerate (the polar origin).
    #[cfg(test)]
    pub fn locate(&self, z: C64) -> Option<(f64, f64, bool)> {
        match *self {
            Chart::Polar { c, r0, r1 } => {
                let d = (z - c).norm();
                if d < r0 || d > r1 {
                    return None;
                }
                if d <= 1e-300 {
                    return Some((0.0, 0.0, true));
                }
                let mut t = (z - c).arg();
                if t < 0.0 {
                    t += 2.0 * PI;
                }
                Some((d, t, false))
            }
            Chart::Rect { x0, x1, y0, y1 } => {
                (z.re >= x0 && z.re <= x1 && z.im >= y0 && z.im <= y1).then_some((z.re, z.im, false))
            }
            Chart::Clip { x0, x1, .. } => {
                if z.re < x0 || z.re > x1 {
                    return None;
                }
                let (lo, hi) = self.clip_range(z.re);
                if z.im < lo || z.im > hi || hi <= lo {
                    return None;
                }
                Some((z.re, (z.im - lo) / (hi - lo), false))
            }
        }
    }

    /// Chart coordinates of the points of the chart nearest to `z`, when
    /// `z` lies within `reach` of it. Points near the angular seam of a
    /// polar chart are reported on both sides.
    pub fn locate_near(&self, z: C64, reach: f64) -> Vec<(f64, f64, bool)> {
        let mut out = Vec::new();
        match *self {
            Chart::Polar { c, r0, r1 } => {
                let d = (z - c).norm();
                if d < r0 - reach || d > r1 + reach {
                    return out;
                }
                let u = d.clamp(r0, r1);
                if d <= reach {
                    out.push((u, 0.0, true));
                    return out;
                }
                let mut t = (z - c).arg();
                if t < 0.0 {
                    t += 2.0 * PI;
                }
                out.push((u, t, false));
                let w = reach / d;
                if t < w {
                    out.push((u, 2.0 * PI, false));
                }
                if 2.0 * PI - t < w {
                    out.push((u, 0.0, false));
                }
            }
            Chart::Rect { x0, x1, y0, y1 } => {
                if z.re >= x0 - reach && z.re <= x1 + reach && z.im >= y0 - reach && z.im <= y1 + reach {
                    out.push((z.re.clamp(x0, x1), z.im.clamp(y0, y1), false));
                }
            }
            Chart::Clip { x0, x1, .. } => {
                if z.re < x0 - reach || z.re > x1 + reach {
                    return out;
                }
                let x = z.re.clamp(x0, x1);
                let (lo, hi) = self.clip_range(x);
                if hi <= lo || z.im < lo - reach || z.im > hi + reach {
                    return out;
                }
                out.push((x, (z.im.clamp(lo, hi) - lo) / (hi - lo), false));
            }
        }
        out
    }

    /// Euclidean size of a parameter cell along each axis.
    pub fn extent(&self, cell: &super::engine::Cell) -> (f64, f64) {
        let du = cell.u1 - cell.u0;
        let dv = cell.v1 - cell.v0;
        match *self {
            Chart::Polar { .. } => (du, cell.u1 * dv),
            Chart::Rect { .. } => (du, dv),
            Chart::Clip { y0, y1, r, .. } => (du, (y1 - y0).min(2.0 * r) * dv),
        }
    }
}

/// A rectifiable oriented curve.
#[derive(Debug, Clone, PartialEq)]
pub enum Path {
    Circle { center: C64, radius: f64, orientation: i8 },
    Segment { a: C64, b: C64 },
    Polyline { points: Vec<C64> },
}

impl Path {
    pub fn circle(center: C64, radius: f64) -> Self {
        Path::Circle { center, radius, orientation: 1 }
    }

    pub fn segment(a: C64, b: C64) -> Self {
        Path::Segment { a, b }
    }

    /// Euclidean length.
    pub fn euclidean_length(&self) -> f64 {
        match self {
            Path::Circle { radius, .. } => 2.0 * PI * radius,
            Path::Segment { a, b } => (b - a).norm(),
            Path::Polyline { points } => points.windows(2).map(|w| (w[1] - w[0]).norm()).sum(),
        }
    }

    /// Straight or circular pieces with parametrizations over `[0, 1]`
    /// returning `(z, |dz/dt|)`.
    pub(crate) fn arcs(&self) -> Vec<Arc> {
        match self {
            Path::Circle { center, radius, orientation } => {
                vec![Arc::Circle { c: *center, r: *radius, sign: if *orientation < 0 { -1.0 } else { 1.0 } }]
            }
            Path::Segment { a, b } => vec![Arc::Line { a: *a, b: *b }],
            Path::Polyline { points } => points.windows(2).map(|w| Arc::Line { a: w[0], b: w[1] }).collect(),
        }
    }

    /// Point at parameter `t ∈ [0, 1]`.
    pub fn point(&self, t: f64) -> C64 {
        match self {
            Path::Polyline { points } if points.len() >= 2 => {
                let n = points.len() - 1;
                let s = (t.clamp(0.0, 1.0) * n as f64).min(n as f64 - 1e-15);
                let i = (s as usize).min(n - 1);
                let f = s - i as f64;
                points[i] + (points[i + 1] - points[i]) * f
            }
            Path::Polyline { points } => points.first().copied().unwrap_or_default(),
            _ => self.arcs()[0].at(t).0,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum Arc {
    Circle { c: C64, r: f64, sign: f64 },
    Line { a: C64, b: C64 },
}

impl Arc {
    #[inline]
    pub fn at(&self, t: f64) -> (C64, f64) {
        match *self {
            Arc::Circle { c, r, sign } => {
                let (s, co) = libm::sincos(sign * 2.0 * PI * t);
                (c + C64::new(r * co, r * s), 2.0 * PI * r)
            }
            Arc::Line { a, b } => (a + (b - a) * t, (b - a).norm()),
        }
    }

    /// Parameter of the point on the arc closest to `z` and the distance.
    pub fn nearest(&self, z: C64) -> (f64, f64) {
        match *self {
            Arc::Circle { c, r, sign } => {
                let d = z - c;
                let mut t = sign * d.arg() / (2.0 * PI);
                t -= libm::floor(t);
                (t, (d.norm() - r).abs())
            }
            Arc::Line { a, b } => {
                let ab = b - a;
                let l2 = ab.norm_sqr();
                let t = if l2 == 0.0 { 0.0 } else { (((z - a) * ab.conj()).re / l2).clamp(0.0, 1.0) };
                (t, (a + ab * t - z).norm())
            }
        }
    }
}
