use core::fmt;

use num_traits::Float;

use super::C64;

/// A point of the extended complex plane. Infinity is an explicit variant and
/// never a large float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpherePoint {
    Finite(C64),
    Infinity,
}

impl SpherePoint {
    pub const ZERO: SpherePoint = SpherePoint::Finite(C64::new(0.0, 0.0));

    pub fn new(re: f64, im: f64) -> Self {
        SpherePoint::Finite(C64::new(re, im))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }

    pub fn finite(&self) -> Option<C64> {
        match *self {
            SpherePoint::Finite(z) => Some(z),
            SpherePoint::Infinity => None,
        }
    }

    /// `1/p`, with `1/0 = ∞` and `1/∞ = 0`.
    pub fn recip(&self) -> SpherePoint {
        match *self {
            SpherePoint::Infinity => SpherePoint::ZERO,
            SpherePoint::Finite(z) if z.re == 0.0 && z.im == 0.0 => SpherePoint::Infinity,
            SpherePoint::Finite(z) => SpherePoint::Finite(z.inv()),
        }
    }

    /// Homogeneous coordinates `(x, y)` with `p = x / y` and `|x|² + |y|² = 1`.
    pub fn homogeneous(&self) -> (C64, C64) {
        match *self {
            SpherePoint::Infinity => (C64::new(1.0, 0.0), C64::new(0.0, 0.0)),
            SpherePoint::Finite(z) => {
                let s = z.norm();
                if s <= 1.0 {
                    let h = (1.0 + s * s).sqrt();
                    (z / h, C64::new(1.0 / h, 0.0))
                } else {
                    let w = z.inv();
                    let h = (1.0 + 1.0 / (s * s)).sqrt();
                    (C64::new(1.0 / h, 0.0), w / h)
                }
            }
        }
    }

    /// Builds a point from homogeneous coordinates `x / y`.
    pub fn from_homogeneous(x: C64, y: C64) -> Option<SpherePoint> {
        let zero_y = y.re == 0.0 && y.im == 0.0;
        let zero_x = x.re == 0.0 && x.im == 0.0;
        match (zero_x, zero_y) {
            (true, true) => None,
            (false, true) => Some(SpherePoint::Infinity),
            _ => Some(SpherePoint::Finite(x / y)),
        }
    }

    /// Unit vector on S² under inverse stereographic projection from the north pole.
    pub fn to_unit_vector(&self) -> [f64; 3] {
        let (x, y) = self.homogeneous();
        let xy = x * y.conj();
        [2.0 * xy.re, 2.0 * xy.im, x.norm_sqr() - y.norm_sqr()]
    }

    /// Stereographic image of the direction `v`; the zero vector maps to 0.
    pub fn from_unit_vector(v: [f64; 3]) -> SpherePoint {
        let len = libm::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        if len == 0.0 {
            return SpherePoint::ZERO;
        }
        let [a, b, c] = [v[0] / len, v[1] / len, v[2] / len];
        if c >= 1.0 - 1e-15 && a.abs() < 1e-15 && b.abs() < 1e-15 {
            return SpherePoint::Infinity;
        }
        SpherePoint::Finite(C64::new(a, b) / (1.0 - c))
    }
}

impl From<C64> for SpherePoint {
    fn from(z: C64) -> Self {
        SpherePoint::Finite(z)
    }
}

impl From<f64> for SpherePoint {
    fn from(x: f64) -> Self {
        SpherePoint::Finite(C64::new(x, 0.0))
    }
}

impl fmt::Display for SpherePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpherePoint::Infinity => write!(f, "∞"),
            SpherePoint::Finite(z) => write!(f, "{} + {}i", z.re, z.im),
        }
    }
}

/// Chordal distance on the unit sphere, `2|p − q| / √((1+|p|²)(1+|q|²))`,
/// with value in `[0, 2]`.
pub fn chordal_distance(p: SpherePoint, q: SpherePoint) -> f64 {
    let d = match (p, q) {
        (SpherePoint::Infinity, SpherePoint::Infinity) => 0.0,
        (SpherePoint::Infinity, SpherePoint::Finite(z)) | (SpherePoint::Finite(z), SpherePoint::Infinity) => {
            2.0 / 1.0.hypot(z.norm())
        }
        (SpherePoint::Finite(a), SpherePoint::Finite(b)) => {
            let (na, nb) = (a.norm(), b.norm());
            if na > 1.0 && nb > 1.0 {
                // both near infinity: use the 1/z chart to avoid cancellation
                let (ia, ib) = (a.inv(), b.inv());
                2.0 * (ia - ib).norm() / (1.0.hypot(ia.norm()) * 1.0.hypot(ib.norm()))
            } else {
                2.0 * (a - b).norm() / (1.0.hypot(na) * 1.0.hypot(nb))
            }
        }
    };
    d.clamp(0.0, 2.0)
}
