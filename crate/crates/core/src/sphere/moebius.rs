
use super::{SpherePoint, C64};
use crate::error::{Error, Result};

/// `z ↦ (a z + b) / (c z + d)` normalized so that `a d − b c = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoebiusMap {
    a: C64,
    b: C64,
    c: C64,
    d: C64,
}

impl MoebiusMap {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Result<Self> {
        let det = a * d - b * c;
        let scale = a.norm().max(b.norm()).max(c.norm()).max(d.norm());
        if det.norm() <= 1e-14 * scale * scale || !det.re.is_finite() || !det.im.is_finite() {
            return Err(Error::DegenerateMoebius { det: det.norm() });
        }
        let s = det.sqrt();
        Ok(MoebiusMap { a: a / s, b: b / s, c: c / s, d: d / s })
    }

    pub fn identity() -> Self {
        let (o, z) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        MoebiusMap { a: o, b: z, c: z, d: o }
    }

    /// `z ↦ 1/z`.
    pub fn inversion() -> Self {
        let (o, z) = (C64::new(0.0, 1.0), C64::new(0.0, 0.0));
        // (0·z + i)/(i·z + 0) = 1/z with determinant −i·i = 1
        MoebiusMap { a: z, b: o, c: o, d: z }
    }

    /// Rigid rotation of the sphere `(a z − b̄)/(b z + ā)` for `|a|² + |b|² = 1`.
    pub fn rotation(a: C64, b: C64) -> Result<Self> {
        let n = libm::sqrt(a.norm_sqr() + b.norm_sqr());
        if n == 0.0 {
            return Err(Error::DegenerateMoebius { det: 0.0 });
        }
        let (a, b) = (a / n, b / n);
        Self::new(a, -b.conj(), b, a.conj())
    }

    pub fn coefficients(&self) -> [C64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn determinant(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, z: SpherePoint) -> SpherePoint {
        let (x, y) = z.homogeneous();
        let num = self.a * x + self.b * y;
        let den = self.c * x + self.d * y;
        SpherePoint::from_homogeneous(num, den).unwrap_or(SpherePoint::Infinity)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &MoebiusMap) -> MoebiusMap {
        let m = MoebiusMap {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        };
        m.renormalized()
    }

    pub fn inverse(&self) -> MoebiusMap {
        MoebiusMap { a: self.d, b: -self.b, c: -self.c, d: self.a }.renormalized()
    }

    fn renormalized(self) -> MoebiusMap {
        let s = self.determinant().sqrt();
        MoebiusMap { a: self.a / s, b: self.b / s, c: self.c / s, d: self.d / s }
    }
}

/// `z ↦ a z + b` with `a ≠ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap {
    pub a: C64,
    pub b: C64,
}

impl AffineMap {
    pub fn new(a: C64, b: C64) -> Result<Self> {
        if a.norm() == 0.0 || !a.re.is_finite() || !a.im.is_finite() {
            return Err(Error::InvalidArgument("affine map with zero or non-finite slope".into()));
        }
        Ok(AffineMap { a, b })
    }

    pub fn identity() -> Self {
        AffineMap { a: C64::new(1.0, 0.0), b: C64::new(0.0, 0.0) }
    }

    pub fn apply(&self, z: C64) -> C64 {
        self.a * z + self.b
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AffineMap) -> AffineMap {
        AffineMap { a: self.a * other.a, b: self.a * other.b + self.b }
    }

    pub fn inverse(&self) -> AffineMap {
        let ia = self.a.inv();
        AffineMap { a: ia, b: -self.b * ia }
    }

    pub fn to_moebius(&self) -> MoebiusMap {
        MoebiusMap::new(self.a, self.b, C64::new(0.0, 0.0), C64::new(1.0, 0.0))
            .expect("nonzero slope gives a nondegenerate Moebius map")
    }
}
