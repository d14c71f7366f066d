use alloc::vec;
use alloc::vec::Vec;


use super::{chordal_distance, AffineMap, MoebiusMap, Polynomial, SpherePoint, C64};
use crate::error::{Error, Result};

/// Relative distance below which a zero of the numerator and a zero of the
/// denominator are treated as a common factor and cancelled.
pub const TOL_GCD: f64 = 1e-10;

/// Coefficient cut-off used when trimming cancelled leading terms.
const TRIM_REL: f64 = 1e-13;

/// A rational map `num / den` with coprime numerator and denominator.
///
/// Coefficients are scaled so that the largest coefficient modulus across
/// both polynomials is one; this scaling is symmetric under `num ↔ den`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalMap {
    num: Polynomial,
    den: Polynomial,
}

impl RationalMap {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(Self::from_parts(Polynomial::zero(), Polynomial::one()));
        }
        let (num, den) = cancel_common_roots(num, den)?;
        Ok(Self::from_parts(num, den))
    }

    pub fn from_coeffs(num: &[C64], den: &[C64]) -> Result<Self> {
        Self::new(Polynomial::new(num.to_vec()), Polynomial::new(den.to_vec()))
    }

    pub fn from_real(num: &[f64], den: &[f64]) -> Result<Self> {
        Self::new(Polynomial::from_real(num), Polynomial::from_real(den))
    }

    fn from_parts(num: Polynomial, den: Polynomial) -> Self {
        let s = num.max_abs().max(den.max_abs());
        let inv = C64::new(1.0 / s, 0.0);
        RationalMap { num: num.scale(inv), den: den.scale(inv) }
    }

    pub fn constant(c: SpherePoint) -> Self {
        match c {
            SpherePoint::Infinity => Self::from_parts(Polynomial::one(), Polynomial::zero()),
            SpherePoint::Finite(v) if v.norm() == 0.0 => Self::from_parts(Polynomial::zero(), Polynomial::one()),
            SpherePoint::Finite(v) => Self::from_parts(Polynomial::constant(v), Polynomial::one()),
        }
    }

    pub fn identity() -> Self {
        Self::from_parts(Polynomial::monomial(1), Polynomial::one())
    }

    pub fn monomial(d: usize) -> Self {
        Self::from_parts(Polynomial::monomial(d), Polynomial::one())
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn degree(&self) -> usize {
        if self.num.is_zero() || self.den.is_zero() {
            return 0;
        }
        self.num.degree().max(self.den.degree())
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }

    /// `(num(z), den(z))`.
    pub fn eval_homogeneous(&self, z: C64) -> (C64, C64) {
        (self.num.eval(z), self.den.eval(z))
    }

    pub fn eval(&self, z: SpherePoint) -> Result<SpherePoint> {
        match z {
            SpherePoint::Infinity => Ok(self.value_at_infinity()),
            SpherePoint::Finite(z) => {
                let (n, d) = self.eval_homogeneous(z);
                SpherePoint::from_homogeneous(n, d).ok_or(Error::Indeterminate { re: z.re, im: z.im })
            }
        }
    }

    /// `R(z)` for finite `z`; an exact `0/0` (only possible at a floating
    /// coincidence of roots) resolves through the derivatives.
    pub fn value(&self, z: C64) -> SpherePoint {
        let (n, d) = self.eval_homogeneous(z);
        SpherePoint::from_homogeneous(n, d).unwrap_or_else(|| {
            let (dn, dd) = (self.num.derivative().eval(z), self.den.derivative().eval(z));
            SpherePoint::from_homogeneous(dn, dd).unwrap_or(SpherePoint::Infinity)
        })
    }

    pub fn value_at_infinity(&self) -> SpherePoint {
        if self.num.is_zero() {
            return SpherePoint::ZERO;
        }
        if self.den.is_zero() {
            return SpherePoint::Infinity;
        }
        let (dn, dd) = (self.num.degree(), self.den.degree());
        if dn > dd {
            SpherePoint::Infinity
        } else if dn < dd {
            SpherePoint::ZERO
        } else {
            SpherePoint::Finite(self.num.leading() / self.den.leading())
        }
    }

    /// Spherical derivative `2|R'| / (1 + |R|²)` at a finite point.
    ///
    /// Evaluated as `2|N'D − ND'| / (|N|² + |D|²)`, which equals the formula in
    /// the chart of `R` when `|R| ≤ 1` and the formula for `1/R` when `|R| > 1`.
    /// The expression is symmetric in `N ↔ D`, finite at poles, and never
    /// overflows through `R` itself.
    pub fn spherical_derivative(&self, z: C64) -> f64 {
        let (n, dn) = self.num.eval_with_derivative(z);
        let (d, dd) = self.den.eval_with_derivative(z);
        let w = dn * d - n * dd;
        let h = n.norm_sqr() + d.norm_sqr();
        if h == 0.0 {
            return 0.0;
        }
        2.0 * w.norm() / h
    }

    /// Area density `ρ(z)²` of the pullback of the spherical metric.
    pub fn density(&self, z: C64) -> f64 {
        let r = self.spherical_derivative(z);
        r * r
    }

    /// `num' · den − num · den'`, truncated to degree `2d − 2`.
    pub fn wronskian(&self) -> Polynomial {
        let d = self.degree();
        if d == 0 {
            return Polynomial::zero();
        }
        let w = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        let scale = self.num.derivative().max_abs() * self.den.max_abs()
            + self.num.max_abs() * self.den.derivative().max_abs();
        let w = w.truncate(2 * d - 2);
        let cut = TRIM_REL * scale;
        let mut c = w.coeffs().to_vec();
        while c.last().is_some_and(|x| x.norm() <= cut) {
            c.pop();
        }
        Polynomial::new(c)
    }

    /// The `2d − 2` critical points counted with multiplicity: roots of the
    /// Wronskian, with the remaining multiplicity placed at infinity.
    pub fn critical_points(&self) -> Result<Vec<SpherePoint>> {
        let d = self.degree();
        if d <= 1 {
            return Ok(Vec::new());
        }
        let w = self.wronskian();
        let mut pts: Vec<SpherePoint> = if w.is_zero() {
            Vec::new()
        } else {
            w.roots()?.into_iter().map(SpherePoint::Finite).collect()
        };
        let total = 2 * d - 2;
        while pts.len() < total {
            pts.push(SpherePoint::Infinity);
        }
        Ok(pts)
    }

    pub fn critical_values(&self) -> Result<Vec<SpherePoint>> {
        let inf = self.value_at_infinity();
        Ok(self
            .critical_points()?
            .into_iter()
            .map(|c| match c {
                SpherePoint::Infinity => inf,
                SpherePoint::Finite(z) => self.value(z),
            })
            .collect())
    }

    /// Finite solutions of `R(z) = w`; solutions at infinity are omitted.
    pub fn preimages(&self, w: SpherePoint) -> Result<Vec<C64>> {
        let p = match w {
            SpherePoint::Infinity => self.den.clone(),
            SpherePoint::Finite(w) => &self.num - &self.den.scale(w),
        };
        if p.is_zero() {
            return Err(Error::InvalidArgument("every point is a preimage of a constant map".into()));
        }
        if p.degree() == 0 {
            return Ok(Vec::new());
        }
        p.roots()
    }

    /// `R ∘ m`.
    pub fn precompose(&self, m: &MoebiusMap) -> Result<Self> {
        let d = self.degree();
        let [a, b, c, dd] = m.coefficients();
        let top = Polynomial::new(vec![b, a]);
        let bottom = Polynomial::new(vec![dd, c]);
        let tops: Vec<Polynomial> = (0..=d).map(|k| top.pow(k)).collect();
        let bottoms: Vec<Polynomial> = (0..=d).map(|k| bottom.pow(k)).collect();
        let lift = |p: &Polynomial| {
            p.coeffs()
                .iter()
                .enumerate()
                .fold(Polynomial::zero(), |acc, (k, &ck)| &acc + &(&tops[k] * &bottoms[d - k]).scale(ck))
        };
        Self::new(lift(&self.num), lift(&self.den))
    }

    pub fn precompose_affine(&self, m: &AffineMap) -> Result<Self> {
        self.precompose(&m.to_moebius())
    }

    /// `m ∘ R`.
    pub fn postcompose(&self, m: &MoebiusMap) -> Result<Self> {
        let [a, b, c, d] = m.coefficients();
        let num = &self.num.scale(a) + &self.den.scale(b);
        let den = &self.num.scale(c) + &self.den.scale(d);
        Self::new(num, den)
    }

    /// `1 / R`.
    pub fn reciprocal(&self) -> Result<Self> {
        if self.num.is_zero() {
            return Err(Error::IdenticallyZero);
        }
        Ok(RationalMap { num: self.den.clone(), den: self.num.clone() })
    }

    /// `R(z) + z`.
    pub fn add_identity(&self) -> Result<Self> {
        Self::new(&self.num + &self.den.shift(1), self.den.clone())
    }

    /// `R(z) − p`.
    pub fn sub_constant(&self, p: C64) -> Result<Self> {
        Self::new(&self.num - &self.den.scale(p), self.den.clone())
    }

    /// Largest chordal distance between `self` and `other` over `samples`.
    pub fn sup_chordal_distance(&self, other: &RationalMap, samples: &[C64]) -> f64 {
        samples
            .iter()
            .map(|&z| chordal_distance(self.value(z), other.value(z)))
            .fold(0.0, f64::max)
    }
}

/// Removes pairs (zero of `num`, zero of `den`) closer than `TOL_GCD` in
/// relative terms, then rebuilds the affected polynomials from their roots.
fn cancel_common_roots(num: Polynomial, den: Polynomial) -> Result<(Polynomial, Polynomial)> {
    if num.degree() == 0 || den.degree() == 0 {
        return Ok((num, den));
    }
    let zn = num.roots()?;
    let zd = den.roots()?;
    let mut used = vec![false; zd.len()];
    let mut keep_n = Vec::with_capacity(zn.len());
    let mut removed = 0;
    for &a in &zn {
        let best = zd
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, &b)| (j, (a - b).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1));
        match best {
            Some((j, dist)) if dist <= TOL_GCD * a.norm().max(zd[j].norm()) => {
                used[j] = true;
                removed += 1;
            }
            _ => keep_n.push(a),
        }
    }
    if removed == 0 {
        return Ok((num, den));
    }
    let keep_d: Vec<C64> = zd.iter().zip(&used).filter(|(_, u)| !**u).map(|(z, _)| *z).collect();
    Ok((
        Polynomial::from_roots(num.leading(), &keep_n),
        Polynomial::from_roots(den.leading(), &keep_d),
    ))
}
