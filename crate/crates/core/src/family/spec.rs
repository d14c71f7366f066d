use alloc::string::String;
use alloc::vec::Vec;

use super::expr::Expr;
use crate::error::{Error, Result};
use crate::quadrature::Region;
use crate::sphere::RationalMap;

/// A sequence `n ↦ F_n` of rational maps given by coefficient expressions,
/// together with a domain and a finite ladder of indices.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilySpec {
    num: Vec<Expr>,
    den: Vec<Expr>,
    pub domain: Region,
    ladder: Vec<u64>,
    pub bound: Option<f64>,
}

fn parse_all(list: &[&str], what: &str) -> Result<Vec<Expr>> {
    if list.is_empty() {
        return Err(Error::InvalidArgument(alloc::format!("{what} coefficient list is empty")));
    }
    list.iter().map(|s| Expr::parse(s)).collect()
}

impl FamilySpec {
    /// Coefficients are listed lowest degree first.
    pub fn parse(num: &[&str], den: &[&str], domain: Region, ladder: Vec<u64>, bound: Option<f64>) -> Result<Self> {
        Self::from_exprs(parse_all(num, "numerator")?, parse_all(den, "denominator")?, domain, ladder, bound)
    }

    pub fn from_exprs(num: Vec<Expr>, den: Vec<Expr>, domain: Region, mut ladder: Vec<u64>, bound: Option<f64>) -> Result<Self> {
        if num.is_empty() || den.is_empty() {
            return Err(Error::InvalidArgument("coefficient list is empty".into()));
        }
        if ladder.is_empty() {
            return Err(Error::InvalidArgument("index ladder is empty".into()));
        }
        if ladder.contains(&0) {
            return Err(Error::InvalidArgument("indices must be positive".into()));
        }
        ladder.sort_unstable();
        ladder.dedup();
        if let Some(c) = bound {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::InvalidArgument("area bound must be positive".into()));
            }
        }
        Ok(FamilySpec { num, den, domain, ladder, bound })
    }

    pub fn num(&self) -> &[Expr] {
        &self.num
    }

    pub fn den(&self) -> &[Expr] {
        &self.den
    }

    /// Increasing indices.
    pub fn ladder(&self) -> &[u64] {
        &self.ladder
    }

    pub fn top(&self) -> u64 {
        *self.ladder.last().expect("ladder is nonempty")
    }

    pub fn num_source(&self) -> Vec<String> {
        self.num.iter().map(Expr::render).collect()
    }

    pub fn den_source(&self) -> Vec<String> {
        self.den.iter().map(Expr::render).collect()
    }

    pub fn with_ladder(&self, ladder: Vec<u64>) -> Result<Self> {
        Self::from_exprs(self.num.clone(), self.den.clone(), self.domain.clone(), ladder, self.bound)
    }

    pub fn with_exprs(&self, num: Vec<Expr>, den: Vec<Expr>) -> Result<Self> {
        Self::from_exprs(num, den, self.domain.clone(), self.ladder.clone(), self.bound)
    }
}

/// `F_n` with its coefficients evaluated.
pub fn instantiate(spec: &FamilySpec, n: u64) -> Result<RationalMap> {
    let (lo, hi) = (spec.ladder[0], spec.top());
    if n < lo || n > hi {
        return Err(Error::InvalidArgument(alloc::format!("n = {n} outside {lo}..={hi}")));
    }
    let x = n as f64;
    let num: Vec<f64> = spec.num.iter().map(|e| e.eval(x)).collect::<Result<_>>()?;
    let den: Vec<f64> = spec.den.iter().map(|e| e.eval(x)).collect::<Result<_>>()?;
    RationalMap::from_real(&num, &den)
}
