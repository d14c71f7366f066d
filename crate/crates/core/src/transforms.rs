//! Reductions of general sequences to ones with nonconstant, pole-free
//! limits: inversion, the `F + z` perturbation, and the inverse bookkeeping
//! on bubble trees.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::family::{instantiate, Expr, FamilySpec};
use crate::sphere::{chordal_distance, RationalMap, SpherePoint, C64};
use crate::tree::{BubbleTree, Parent, TOL_NODE};

/// Spherical derivatives at or above this count as large in the
/// comparability check.
pub const LARGE_DERIVATIVE: f64 = 10.0;

/// `1 / F`.
pub fn invert(f: &RationalMap) -> Result<RationalMap> {
    f.reciprocal()
}

/// The family `1 / F_n`.
pub fn invert_family(spec: &FamilySpec) -> Result<FamilySpec> {
    if spec.num().iter().all(Expr::is_zero_literal) {
        return Err(Error::IdenticallyZero);
    }
    spec.with_exprs(spec.den().to_vec(), spec.num().to_vec())
}

fn sum(a: Option<&Expr>, b: Option<&Expr>) -> Expr {
    match (a, b) {
        (Some(a), Some(b)) if b.is_zero_literal() => a.clone(),
        (Some(a), Some(b)) if a.is_zero_literal() => b.clone(),
        (Some(a), Some(b)) => Expr::Add(Box::new(a.clone()), Box::new(b.clone())),
        (Some(a), None) => a.clone(),
        (None, Some(b)) => b.clone(),
        (None, None) => Expr::Num(0.0),
    }
}

/// The family `F_n(z) + z`, i.e. numerator `N + z·D`. The area bound is
/// dropped since the perturbation changes it.
pub fn perturb(spec: &FamilySpec) -> Result<FamilySpec> {
    if !spec.domain.is_bounded() {
        return Err(Error::UnboundedDomain);
    }
    let (num, den) = (spec.num(), spec.den());
    let len = num.len().max(den.len() + 1);
    let out: Vec<Expr> = (0..len).map(|k| sum(num.get(k), k.checked_sub(1).and_then(|j| den.get(j)))).collect();
    FamilySpec::from_exprs(out, den.to_vec(), spec.domain.clone(), spec.ladder().to_vec(), None)
}

/// Largest ratio `max(ρ_F/ρ_G, ρ_G/ρ_F)` between the spherical derivatives
/// of `F_n` and `F_n + z` over a `k × k` grid of the domain, taken where
/// either is at least [`LARGE_DERIVATIVE`]. Returns 1 when neither is large.
pub fn comparability(spec: &FamilySpec, n: u64, k: usize) -> Result<f64> {
    let [x0, x1, y0, y1] = spec.domain.bounding_box().ok_or(Error::UnboundedDomain)?;
    let f = instantiate(spec, n)?;
    let g = f.add_identity()?;
    let mut worst: f64 = 1.0;
    for j in 0..k {
        for i in 0..k {
            let z = C64::new(
                x0 + (x1 - x0) * (i as f64 + 0.5) / k as f64,
                y0 + (y1 - y0) * (j as f64 + 0.5) / k as f64,
            );
            if !spec.domain.contains(z) {
                continue;
            }
            let (a, b) = (f.spherical_derivative(z), g.spherical_derivative(z));
            if a.max(b) >= LARGE_DERIVATIVE {
                worst = worst.max(a.max(b) / a.min(b).max(f64::MIN_POSITIVE));
            }
        }
    }
    Ok(worst)
}

/// Undoes the perturbation on a tree built from `F_n + z`: every sphere map
/// loses the base point of its branch, and the limit loses `z`.
pub fn recover_bubbles(tree: &BubbleTree) -> Result<BubbleTree> {
    let mut out = tree.clone();
    for s in &mut out.spheres {
        s.map = s.map.sub_constant(s.base_point)?;
    }
    if let Some(f) = &tree.limit {
        out.limit = Some(RationalMap::new(f.num() - &f.den().shift(1), f.den().clone())?);
    }
    out.base_values = tree
        .base_values
        .iter()
        .map(|&(p, v)| (p, shift_value(v, -p)))
        .collect();
    check_nodes(&out)?;
    Ok(out)
}

/// Replaces every map of the tree by its reciprocal.
pub fn invert_tree(tree: &BubbleTree) -> Result<BubbleTree> {
    let mut out = tree.clone();
    for s in &mut out.spheres {
        s.map = invert(&s.map)?;
    }
    out.limit = match &tree.limit {
        Some(f) => Some(invert(f)?),
        None => None,
    };
    out.base_values = tree.base_values.iter().map(|&(p, v)| (p, v.recip())).collect();
    check_nodes(&out)?;
    Ok(out)
}

fn shift_value(v: SpherePoint, c: C64) -> SpherePoint {
    match v {
        SpherePoint::Finite(z) => SpherePoint::Finite(z + c),
        SpherePoint::Infinity => SpherePoint::Infinity,
    }
}

fn check_nodes(tree: &BubbleTree) -> Result<()> {
    for s in &tree.spheres {
        if let Parent::Sphere(j) = s.parent {
            let gap = chordal_distance(s.map.value_at_infinity(), tree.spheres[j].map.value(s.attach));
            if gap > TOL_NODE {
                return Err(Error::NodeContinuity { gap });
            }
        }
    }
    Ok(())
}
