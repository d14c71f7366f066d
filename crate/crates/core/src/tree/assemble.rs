use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::family::Quantization;
use crate::quadrature::Region;
use crate::sphere::{chordal_distance, RationalMap, SpherePoint, C64};

/// Largest accepted chordal gap at a node.
pub const TOL_NODE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parent {
    Base,
    Sphere(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sphere {
    pub id: usize,
    pub parent: Parent,
    /// Point of the domain this branch hangs from.
    pub base_point: C64,
    /// Attachment point on the parent: `base_point` for roots, otherwise a
    /// point of the parent's canonical coordinate.
    pub attach: C64,
    /// `(n, estimate)` of the attachment along the top of the ladder.
    pub attach_history: Vec<(u64, C64)>,
    pub degree: usize,
    pub map: RationalMap,
    pub mass: f64,
    pub fit_mse: f64,
    /// Sup chordal distance between canonical fits at the top two `n`.
    pub stability: f64,
    pub critical_points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BubbleTree {
    pub domain: Region,
    pub limit: Option<RationalMap>,
    /// Value of the limit at each point of the singular set.
    pub base_values: Vec<(C64, SpherePoint)>,
    pub spheres: Vec<Sphere>,
    pub total_drop: i64,
}

impl BubbleTree {
    pub fn empty(domain: Region, limit: Option<RationalMap>) -> Self {
        BubbleTree { domain, limit, base_values: Vec::new(), spheres: Vec::new(), total_drop: 0 }
    }

    pub fn base_value(&self, p: C64) -> Option<SpherePoint> {
        self.base_values
            .iter()
            .min_by(|a, b| (a.0 - p).norm().total_cmp(&(b.0 - p).norm()))
            .map(|v| v.1)
            .or_else(|| self.limit.as_ref().map(|f| f.value(p)))
    }

    /// Value of the parent at the attachment of sphere `k`.
    pub fn parent_value(&self, k: usize) -> Option<SpherePoint> {
        let s = &self.spheres[k];
        match s.parent {
            Parent::Base => self.base_value(s.base_point),
            Parent::Sphere(j) => Some(self.spheres[j].map.value(s.attach)),
        }
    }

    /// Chordal gap `ℛ_k(∞)` vs the parent value, per sphere.
    pub fn node_gaps(&self) -> Vec<f64> {
        (0..self.spheres.len())
            .map(|k| match self.parent_value(k) {
                Some(v) => chordal_distance(self.spheres[k].map.value_at_infinity(), v),
                None => 2.0,
            })
            .collect()
    }

    pub fn degree_sum(&self) -> usize {
        self.spheres.iter().map(|s| s.degree).sum()
    }

    /// Number of spheres on the path from `k` to the base.
    pub fn depth(&self, k: usize) -> usize {
        let mut d = 1;
        let mut p = self.spheres[k].parent;
        while let Parent::Sphere(j) = p {
            d += 1;
            p = self.spheres[j].parent;
        }
        d
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeChecks {
    pub degree_sum: bool,
    pub node_continuity: bool,
    pub mass: bool,
    pub expected_drop: i64,
    pub node_gaps: Vec<f64>,
    /// `|4π Σ D_k − Σ μ({p})|`.
    pub mass_residual: f64,
}

impl TreeChecks {
    pub fn all(&self) -> bool {
        self.degree_sum && self.node_continuity && self.mass
    }
}

/// Degree accounting, node continuity and mass bookkeeping against the
/// quantization of each point of the singular set.
pub fn verify_tree(tree: &BubbleTree, quantizations: &[Quantization], tol_quant: f64) -> TreeChecks {
    let expected: i64 = quantizations.iter().map(|q| q.degree).sum();
    let gaps = tree.node_gaps();
    let measured: f64 = quantizations.iter().map(|q| q.estimate).sum();
    let residual = (4.0 * PI * tree.degree_sum() as f64 - measured).abs();
    TreeChecks {
        degree_sum: tree.degree_sum() as i64 == expected,
        node_continuity: gaps.iter().all(|&g| g <= TOL_NODE),
        mass: residual <= tol_quant * quantizations.len().max(1) as f64,
        expected_drop: expected,
        node_gaps: gaps,
        mass_residual: residual,
    }
}
