use alloc::format;
use alloc::vec::Vec;

use super::cluster::{slope, Clustering, DRIFT_BAND};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescendantOrder {
    /// Pairs `(i, j)` with cluster `i` a descendant of cluster `j`.
    pub less: Vec<(usize, usize)>,
    /// Direct parent of each cluster; `None` attaches to the base.
    pub parent: Vec<Option<usize>>,
}

impl DescendantOrder {
    pub fn precedes(&self, i: usize, j: usize) -> bool {
        self.less.contains(&(i, j))
    }

    pub fn roots(&self) -> impl Iterator<Item = usize> + '_ {
        self.parent.iter().enumerate().filter(|(_, p)| p.is_none()).map(|(i, _)| i)
    }
}

/// Decides `i ≺ j` when the scale ratio of `i` to `j` shrinks and their
/// distance stays within a bounded multiple of the scale of `j`.
pub fn descendant_order(clustering: &Clustering) -> Result<DescendantOrder> {
    let [n0, n1] = clustering.ns;
    let cs = &clustering.clusters;
    let m = cs.len();
    let mut less = Vec::new();
    for i in 0..m {
        for j in 0..m {
            if i == j {
                continue;
            }
            let (Some(a0), Some(a1), Some(b0), Some(b1)) =
                (cs[i].representative(n0), cs[i].representative(n1), cs[j].representative(n0), cs[j].representative(n1))
            else {
                continue;
            };
            let (s0, s1) = (a0.scale / b0.scale, a1.scale / b1.scale);
            let d0 = cs[i].distance(&cs[j], n0) / b0.scale;
            let d1 = cs[i].distance(&cs[j], n1) / b1.scale;
            let shrinking = s1 < 1.0 && slope(s0, s1, n0, n1) <= -DRIFT_BAND;
            let bounded = slope(d0.max(1e-300), d1.max(1e-300), n0, n1) < DRIFT_BAND;
            if shrinking && bounded {
                less.push((i, j));
            }
        }
    }
    for &(i, j) in &less {
        if less.contains(&(j, i)) {
            return Err(Error::Order(format!("clusters {i} and {j} precede each other")));
        }
        for &(k, l) in &less {
            if k == j && !less.contains(&(i, l)) {
                return Err(Error::Order(format!("{i} ≺ {j} ≺ {l} without {i} ≺ {l}")));
            }
        }
    }
    let parent = (0..m)
        .map(|i| {
            let above: Vec<usize> = less.iter().filter(|e| e.0 == i).map(|e| e.1).collect();
            above.iter().copied().find(|&j| !above.iter().any(|&k| k != j && less.contains(&(k, j))))
        })
        .collect();
    Ok(DescendantOrder { less, parent })
}
