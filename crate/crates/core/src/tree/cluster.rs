use alloc::vec::Vec;

use super::components::{polyline_distance, union_diameter, PreimageComponent};
use crate::error::{Error, Result};
use crate::sphere::C64;

/// Ratios inside `[1/K_CLU, K_CLU]` count as comparable.
pub const K_CLU: f64 = 10.0;
/// Log-log slopes below this in magnitude count as no drift.
pub const DRIFT_BAND: f64 = 0.1;

/// One preimage component followed across the ladder, lowest `n` first.
#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    pub components: Vec<PreimageComponent>,
}

impl Track {
    fn at(&self, n: u64) -> Option<&PreimageComponent> {
        self.components.iter().find(|c| c.n == n)
    }
}

/// Representative center and scale of a cluster at one `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Representative {
    pub n: u64,
    pub center: C64,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub tracks: Vec<Track>,
    pub representatives: Vec<Representative>,
}

impl Cluster {
    pub fn size(&self) -> usize {
        self.tracks.len()
    }

    pub fn components(&self, n: u64) -> impl Iterator<Item = &PreimageComponent> + '_ {
        self.tracks.iter().filter_map(move |t| t.at(n))
    }

    pub fn representative(&self, n: u64) -> Option<Representative> {
        self.representatives.iter().copied().find(|r| r.n == n)
    }

    /// Smallest distance between boundaries of the two clusters at `n`.
    pub fn distance(&self, other: &Cluster, n: u64) -> f64 {
        let mut d = f64::INFINITY;
        for a in self.components(n) {
            for b in other.components(n) {
                d = d.min(polyline_distance(&a.boundary, &b.boundary));
            }
        }
        d
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub ns: [u64; 2],
    pub clusters: Vec<Cluster>,
    /// Track pairs whose drift and bounds disagree.
    pub ambiguous: Vec<(usize, usize)>,
}

fn features(c: &PreimageComponent, p: C64) -> [f64; 3] {
    let v = c.center - p;
    [libm::log(v.norm() + c.diameter), v.arg(), libm::log(c.diameter)]
}

fn feature_distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    let mut da = (a[1] - b[1]).abs() % (2.0 * core::f64::consts::PI);
    da = da.min(2.0 * core::f64::consts::PI - da);
    (a[0] - b[0]) * (a[0] - b[0]) + da * da + (a[2] - b[2]) * (a[2] - b[2])
}

/// Greedy nearest-neighbor matching; `out[i]` is the partner in `prev` of
/// `next[i]`.
fn match_levels(prev: &[PreimageComponent], next: &[PreimageComponent], p: C64) -> Vec<Option<usize>> {
    let mut pairs = Vec::new();
    for (i, a) in next.iter().enumerate() {
        for (j, b) in prev.iter().enumerate() {
            pairs.push((feature_distance(features(a, p), features(b, p)), i, j));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut out = alloc::vec![None; next.len()];
    let mut used = alloc::vec![false; prev.len()];
    for (_, i, j) in pairs {
        if out[i].is_none() && !used[j] {
            out[i] = Some(j);
            used[j] = true;
        }
    }
    out
}

/// Tracks ending at the last level, followed back while matches exist.
pub fn build_tracks(levels: &[Vec<PreimageComponent>], p: C64) -> Vec<Track> {
    let Some(last) = levels.last() else { return Vec::new() };
    let mut tracks: Vec<Vec<PreimageComponent>> = last.iter().map(|c| alloc::vec![c.clone()]).collect();
    let mut heads: Vec<Option<usize>> = (0..last.len()).map(Some).collect();
    for k in (1..levels.len()).rev() {
        let m = match_levels(&levels[k - 1], &levels[k], p);
        for (t, head) in tracks.iter_mut().zip(heads.iter_mut()) {
            *head = head.and_then(|h| m[h]);
            if let Some(h) = *head {
                t.push(levels[k - 1][h].clone());
            }
        }
    }
    tracks
        .into_iter()
        .map(|mut c| {
            c.reverse();
            Track { components: c }
        })
        .collect()
}

pub(crate) fn slope(a: f64, b: f64, n0: u64, n1: u64) -> f64 {
    (libm::log(b) - libm::log(a)) / (libm::log(n1 as f64) - libm::log(n0 as f64))
}

fn in_band(x: f64) -> bool {
    x >= 1.0 / K_CLU && x <= K_CLU
}

fn representative(members: &[&PreimageComponent], n: u64) -> Representative {
    let center = members.iter().map(|c| c.center).sum::<C64>() / members.len() as f64;
    Representative { n, center, scale: union_diameter(members.iter().copied()) }
}

/// Groups tracks whose mutual distance and sizes stay comparable over the
/// top two levels.
pub fn cluster(levels: &[Vec<PreimageComponent>], p: C64) -> Result<Clustering> {
    if levels.len() < 2 {
        return Err(Error::InvalidArgument("clustering needs two ladder levels".into()));
    }
    let (l0, l1) = (&levels[levels.len() - 2], &levels[levels.len() - 1]);
    if l0.len() != l1.len() {
        return Err(Error::RootCount { expected: l1.len(), found: l0.len() });
    }
    let (Some(n0), Some(n1)) = (l0.first().map(|c| c.n), l1.first().map(|c| c.n)) else {
        return Ok(Clustering { ns: [0, 0], clusters: Vec::new(), ambiguous: Vec::new() });
    };
    let tracks = build_tracks(levels, p);
    if tracks.iter().any(|t| t.at(n0).is_none()) {
        return Err(Error::RootCount { expected: l1.len(), found: tracks.iter().filter(|t| t.at(n0).is_some()).count() });
    }
    let m = tracks.len();
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let mut ambiguous = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            let ratios = |n: u64| {
                let (a, b) = (tracks[i].at(n).unwrap(), tracks[j].at(n).unwrap());
                let (a, b) = if a.diameter <= b.diameter { (a, b) } else { (b, a) };
                (polyline_distance(&a.boundary, &b.boundary) / b.diameter, a.diameter / b.diameter)
            };
            let (d0, s0) = ratios(n0);
            let (d1, s1) = ratios(n1);
            let bounded = in_band(d0) && in_band(d1) && in_band(s0) && in_band(s1);
            let flat = slope(d0, d1, n0, n1).abs() < DRIFT_BAND && slope(s0, s1, n0, n1).abs() < DRIFT_BAND;
            if bounded && flat {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            } else if bounded != flat {
                ambiguous.push((i, j));
            }
        }
    }
    let mut groups: Vec<(usize, Vec<Track>)> = Vec::new();
    for (i, t) in tracks.into_iter().enumerate() {
        let root = find(&mut parent, i);
        match groups.iter_mut().find(|g| g.0 == root) {
            Some(g) => g.1.push(t),
            None => groups.push((root, alloc::vec![t])),
        }
    }
    let clusters = groups
        .into_iter()
        .map(|(_, tracks)| {
            let representatives = [n0, n1]
                .iter()
                .map(|&n| {
                    let members: Vec<&PreimageComponent> = tracks.iter().filter_map(|t| t.at(n)).collect();
                    representative(&members, n)
                })
                .collect();
            Cluster { tracks, representatives }
        })
        .collect();
    Ok(Clustering { ns: [n0, n1], clusters, ambiguous })
}
