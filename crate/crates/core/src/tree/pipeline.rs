use alloc::vec::Vec;
use core::f64::consts::PI;

use super::assemble::{verify_tree, BubbleTree, Parent, Sphere, TreeChecks};
use super::cluster::{cluster, Cluster, Clustering};
use super::components::{preimage_components, PreimageComponent};
use super::order::{descendant_order, DescendantOrder};
use super::probe::{choose_probe_ball, Obstacles, ProbeBall};
use super::rescale::{canonical_gauge, rescale_fit, sample_grid};
use crate::error::{Error, Result};
use crate::family::{detect_with, ConcentrationReport, DetectOptions, FamilySpec, Members};
use crate::runner::Runner;
use crate::sphere::{chordal_distance, AffineMap, RationalMap, SpherePoint, C64};
use crate::transforms::{invert, invert_family, invert_tree, perturb, recover_bubbles};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeOptions {
    pub detect: DetectOptions,
    /// Route constant limits through `F + z` and poles through `1/F`.
    pub route: bool,
    /// Halvings of the ball radius tried around each point.
    pub radius_steps: usize,
    /// Largest accepted relative change of an attachment point between the
    /// top two indices.
    pub attach_tol: f64,
}

impl Default for TreeOptions {
    fn default() -> Self {
        TreeOptions { detect: DetectOptions::default(), route: true, radius_steps: 6, attach_tol: 1e-3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Direct,
    /// Built from `F_n + z`, after `1/F_n` when `inverted`.
    Perturbed { inverted: bool },
}

/// Intermediate results for one point of the singular set.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub p: C64,
    pub radius: f64,
    pub ball: ProbeBall,
    pub inverted: bool,
    /// Components at the top two indices.
    pub levels: Vec<Vec<PreimageComponent>>,
    pub clustering: Clustering,
    pub order: DescendantOrder,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeRun {
    pub tree: BubbleTree,
    pub checks: TreeChecks,
    pub report: ConcentrationReport,
    pub branches: Vec<Branch>,
    pub route: Route,
}

/// Limit value at `p`: the fitted limit when there is one, otherwise the
/// mean of the top member over a small circle.
fn limit_value(limit: Option<&RationalMap>, top: &RationalMap, p: C64, r: f64) -> SpherePoint {
    if let Some(f) = limit {
        return f.value(p);
    }
    let mut v = [0.0; 3];
    for k in 0..64 {
        let u = top.value(p + C64::from_polar(r, 2.0 * PI * k as f64 / 64.0)).to_unit_vector();
        for i in 0..3 {
            v[i] += u[i];
        }
    }
    SpherePoint::from_unit_vector(v)
}

struct Fitted {
    map: RationalMap,
    gauge: AffineMap,
    mse: f64,
}

fn fit_cluster(
    f: &RationalMap,
    unperturb: Option<C64>,
    n: u64,
    c: usize,
    clusters: &[Cluster],
    order: &DescendantOrder,
    ball: &ProbeBall,
) -> Result<Fitted> {
    let rep = clusters[c].representative(n).ok_or_else(|| Error::Fit("cluster missing at index".into()))?;
    let raw = AffineMap::new(C64::new(rep.scale, 0.0), rep.center)?;
    let exclusions: Vec<(C64, f64)> = (0..clusters.len())
        .filter(|&d| order.precedes(d, c))
        .filter_map(|d| clusters[d].representative(n))
        .map(|d| ((d.center - rep.center) / rep.scale, (3.0 * d.scale / rep.scale).max(0.25)))
        .collect();
    // F_n + z converges on the bubble scale no faster than z → p; sampling
    // F_n + p instead has the same limit
    let shifted;
    let f = match unperturb {
        Some(p) => {
            shifted = RationalMap::new(f.num() - &f.den().shift(1), f.den().clone())?.sub_constant(-p)?;
            &shifted
        }
        None => f,
    };

    let fit = rescale_fit(f, raw, clusters[c].size(), &exclusions)?;
    let canon = canonical_gauge(&fit.map, ball)?;
    Ok(Fitted { map: fit.map.precompose_affine(&canon)?, gauge: raw.compose(&canon), mse: fit.mse })
}

/// Spheres hanging from `p`, parents listed before children; parents are
/// indices into the returned list.
fn analyze_point<R: Runner>(
    members: &Members,
    limit: Option<&RationalMap>,
    p: C64,
    degree: i64,
    r_start: f64,
    opts: &TreeOptions,
    unperturb: bool,
    runner: &R,
) -> Result<(Branch, Vec<Sphere>)> {
    let shift = unperturb.then_some(p);
    let m = members.len();
    if m < 2 {
        return Err(Error::InvalidArgument("bubble trees need at least two ladder indices".into()));
    }
    let ns = [members.ns[m - 2], members.ns[m - 1]];
    let fs = [members.map(m - 2), members.map(m - 1)];
    let mut last_err = Error::ProbeMargin { margin: 0.0, minimum: super::probe::DELTA_MIN };
    let mut found = None;
    for k in 0..opts.radius_steps {
        let r = r_start * libm::ldexp(1.0, -(k as i32));
        let obstacles = Obstacles::new(limit.unwrap_or(fs[1]), &fs, p, r)?;
        let ball = match choose_probe_ball(&obstacles) {
            Ok(b) => b,
            Err(e) => {
                last_err = e;
                continue;
            }
        };
        let levels: Vec<Result<Vec<PreimageComponent>>> =
            runner.map(2, &|i| preimage_components(fs[i], &ball, p, r, ns[i]));
        let levels: Vec<Vec<PreimageComponent>> = match levels.into_iter().collect() {
            Ok(l) => l,
            Err(e) => {
                last_err = e;
                continue;
            }
        };
        let counts_ok = levels.iter().all(|l| l.len() as i64 == degree);
        let one_to_one = levels.iter().flatten().all(|c| c.one_to_one);
        if counts_ok && one_to_one {
            found = Some((r, ball, levels));
            break;
        }
        let found_count = levels.iter().map(Vec::len).min().unwrap_or(0);
        last_err = Error::RootCount { expected: degree.max(0) as usize, found: found_count };
    }
    let Some((radius, ball, levels)) = found else { return Err(last_err) };
    let clustering = cluster(&levels, p)?;
    let order = descendant_order(&clustering)?;
    let cs = &clustering.clusters;

    let fits: Vec<Result<[Fitted; 2]>> = runner.map(cs.len(), &|c| {
        Ok([
            fit_cluster(fs[0], shift, ns[0], c, cs, &order, &ball)?,
            fit_cluster(fs[1], shift, ns[1], c, cs, &order, &ball)?,
        ])
    });
    let fits: Vec<[Fitted; 2]> = fits.into_iter().collect::<Result<_>>()?;

    // parents before children, larger scales first
    let mut ids: Vec<usize> = (0..cs.len()).collect();
    let depth = |mut c: usize| {
        let mut d = 0;
        while let Some(q) = order.parent[c] {
            d += 1;
            c = q;
        }
        d
    };
    ids.sort_by(|&a, &b| {
        depth(a).cmp(&depth(b)).then(
            cs[b].representatives[1].scale.total_cmp(&cs[a].representatives[1].scale),
        )
    });
    let position = |c: usize| ids.iter().position(|&x| x == c).expect("every cluster is listed");

    let mut spheres = Vec::with_capacity(cs.len());
    for &c in &ids {
        let [lo, hi] = &fits[c];
        let grid: Vec<C64> = sample_grid(2.0);
        let stability = lo.map.sup_chordal_distance(&hi.map, &grid);
        let (parent, attach, history) = match order.parent[c] {
            None => (Parent::Base, p, Vec::new()),
            Some(q) => {
                let est: Vec<(u64, C64)> = (0..2)
                    .map(|i| {
                        let z = cs[c].representatives[i].center;
                        (ns[i], fits[q][i].gauge.inverse().apply(z))
                    })
                    .collect();
                let (a0, a1) = (est[0].1, est[1].1);
                let spread = (a1 - a0).norm();
                if spread > opts.attach_tol * a1.norm().max(1.0) {
                    return Err(Error::Attachment { spread });
                }
                let extrapolated = a1 + (a1 - a0) * (ns[0] as f64 / (ns[1] - ns[0]) as f64);
                (Parent::Sphere(position(q)), extrapolated, est)
            }
        };
        let critical_points = hi.map.critical_points().map(|v| v.len()).unwrap_or(0);
        spheres.push(Sphere {
            id: spheres.len(),
            parent,
            base_point: p,
            attach,
            attach_history: history,
            degree: cs[c].size(),
            map: hi.map.clone(),
            mass: 4.0 * PI * cs[c].size() as f64,
            fit_mse: hi.mse,
            stability,
            critical_points,
        });
    }
    Ok((Branch { p, radius, ball, inverted: false, levels, clustering, order }, spheres))
}

fn append(tree: &mut BubbleTree, spheres: Vec<Sphere>) {
    let offset = tree.spheres.len();
    for mut s in spheres {
        s.id += offset;
        if let Parent::Sphere(j) = s.parent {
            s.parent = Parent::Sphere(j + offset);
        }
        tree.spheres.push(s);
    }
}

fn start_radius(report: &ConcentrationReport, p: C64) -> f64 {
    report
        .points
        .iter()
        .map(|q| (q.p - p).norm())
        .filter(|&d| d > 0.0)
        .fold(report.r0, |r, d| r.min(0.5 * d))
}

/// Builds the tree of spheres of a family.
pub fn build_tree<R: Runner>(spec: &FamilySpec, opts: &TreeOptions, runner: &R) -> Result<TreeRun> {
    let members = Members::build(spec, &opts.detect, runner)?;
    let report = detect_with(&members, &opts.detect, runner)?;
    build_tree_from(&members, report, opts, runner)
}

fn build_perturbed<R: Runner>(spec: &FamilySpec, opts: &TreeOptions, runner: &R) -> Result<TreeRun> {
    let members = Members::build(spec, &opts.detect, runner)?;
    let report = detect_with(&members, &opts.detect, runner)?;
    build(&members, report, opts, true, runner)
}

/// Builds the tree from precomputed members and their concentration report.
pub fn build_tree_from<R: Runner>(
    members: &Members,
    report: ConcentrationReport,
    opts: &TreeOptions,
    runner: &R,
) -> Result<TreeRun> {
    build(members, report, opts, false, runner)
}

fn build<R: Runner>(
    members: &Members,
    report: ConcentrationReport,
    opts: &TreeOptions,
    unperturb: bool,
    runner: &R,
) -> Result<TreeRun> {
    let spec = &members.spec;
    let quantizations: Vec<_> = report.points.iter().map(|q| q.quantization.clone()).collect();
    let limit = report.limit.map.clone().filter(|_| report.limit.fit_mse <= 1e-6);
    if report.points.is_empty() {
        let tree = BubbleTree::empty(spec.domain.clone(), limit);
        let checks = verify_tree(&tree, &quantizations, opts.detect.tol_quant);
        return Ok(TreeRun { tree, checks, report, branches: Vec::new(), route: Route::Direct });
    }

    if let (true, Some(c)) = (opts.route, report.limit.constant) {
        let inverted = c.finite().is_none_or(|v| v.norm() > 1.0);
        let base = if inverted { invert_family(spec)? } else { spec.clone() };
        let inner = build_perturbed(&perturb(&base)?, &TreeOptions { route: false, ..*opts }, runner)?;
        let mut tree = recover_bubbles(&inner.tree)?;
        if inverted {
            tree = invert_tree(&tree)?;
        }
        tree.limit = Some(RationalMap::constant(c));
        tree.base_values = report.points.iter().map(|q| (q.p, c)).collect();
        tree.total_drop = report.total_drop();
        let checks = verify_tree(&tree, &quantizations, opts.detect.tol_quant);
        let branches = inner.branches.into_iter().map(|b| Branch { inverted, ..b }).collect();
        return Ok(TreeRun { tree, checks, report, branches, route: Route::Perturbed { inverted } });
    }

    let mut tree = BubbleTree::empty(spec.domain.clone(), limit.clone());
    let mut inverse_members: Option<Members> = None;
    let mut branches = Vec::new();
    for point in &report.points {
        let p = point.p;
        let r = start_radius(&report, p);
        let value = limit_value(limit.as_ref(), members.top().map(), p, r);
        tree.base_values.push((p, value));
        let at_pole = opts.route && chordal_distance(value, SpherePoint::Infinity) < 0.1;
        if at_pole {
            if inverse_members.is_none() {
                inverse_members = Some(Members::build(&invert_family(spec)?, &opts.detect, runner)?);
            }
            let inv_limit = match &limit {
                Some(f) => Some(invert(f)?),
                None => None,
            };
            let inv = inverse_members.as_ref().expect("built above");
            let (branch, spheres) =
                analyze_point(inv, inv_limit.as_ref(), p, point.quantization.degree, r, opts, false, runner)?;
            let mut part = BubbleTree::empty(spec.domain.clone(), None);
            part.spheres = spheres;
            let part = invert_tree(&part)?;
            append(&mut tree, part.spheres);
            branches.push(Branch { inverted: true, ..branch });
        } else {
            let (branch, spheres) =
                analyze_point(members, limit.as_ref(), p, point.quantization.degree, r, opts, unperturb, runner)?;
            append(&mut tree, spheres);
            branches.push(branch);
        }
    }
    tree.total_drop = report.total_drop();
    let checks = verify_tree(&tree, &quantizations, opts.detect.tol_quant);
    Ok(TreeRun { tree, checks, report, branches, route: Route::Direct })
}
