use std::f64::consts::PI;

use bubblelab_core::family::{DetectOptions, FamilySpec, Members};
use bubblelab_core::quadrature::Region;
use bubblelab_core::runner::Sequential;
use bubblelab_core::sphere::{chordal_distance, AffineMap, RationalMap, SpherePoint, C64};
use bubblelab_core::tree::*;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn family(num: &[&str], den: &[&str]) -> FamilySpec {
    FamilySpec::parse(num, den, Region::unit_disk(), vec![100, 1000, 10000], None).unwrap()
}

/// `z + 1/(n z)`.
fn simple(n: f64) -> RationalMap {
    RationalMap::from_real(&[1.0, 0.0, n], &[0.0, n]).unwrap()
}

/// `1/(n z (z − n^(−1/2)))`.
fn merging(n: f64) -> RationalMap {
    RationalMap::from_real(&[1.0], &[0.0, -n.sqrt(), n]).unwrap()
}

fn ball(w: C64, rho: f64) -> ProbeBall {
    ProbeBall { w, rho, margin: 1.0 }
}

/// Both roots of `z² + b z + c = 0`, the smaller one computed stably.
fn quadratic(b: C64, c: C64) -> [C64; 2] {
    let disc = (b * b - 4.0 * c).sqrt();
    let q = if (-b + disc).norm() >= (-b - disc).norm() { (-b + disc) / 2.0 } else { (-b - disc) / 2.0 };
    [q, c / q]
}

#[test]
fn identity_has_nothing_inside() {
    let comps = preimage_components(&RationalMap::identity(), &ball(c(3.0, 0.0), 0.5), c(0.0, 0.0), 0.1, 1).unwrap();
    assert!(comps.is_empty());
}

#[test]
fn small_root_matches_quadratic_formula() {
    let n = 1000.0;
    let comps = preimage_components(&simple(n), &ball(c(3.0, 0.0), 0.5), c(0.0, 0.0), 0.1, 1000).unwrap();
    assert_eq!(comps.len(), 1);
    // z + 1/(nz) = 3  ⇔  z² − 3z + 1/n = 0
    let [_, small] = quadratic(c(-3.0, 0.0), c(1.0 / n, 0.0));
    assert!((comps[0].center - small).norm() < 1e-12 * small.norm(), "{} vs {small}", comps[0].center);
    // near 0 the map is 1/(nz), which sends the component onto a disk
    // with real diameter from 1/3.5 to 1/2.5
    let want = (1.0 / 2.5 - 1.0 / 3.5) / n;
    assert!((comps[0].diameter - want).abs() < 0.01 * want, "{}", comps[0].diameter);
    assert!(comps[0].one_to_one);
}

#[test]
fn merging_poles_give_two_components() {
    let n = 10000.0;
    let comps = preimage_components(&merging(n), &ball(c(2.0, 0.0), 0.5), c(0.0, 0.0), 0.1, 10000).unwrap();
    assert_eq!(comps.len(), 2);
    // 1/(n z (z − a)) = 2  ⇔  z² − a z − 1/(2n) = 0
    let roots = quadratic(c(-1.0 / n.sqrt(), 0.0), c(-0.5 / n, 0.0));
    for r in roots {
        let hit = comps.iter().map(|k| (k.center - r).norm()).fold(f64::INFINITY, f64::min);
        assert!(hit < 1e-12, "{r}");
    }
    let scale = 1.0 / n.sqrt();
    for k in &comps {
        assert!(k.one_to_one);
        assert!(k.diameter > 0.1 * scale && k.diameter < 10.0 * scale, "{}", k.diameter);
    }
}

fn disk(n: u64, center: C64, radius: f64) -> PreimageComponent {
    let boundary: Vec<C64> = (0..BOUNDARY_POINTS)
        .map(|k| center + C64::from_polar(radius, 2.0 * PI * k as f64 / BOUNDARY_POINTS as f64))
        .collect();
    PreimageComponent { n, center, diameter: 2.0 * radius, inner: 0.5, outer: 0.5, boundary, one_to_one: true }
}

fn levels(layout: &dyn Fn(f64) -> Vec<(C64, f64)>) -> Vec<Vec<PreimageComponent>> {
    [1000u64, 10000]
        .iter()
        .map(|&n| layout(n as f64).into_iter().map(|(z, r)| disk(n, z, r)).collect())
        .collect()
}

#[test]
fn single_track_is_one_cluster() {
    let l = levels(&|n| vec![(c(0.3 / n, 0.0), 1.0 / n)]);
    let cl = cluster(&l, c(0.0, 0.0)).unwrap();
    assert_eq!(cl.clusters.len(), 1);
    assert_eq!(cl.clusters[0].size(), 1);
    let order = descendant_order(&cl).unwrap();
    assert_eq!(order.parent, vec![None]);
}

#[test]
fn comparable_pair_is_one_cluster() {
    // gap 1/n between disks of radius 1/n: both ratios stay at 1/2 and 1
    let l = levels(&|n| vec![(c(-1.5 / n, 0.0), 1.0 / n), (c(1.5 / n, 0.0), 1.0 / n)]);
    let cl = cluster(&l, c(0.0, 0.0)).unwrap();
    assert_eq!(cl.clusters.len(), 1);
    assert_eq!(cl.clusters[0].size(), 2);
    assert!(cl.ambiguous.is_empty());
    let rep = cl.clusters[0].representative(10000).unwrap();
    assert!(rep.center.norm() < 1e-15);
    assert!((rep.scale - 5e-4).abs() < 1e-9);
}

#[test]
fn nested_scales_are_ordered() {
    let l = levels(&|n| vec![(c(0.0, 0.0), 1.0 / n), (c(0.5 / n, 0.0), 1.0 / (n * n * n))]);
    let cl = cluster(&l, c(0.0, 0.0)).unwrap();
    assert_eq!(cl.clusters.len(), 2);
    let order = descendant_order(&cl).unwrap();
    let deep = (0..2).find(|&i| cl.clusters[i].representative(10000).unwrap().scale < 1e-6).unwrap();
    let shallow = 1 - deep;
    assert!(order.precedes(deep, shallow));
    assert!(!order.precedes(shallow, deep));
    assert_eq!(order.parent[deep], Some(shallow));
    assert_eq!(order.parent[shallow], None);
}

#[test]
fn distant_clusters_are_incomparable() {
    for small in [1.0, 1e-4] {
        let l = levels(&|n| vec![(c(0.0, 0.0), 1.0 / n), (c(0.05, 0.0), small / (n * n))]);
        let cl = cluster(&l, c(0.0, 0.0)).unwrap();
        assert_eq!(cl.clusters.len(), 2);
        let order = descendant_order(&cl).unwrap();
        assert!(order.less.is_empty(), "{:?}", order.less);
        assert_eq!(order.roots().count(), 2);
    }
}

#[test]
fn probe_ball_avoids_image_of_ball() {
    let f = simple(1e9);
    let obstacles = Obstacles::new(&RationalMap::identity(), &[&f], c(0.0, 0.0), 0.1).unwrap();
    let b = choose_probe_ball(&obstacles).unwrap();
    assert!(b.margin >= DELTA_MIN);
    assert!(b.w.norm() <= W_MAX + 1e-12);
    // B(w, 2ρ) stays off the closed disk of radius 0.1 around 0
    assert!(b.w.norm() - 2.0 * b.rho > 0.1);
}

/// `1/ℛ` is affine exactly when `ℛ` is affine-equivalent to `1/ζ`.
fn reciprocal_is_affine(r: &RationalMap, tol: f64) -> bool {
    let g = |z: C64| 1.0 / r.value(z).finite().unwrap();
    let (g0, g1) = (g(c(0.0, 0.0)), g(c(1.0, 0.0)));
    [c(0.5, 0.5), c(-1.0, 0.3), c(0.2, -1.5), c(2.0, 2.0)]
        .iter()
        .all(|&z| (g(z) - (g0 + (g1 - g0) * z)).norm() <= tol * (1.0 + g(z).norm()))
}

#[test]
fn simple_bubble_tree() {
    let run = build_tree(&family(&["1", "0", "n"], &["0", "n"]), &TreeOptions::default(), &Sequential).unwrap();
    assert_eq!(run.route, Route::Direct);
    assert!(run.checks.all(), "{:?}", run.checks);
    assert_eq!(run.tree.total_drop, 1);
    let [s] = &run.tree.spheres[..] else { panic!("{:?}", run.tree.spheres) };
    assert_eq!(s.parent, Parent::Base);
    assert_eq!(s.degree, 1);
    assert!(s.attach.norm() < 1e-3);
    assert!(reciprocal_is_affine(&s.map, 1e-3));
    // ℛ(∞) = F(0) = 0
    assert!(chordal_distance(s.map.value_at_infinity(), SpherePoint::new(0.0, 0.0)) < TOL_NODE);
}

#[test]
fn merging_poles_form_one_degree_two_bubble() {
    let run = build_tree(&family(&["1"], &["0", "-n*n^(-1/2)", "n"]), &TreeOptions::default(), &Sequential).unwrap();
    assert!(run.checks.all(), "{:?}", run.checks);
    assert_eq!(run.tree.total_drop, 2);
    let [s] = &run.tree.spheres[..] else { panic!("{:?}", run.tree.spheres) };
    assert_eq!(s.degree, 2);
    assert!(s.fit_mse < TOL_FIT);
    // at scale n^(−1/2) the family is exactly 1/(ζ(ζ − 1)); every affine
    // representative K/((η − a)(η − b)) keeps |K| = |a − b|²
    let num = s.map.num().coeffs();
    assert!(num[1..].iter().all(|x| x.norm() < 1e-8 * num[0].norm()), "{num:?}");
    let poles = s.map.den().roots().unwrap();
    let k = num[0] / s.map.den().leading();
    let sep = (poles[0] - poles[1]).norm();
    assert!((k.norm() / (sep * sep) - 1.0).abs() < 1e-3, "{k} {sep}");
}

#[test]
fn nested_family_is_a_chain() {
    let spec = family(&["-n/2", "n^2+1", "-n^2/2", "n^3"], &["0", "-n^2/2", "n^3"]);
    let run = build_tree(&spec, &TreeOptions::default(), &Sequential).unwrap();
    assert!(run.checks.all(), "{:?}", run.checks);
    assert_eq!(run.tree.total_drop, 2);
    assert_eq!(run.tree.spheres.len(), 2);
    let (top, child) = (&run.tree.spheres[0], &run.tree.spheres[1]);
    assert_eq!(top.parent, Parent::Base);
    assert_eq!(child.parent, Parent::Sphere(0));
    assert_eq!(run.tree.depth(1), 2);
    assert_eq!((top.degree, child.degree), (1, 1));
    let [(_, a0), (_, a1)] = child.attach_history[..] else { panic!() };
    assert!((a1 - a0).norm() < 1e-3 * a1.norm(), "{a0} {a1}");
    // the parent takes the value of the deep bubble at infinity where it
    // is attached
    let gap = chordal_distance(child.map.value_at_infinity(), top.map.value(child.attach));
    assert!(gap < TOL_NODE);
}

#[test]
fn separate_points_give_a_forest() {
    // poles of size 1/n at 0 and 1/2
    let spec = family(&["1", "-n/2 - 1/2", "n", "-n/2", "n"], &["0", "-n/2", "n"]);
    let run = build_tree(&spec, &TreeOptions::default(), &Sequential).unwrap();
    assert!(run.checks.all(), "{:?}", run.checks);
    assert_eq!(run.tree.spheres.len(), 2);
    let mut at: Vec<f64> = run.tree.spheres.iter().map(|s| s.attach.re).collect();
    at.sort_by(f64::total_cmp);
    assert!(at[0].abs() < 1e-3 && (at[1] - 0.5).abs() < 1e-3, "{at:?}");
    assert!(run.tree.spheres.iter().all(|s| s.parent == Parent::Base && s.degree == 1));
}

#[test]
fn identity_family_has_empty_tree() {
    let run = build_tree(&family(&["0", "1"], &["1"]), &TreeOptions::default(), &Sequential).unwrap();
    assert!(run.tree.spheres.is_empty());
    assert_eq!(run.tree.total_drop, 0);
    assert!(run.checks.all());
}

#[test]
fn verify_tree_reports_broken_nodes() {
    let spec = family(&["1", "0", "n"], &["0", "n"]);
    let members = Members::build(&spec, &DetectOptions::default(), &Sequential).unwrap();
    let report = bubblelab_core::family::detect_with(&members, &DetectOptions::default(), &Sequential).unwrap();
    let q: Vec<_> = report.points.iter().map(|p| p.quantization.clone()).collect();
    let run = build_tree_from(&members, report, &TreeOptions::default(), &Sequential).unwrap();
    let mut tree = run.tree.clone();
    tree.spheres[0].map = tree.spheres[0].map.sub_constant(c(-0.5, 0.0)).unwrap();
    let checks = verify_tree(&tree, &q, 1e-2);
    assert!(!checks.node_continuity && checks.degree_sum && checks.mass);
    tree.spheres.clear();
    let checks = verify_tree(&tree, &q, 1e-2);
    assert!(!checks.degree_sum && !checks.mass);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn root_count_equals_degree(n in 100.0f64..1e4, t in 0.0f64..(2.0 * PI), s in 0.5f64..2.5) {
        let f = merging(n);
        let w = C64::from_polar(s, t);
        let roots = f.preimages(SpherePoint::Finite(w)).unwrap();
        prop_assert_eq!(roots.len(), 2);
        for z in roots {
            prop_assert!(chordal_distance(f.value(z), SpherePoint::Finite(w)) < 1e-9);
        }
    }

    #[test]
    fn one_root_per_component(n in 100.0f64..1e4, t in 0.0f64..(2.0 * PI)) {
        let b = ball(C64::from_polar(2.5, t), 0.5);
        let f = simple(n);
        let comps = preimage_components(&f, &b, c(0.0, 0.0), 0.1, 7).unwrap();
        prop_assert_eq!(comps.len(), 1);
        prop_assert!(comps[0].one_to_one);
        // an independent probe value inside the ball
        let w = b.w + C64::from_polar(0.3, t + 1.0);
        let inside = f.preimages(SpherePoint::Finite(w)).unwrap().into_iter().filter(|z| comps[0].contains(*z)).count();
        prop_assert_eq!(inside, 1);
    }

    #[test]
    fn affine_gauge_commutes_with_fit(s_re in -1.0f64..1.0, s_im in -1.0f64..1.0, t in 0.5f64..2.0) {
        let n = 1e5;
        let f = simple(n);
        let center = c(1.0 / (3.0 * n), 0.0);
        let r = 1.0 / n;
        let base = rescale_fit(&f, AffineMap::new(c(r, 0.0), center).unwrap(), 1, &[]).unwrap();
        let s = c(s_re, s_im);
        let moved = rescale_fit(&f, AffineMap::new(c(t * r, 0.0), center + s * r).unwrap(), 1, &[]).unwrap();
        prop_assert!(moved.mse <= TOL_FIT);
        let pre = base.map.precompose_affine(&AffineMap::new(c(t, 0.0), s).unwrap()).unwrap();
        let grid = sample_grid(1.0);
        prop_assert!(pre.sup_chordal_distance(&moved.map, &grid) < 1e-3);
    }
}
