use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use super::atlas::MassAtlas;
use super::spec::{instantiate, FamilySpec};
use crate::error::{Error, Result};
use crate::fit::fit_rational;
use crate::quadrature::{AreaIntegrator, QuadOptions, Region};
use crate::runner::{Runner, Sequential};
use crate::sphere::{chordal_distance, RationalMap, SpherePoint, C64};

const FOUR_PI: f64 = 4.0 * PI;
/// Limit fits at least this good are subtracted from member masses.
const LIMIT_FIT_MSE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectOptions {
    /// Cells per axis of the coarse atlas.
    pub grid: usize,
    pub tol_mass: f64,
    /// Largest accepted `|estimate − 4πD|`.
    pub tol_quant: f64,
    /// Annulus mass below which the diagonal schedule stops shrinking.
    pub eps_ann: f64,
    /// Largest radius of the persistence ladder; `None` uses an eighth of
    /// the domain diameter.
    pub r0: Option<f64>,
    /// Number of radii `r0 · 2^-k` in the persistence ladder.
    pub ladder_steps: usize,
    /// Radii `r0 · 2^-k` tried by the diagonal schedule.
    pub max_halvings: usize,
    pub cauchy_tol: f64,
    /// Limit samples per axis.
    pub samples: usize,
    pub area_tol: f64,
}

impl Default for DetectOptions {
    fn default() -> Self {
        DetectOptions {
            grid: 16,
            tol_mass: 0.05,
            tol_quant: 0.05 * FOUR_PI,
            eps_ann: 0.01,
            r0: None,
            ladder_steps: 5,
            max_halvings: 40,
            cauchy_tol: 1e-3,
            samples: 9,
            area_tol: 1e-6,
        }
    }
}

/// The instantiated members of a family along its ladder.
#[derive(Debug, Clone)]
pub struct Members {
    pub spec: FamilySpec,
    pub ns: Vec<u64>,
    pub maps: Vec<AreaIntegrator>,
}

impl Members {
    pub fn build<R: Runner>(spec: &FamilySpec, opts: &DetectOptions, runner: &R) -> Result<Self> {
        let ns = spec.ladder().to_vec();
        let q = QuadOptions::with_rel_tol(opts.area_tol);
        let maps = runner.map(ns.len(), &|i| instantiate(spec, ns[i]).map(|f| AreaIntegrator::new(f, q)));
        Ok(Members { spec: spec.clone(), ns, maps: maps.into_iter().collect::<Result<_>>()? })
    }

    pub fn map(&self, i: usize) -> &RationalMap {
        self.maps[i].map()
    }

    pub fn top(&self) -> &AreaIntegrator {
        self.maps.last().expect("ladder is nonempty")
    }

    pub fn len(&self) -> usize {
        self.ns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ns.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassEstimate {
    pub n: u64,
    pub radius: f64,
    pub mass: f64,
    /// Whether the annulus criterion was met at this `n`.
    pub stabilized: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Quantization {
    pub p: C64,
    pub degree: i64,
    pub estimate: f64,
    pub residual: f64,
    /// Per-index diagonal estimates.
    pub per_n: Vec<MassEstimate>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationPoint {
    pub p: C64,
    /// `(radius, mass at the top index)` over the persistence ladder.
    pub ladder: Vec<(f64, f64)>,
    pub quantization: Quantization,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitSample {
    pub z: C64,
    /// Extrapolated limit value.
    pub value: SpherePoint,
    /// Values along the ladder.
    pub history: Vec<SpherePoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitReport {
    pub samples: Vec<LimitSample>,
    /// Estimated chordal distance between the top member and the limit.
    pub cauchy_bound: f64,
    pub certified: bool,
    /// Largest chordal distance of a limit sample from their barycenter.
    pub oscillation: f64,
    pub constant: Option<SpherePoint>,
    pub degree: usize,
    pub map: Option<RationalMap>,
    pub fit_mse: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationReport {
    pub bound: f64,
    pub bound_declared: bool,
    pub cardinality_bound: usize,
    /// `ℰ(F_n, Ω)` along the ladder.
    pub areas: Vec<(u64, f64)>,
    pub points: Vec<ConcentrationPoint>,
    pub limit: LimitReport,
    pub r0: f64,
}

impl ConcentrationReport {
    pub fn total_drop(&self) -> i64 {
        self.points.iter().map(|p| p.quantization.degree).sum()
    }

    pub fn require_quasinormal(&self) -> Result<()> {
        if self.limit.certified {
            Ok(())
        } else {
            Err(Error::NotQuasinormal(format!("Cauchy bound {:.3e} above tolerance", self.limit.cauchy_bound)))
        }
    }
}

fn default_r0(domain: &Region, opts: &DetectOptions) -> f64 {
    opts.r0.unwrap_or_else(|| match domain.bounding_box() {
        Some([x0, x1, y0, y1]) => 0.125 * (x1 - x0).max(y1 - y0),
        None => 0.25,
    })
}

fn disk_mass(integ: &AreaIntegrator, p: C64, r: f64) -> Result<f64> {
    Ok(integ.area(&Region::disk(p, r)?)?.value)
}

/// Zooms into a window until the mass splits.
fn zoom(integ: &AreaIntegrator, domain: &Region, mut rect: [f64; 4], threshold: f64) -> Result<C64> {
    let mut mass = integ.area_clipped(domain, rect)?.value;
    for _ in 0..60 {
        let local = MassAtlas { n: 0, bbox: rect, nx: 4, ny: 4, masses: Vec::new() };
        let mut masses = Vec::with_capacity(16);
        for j in 0..4 {
            for i in 0..4 {
                masses.push(integ.area_clipped(domain, local.cell_rect(i, j))?.value);
            }
        }
        let local = MassAtlas { masses, ..local };
        let best = local.peak_windows(0.0);
        let centroid = || {
            let tot = local.total();
            if tot <= 0.0 {
                return C64::new(0.5 * (rect[0] + rect[1]), 0.5 * (rect[2] + rect[3]));
            }
            let mut c = C64::new(0.0, 0.0);
            for j in 0..4 {
                for i in 0..4 {
                    c += local.cell_center(i, j) * local.mass(i, j);
                }
            }
            c / tot
        };
        let Some(&(i, j, m)) = best.first() else {
            return Ok(centroid());
        };
        let size = (rect[1] - rect[0]).max(rect[3] - rect[2]);
        let mid = C64::new(0.5 * (rect[0] + rect[1]), 0.5 * (rect[2] + rect[3]));
        if m < threshold || m < (1.0 - 0.05) * mass || size < 1e-12 * (1.0 + mid.norm()) {
            return Ok(centroid());
        }
        rect = local.window_rect(i, j);
        mass = m;
    }
    Ok(C64::new(0.5 * (rect[0] + rect[1]), 0.5 * (rect[2] + rect[3])))
}

fn diagonal(
    integ: &AreaIntegrator,
    n: u64,
    p: C64,
    r0: f64,
    opts: &DetectOptions,
    limit: Option<&AreaIntegrator>,
) -> Result<MassEstimate> {
    let mut radii: Vec<f64> = (0..=opts.max_halvings + 1).map(|k| libm::ldexp(r0, -(k as i32))).collect();
    radii.reverse();
    let mut m = integ.nested_disks(p, &radii)?;
    if let Some(f) = limit {
        // excess over the limit measure
        for (a, b) in m.iter_mut().zip(f.nested_disks(p, &radii)?) {
            *a -= b;
        }
    }
    m.reverse();
    radii.reverse();
    // radii[k] = r0 2^-k, m[k] its mass
    let mut fallback: Option<(f64, usize)> = None;
    for k in 0..=opts.max_halvings {
        let ann = m[k] - m[k + 1];
        if m[k + 1] < 0.5 * FOUR_PI {
            break;
        }
        if ann < opts.eps_ann {
            return Ok(MassEstimate { n, radius: radii[k + 1], mass: m[k + 1], stabilized: true });
        }
        if fallback.is_none_or(|(a, _)| ann < a) {
            fallback = Some((ann, k));
        }
    }
    let k = fallback.map(|f| f.1).unwrap_or(0);
    Ok(MassEstimate { n, radius: radii[k + 1], mass: m[k + 1], stabilized: false })
}

/// Quantization at `p` and whether it passed the stabilization and
/// residual tests.
fn quantize_raw<R: Runner>(
    members: &Members,
    p: C64,
    r0: f64,
    opts: &DetectOptions,
    runner: &R,
    limit: Option<&AreaIntegrator>,
) -> Result<(Quantization, bool)> {
    if disk_mass(members.top(), p, r0)? < FOUR_PI * (1.0 - opts.tol_mass) {
        return Err(Error::Precondition(format!("no concentration of mass at {p}")));
    }
    let per_n = runner.map(members.len(), &|i| diagonal(&members.maps[i], members.ns[i], p, r0, opts, limit));
    let per_n: Vec<MassEstimate> = per_n.into_iter().collect::<Result<_>>()?;
    let last = per_n.last().expect("nonempty ladder");
    let estimate = last.mass;
    let degree = libm::round(estimate / FOUR_PI).max(1.0) as i64;
    let residual = (estimate - FOUR_PI * degree as f64).abs();
    let ok = last.stabilized && residual <= opts.tol_quant;
    Ok((Quantization { p, degree, estimate, residual, per_n }, ok))
}

fn strict((q, ok): (Quantization, bool)) -> Result<Quantization> {
    if ok {
        Ok(q)
    } else {
        Err(Error::Quantization { estimate: q.estimate, degree: q.degree, residual: q.residual })
    }
}

/// Integrator of a nonconstant limit fitted to good accuracy.
fn limit_measure(limit: &LimitReport, opts: &DetectOptions) -> Option<AreaIntegrator> {
    match &limit.map {
        Some(f) if limit.fit_mse <= LIMIT_FIT_MSE && !f.is_constant() => {
            Some(AreaIntegrator::new(f.clone(), QuadOptions::with_rel_tol(opts.area_tol)))
        }
        _ => None,
    }
}

/// Quantizes every point, first on raw member masses to learn the degree
/// drop, then as excess over the fitted limit when one exists.
fn quantize_all<R: Runner>(
    members: &Members,
    points: &[C64],
    r0: f64,
    opts: &DetectOptions,
    runner: &R,
) -> Result<(Vec<Quantization>, LimitReport)> {
    let raw: Vec<(Quantization, bool)> =
        points.iter().map(|&p| quantize_raw(members, p, r0, opts, runner, None)).collect::<Result<_>>()?;
    let drop: i64 = raw.iter().map(|q| q.0.degree).sum();
    let limit = limit_report(members, points, r0, drop, opts)?;
    let Some(f) = limit_measure(&limit, opts) else {
        let qs = raw.into_iter().map(strict).collect::<Result<Vec<_>>>()?;
        return Ok((qs, limit));
    };
    let qs: Vec<Quantization> = points
        .iter()
        .map(|&p| strict(quantize_raw(members, p, r0, opts, runner, Some(&f))?))
        .collect::<Result<_>>()?;
    let refined: i64 = qs.iter().map(|q| q.degree).sum();
    let limit = if refined == drop { limit } else { limit_report(members, points, r0, refined, opts)? };
    Ok((qs, limit))
}

/// Point mass `μ({p}) = 4πD` estimated along the diagonal schedule.
pub fn quantization_check(spec: &FamilySpec, p: C64) -> Result<Quantization> {
    let opts = DetectOptions::default();
    let members = Members::build(spec, &opts, &Sequential)?;
    quantization_check_with(&members, p, &opts, &Sequential)
}

pub fn quantization_check_with<R: Runner>(members: &Members, p: C64, opts: &DetectOptions, runner: &R) -> Result<Quantization> {
    let r0 = default_r0(&members.spec.domain, opts);
    let (mut qs, _) = quantize_all(members, &[p], r0, opts, runner)?;
    Ok(qs.remove(0))
}

/// Geometric-tail estimate of the distance from the last value to the
/// limit, and the extrapolated limit.
fn extrapolate(history: &[SpherePoint]) -> (SpherePoint, f64) {
    let k = history.len();
    let last = history[k - 1];
    if k < 2 {
        return (last, f64::INFINITY);
    }
    let d1 = chordal_distance(history[k - 2], last);
    if k < 3 {
        return (last, d1);
    }
    if d1 < 1e-12 {
        return (last, d1);
    }
    // ratio and extrapolation in the chart where the values are small
    let (a0, a, b) = (history[k - 3], history[k - 2], last);
    let flip = !matches!(b, SpherePoint::Finite(w) if w.norm() <= 1.0);
    let chart = |w: SpherePoint| if flip { w.recip().finite() } else { w.finite() };
    let (Some(a0), Some(a), Some(b)) = (chart(a0), chart(a), chart(b)) else {
        return (last, f64::INFINITY);
    };
    let (e0, e1) = ((a - a0).norm(), (b - a).norm());
    if e0 == 0.0 || e1 >= e0 {
        return (last, f64::INFINITY);
    }
    let q = e1 / e0;
    let tail = d1 * q / (1.0 - q);
    let w = SpherePoint::Finite(b + (b - a) * (q / (1.0 - q)));
    let v = if flip { w.recip() } else { w };
    (v, tail)
}

fn barycenter(values: &[SpherePoint]) -> (SpherePoint, f64) {
    let mut v = [0.0; 3];
    for w in values {
        let u = w.to_unit_vector();
        for i in 0..3 {
            v[i] += u[i];
        }
    }
    let c = SpherePoint::from_unit_vector(v);
    let osc = values.iter().map(|&w| chordal_distance(w, c)).fold(0.0, f64::max);
    (c, osc)
}

fn limit_report(members: &Members, points: &[C64], r0: f64, drop: i64, opts: &DetectOptions) -> Result<LimitReport> {
    let domain = &members.spec.domain;
    let [x0, x1, y0, y1] = domain.bounding_box().ok_or(Error::UnboundedDomain)?;
    let g = opts.samples.max(2);
    let mut samples = Vec::new();
    let mut bound: f64 = 0.0;
    for j in 0..g {
        for i in 0..g {
            let z = C64::new(x0 + (x1 - x0) * i as f64 / (g - 1) as f64, y0 + (y1 - y0) * j as f64 / (g - 1) as f64);
            if !domain.contains(z) || points.iter().any(|p| (z - p).norm() < r0) {
                continue;
            }
            let history: Vec<SpherePoint> = (0..members.len()).map(|k| members.map(k).value(z)).collect();
            let (value, tail) = extrapolate(&history);
            bound = bound.max(tail);
            samples.push(LimitSample { z, value, history });
        }
    }
    let values: Vec<SpherePoint> = samples.iter().map(|s| s.value).collect();
    let (center, oscillation) = if values.is_empty() { (SpherePoint::ZERO, 0.0) } else { barycenter(&values) };
    let constant = (oscillation < opts.cauchy_tol && !values.is_empty()).then_some(center);
    let top_degree = members.map(members.len() - 1).degree() as i64;
    let degree = (top_degree - drop).max(0) as usize;
    let pairs: Vec<(C64, SpherePoint)> = samples.iter().map(|s| (s.z, s.value)).collect();
    let (map, fit_mse) = match fit_rational(&pairs, degree) {
        Ok(f) => (Some(f.map), f.mse),
        Err(_) => (None, f64::INFINITY),
    };
    Ok(LimitReport { samples, cauchy_bound: bound, certified: bound < opts.cauchy_tol, oscillation, constant, degree, map, fit_mse })
}

/// Concentration set, quantized point masses and the pointwise limit.
pub fn detect_singular_set(spec: &FamilySpec) -> Result<ConcentrationReport> {
    let opts = DetectOptions::default();
    let members = Members::build(spec, &opts, &Sequential)?;
    detect_with(&members, &opts, &Sequential)
}

pub fn detect_with<R: Runner>(members: &Members, opts: &DetectOptions, runner: &R) -> Result<ConcentrationReport> {
    let spec = &members.spec;
    let domain = &spec.domain;
    if !domain.is_bounded() {
        return Err(Error::UnboundedDomain);
    }
    let areas: Vec<f64> = runner
        .map(members.len(), &|i| members.maps[i].area(domain).map(|e| e.value))
        .into_iter()
        .collect::<Result<_>>()?;
    let measured = areas.iter().copied().fold(0.0, f64::max);
    let bound = match spec.bound {
        Some(c) => {
            if let Some(k) = areas.iter().position(|&a| a > c * (1.0 + opts.area_tol.max(1e-6) * 10.0)) {
                return Err(Error::Precondition(format!("area {} at n = {} exceeds the declared bound {c}", areas[k], members.ns[k])));
            }
            c
        }
        None => measured,
    };
    // point masses are only approached from below at finite n
    let cardinality_bound = libm::floor(bound / (FOUR_PI * (1.0 - opts.tol_mass))) as usize;
    let r0 = default_r0(domain, opts);
    let top = members.top();
    let atlas = MassAtlas::compute(top, domain, opts.grid, opts.grid, members.ns[members.len() - 1])?;

    let mut cands: Vec<(C64, f64)> = Vec::new();
    for (i, j, m) in atlas.peak_windows(0.5 * FOUR_PI) {
        let p = zoom(top, domain, atlas.window_rect(i, j), 0.5 * FOUR_PI)?;
        let r_min = libm::ldexp(r0, -(opts.ladder_steps as i32 - 1));
        if cands.iter().all(|(q, _)| (p - q).norm() >= r_min) {
            cands.push((p, m));
        }
    }
    let ladder: Vec<f64> = (0..opts.ladder_steps).map(|k| libm::ldexp(r0, -(k as i32))).collect();
    let tail = members.len().saturating_sub(2);
    let mut points = Vec::new();
    for (p, m) in cands {
        // at every radius the top member carries the mass and the mass does
        // not recede along the last step of the ladder
        let thr = FOUR_PI * (1.0 - opts.tol_mass);
        let mut persistent = true;
        let mut top_masses = Vec::new();
        for &r in &ladder {
            let masses: Vec<f64> = (tail..members.len()).map(|k| disk_mass(&members.maps[k], p, r)).collect::<Result<_>>()?;
            let last = *masses.last().expect("nonempty ladder");
            top_masses.push((r, last));
            if last < thr || masses.iter().any(|&m| m < thr && m > last) {
                persistent = false;
                break;
            }
        }
        if persistent {
            points.push((p, m, top_masses));
        }
    }
    points.sort_by(|a, b| b.1.total_cmp(&a.1));
    points.truncate(cardinality_bound);
    points.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    let centers: Vec<C64> = points.iter().map(|c| c.0).collect();
    let (qs, limit) = quantize_all(members, &centers, r0, opts, runner)?;
    let out: Vec<ConcentrationPoint> = points
        .into_iter()
        .zip(qs)
        .map(|((p, _, ladder), quantization)| ConcentrationPoint { p, ladder, quantization })
        .collect();
    Ok(ConcentrationReport {
        bound,
        bound_declared: spec.bound.is_some(),
        cardinality_bound,
        areas: members.ns.iter().copied().zip(areas).collect(),
        points: out,
        limit,
        r0,
    })
}
