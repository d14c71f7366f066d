//! JSON and CSV encodings of analysis results.
//!
//! Every float is written with 17 significant digits (`{:.16e}`), complex
//! numbers as `[re, im]`, the point at infinity as `"inf"` and non-finite
//! reals as `null`.

use std::io;

use bubblelab_core::family::{ConcentrationReport, MassAtlas};
use bubblelab_core::quadrature::{Region, RegionKind};
use bubblelab_core::removability::{CurveSystem, DecayReport, Defect, HolderReport, ALPHA_FLOOR};
use bubblelab_core::sphere::{Polynomial, RationalMap, SpherePoint, C64};
use bubblelab_core::tree::{Parent, Route, TreeChecks, TreeRun};
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

/// Pretty printer writing floats as `{:.16e}`.
struct Fixed<'a>(PrettyFormatter<'a>);

impl Formatter for Fixed<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Fixed(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("serializing to memory cannot fail");
    out.push(b'\n');
    out
}

/// A float in CSV cells; empty for non-finite values.
pub fn cell(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        String::new()
    }
}

pub fn to_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory CSV");
    for r in rows {
        w.write_record(&r).expect("in-memory CSV");
    }
    w.into_inner().expect("in-memory CSV")
}

pub fn cx(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum PointJson {
    Finite([f64; 2]),
    Infinity(&'static str),
}

impl From<SpherePoint> for PointJson {
    fn from(p: SpherePoint) -> Self {
        match p.finite() {
            Some(z) => PointJson::Finite(cx(z)),
            None => PointJson::Infinity("inf"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RationalJson {
    /// Coefficients in increasing degree.
    pub num: Vec<[f64; 2]>,
    pub den: Vec<[f64; 2]>,
}

/// Coefficients of `p`, with the zero polynomial written as `[[0, 0]]`.
fn coeffs(p: &Polynomial) -> Vec<[f64; 2]> {
    if p.is_zero() {
        vec![[0.0, 0.0]]
    } else {
        p.coeffs().iter().copied().map(cx).collect()
    }
}

impl From<&RationalMap> for RationalJson {
    fn from(f: &RationalMap) -> Self {
        RationalJson { num: coeffs(f.num()), den: coeffs(f.den()) }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HoleJson {
    pub center: [f64; 2],
    pub radius: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainShape {
    Disk { center: [f64; 2], radius: f64 },
    Annulus { center: [f64; 2], inner: f64, outer: f64 },
    Rect { x0: f64, x1: f64, y0: f64, y1: f64 },
    DiskMinusDisks { center: [f64; 2], radius: f64, holes: Vec<HoleJson> },
    Plane,
}

#[derive(Debug, Clone, Serialize)]
pub struct DomainJson {
    #[serde(flatten)]
    pub shape: DomainShape,
    pub excluded: Vec<[f64; 2]>,
}

impl From<&Region> for DomainJson {
    fn from(r: &Region) -> Self {
        let shape = match &r.kind {
            RegionKind::Disk { center, radius } => DomainShape::Disk { center: cx(*center), radius: *radius },
            RegionKind::Annulus { center, inner, outer } => {
                DomainShape::Annulus { center: cx(*center), inner: *inner, outer: *outer }
            }
            RegionKind::Rect { x0, x1, y0, y1 } => DomainShape::Rect { x0: *x0, x1: *x1, y0: *y0, y1: *y1 },
            RegionKind::DiskMinusDisks { center, radius, holes } => DomainShape::DiskMinusDisks {
                center: cx(*center),
                radius: *radius,
                holes: holes.iter().map(|&(c, r)| HoleJson { center: cx(c), radius: r }).collect(),
            },
            RegionKind::FullPlane => DomainShape::Plane,
        };
        DomainJson { shape, excluded: r.excluded.iter().copied().map(cx).collect() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AreaJson {
    pub n: u64,
    pub area: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MassEstimateJson {
    pub n: u64,
    pub radius: f64,
    pub mass: f64,
    pub stabilized: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConcentrationPointJson {
    pub p: [f64; 2],
    #[serde(rename = "D")]
    pub degree: i64,
    /// Point mass estimate at the top of the ladder.
    pub mass: f64,
    pub residual: f64,
    /// `[radius, mass]` of the persistence ladder at the top `n`.
    pub ladder: Vec<[f64; 2]>,
    pub per_n: Vec<MassEstimateJson>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LimitSampleJson {
    pub z: [f64; 2],
    pub value: PointJson,
}

#[derive(Debug, Clone, Serialize)]
pub struct LimitJson {
    pub certified: bool,
    pub cauchy_bound: f64,
    pub oscillation: f64,
    pub constant: Option<PointJson>,
    pub degree: usize,
    pub map: Option<RationalJson>,
    pub fit_mse: f64,
    pub samples: Vec<LimitSampleJson>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConcentrationJson {
    pub family: FamilyJson,
    pub bound: f64,
    pub bound_declared: bool,
    pub cardinality_bound: usize,
    pub r0: f64,
    pub areas: Vec<AreaJson>,
    pub singular_set: Vec<ConcentrationPointJson>,
    #[serde(rename = "total_drop_D")]
    pub total_drop: i64,
    pub limit: LimitJson,
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyJson {
    pub num: Vec<String>,
    pub den: Vec<String>,
    pub ladder: Vec<u64>,
    pub domain: DomainJson,
}

impl From<&bubblelab_core::family::FamilySpec> for FamilyJson {
    fn from(s: &bubblelab_core::family::FamilySpec) -> Self {
        FamilyJson { num: s.num_source(), den: s.den_source(), ladder: s.ladder().to_vec(), domain: (&s.domain).into() }
    }
}

pub fn concentration_json(spec: &bubblelab_core::family::FamilySpec, r: &ConcentrationReport) -> ConcentrationJson {
    ConcentrationJson {
        family: spec.into(),
        bound: r.bound,
        bound_declared: r.bound_declared,
        cardinality_bound: r.cardinality_bound,
        r0: r.r0,
        areas: r.areas.iter().map(|&(n, area)| AreaJson { n, area }).collect(),
        singular_set: r
            .points
            .iter()
            .map(|c| ConcentrationPointJson {
                p: cx(c.p),
                degree: c.quantization.degree,
                mass: c.quantization.estimate,
                residual: c.quantization.residual,
                ladder: c.ladder.iter().map(|&(r, m)| [r, m]).collect(),
                per_n: c
                    .quantization
                    .per_n
                    .iter()
                    .map(|m| MassEstimateJson { n: m.n, radius: m.radius, mass: m.mass, stabilized: m.stabilized })
                    .collect(),
            })
            .collect(),
        total_drop: r.total_drop(),
        limit: LimitJson {
            certified: r.limit.certified,
            cauchy_bound: r.limit.cauchy_bound,
            oscillation: r.limit.oscillation,
            constant: r.limit.constant.map(Into::into),
            degree: r.limit.degree,
            map: r.limit.map.as_ref().map(Into::into),
            fit_mse: r.limit.fit_mse,
            samples: r.limit.samples.iter().map(|s| LimitSampleJson { z: cx(s.z), value: s.value.into() }).collect(),
        },
    }
}

pub fn atlas_csv(atlases: &[MassAtlas]) -> Vec<u8> {
    let rows = atlases.iter().flat_map(|a| {
        (0..a.ny).flat_map(move |j| {
            (0..a.nx).map(move |i| {
                let [x0, x1, y0, y1] = a.cell_rect(i, j);
                vec![a.n.to_string(), i.to_string(), j.to_string(), cell(x0), cell(x1), cell(y0), cell(y1), cell(a.mass(i, j))]
            })
        })
    });
    to_csv(&["n", "i", "j", "x0", "x1", "y0", "y1", "mass"], rows)
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum ParentJson {
    Base(&'static str),
    Sphere(usize),
}

#[derive(Debug, Clone, Serialize)]
pub struct SphereJson {
    pub id: usize,
    pub parent: ParentJson,
    pub attach: [f64; 2],
    pub base_point: [f64; 2],
    pub degree: usize,
    pub rational: RationalJson,
    pub mass: f64,
    pub fit_mse: f64,
    pub stability: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BaseJson {
    pub domain: DomainJson,
    pub limit_map: Option<RationalJson>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChecksJson {
    pub degree_sum: bool,
    pub node_continuity: bool,
    pub mass: bool,
    pub expected_drop: i64,
    pub node_gaps: Vec<f64>,
    pub mass_residual: f64,
}

impl From<&TreeChecks> for ChecksJson {
    fn from(c: &TreeChecks) -> Self {
        ChecksJson {
            degree_sum: c.degree_sum,
            node_continuity: c.node_continuity,
            mass: c.mass,
            expected_drop: c.expected_drop,
            node_gaps: c.node_gaps.clone(),
            mass_residual: c.mass_residual,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TreeJson {
    pub base: BaseJson,
    pub spheres: Vec<SphereJson>,
    #[serde(rename = "total_drop_D")]
    pub total_drop: i64,
    pub checks: ChecksJson,
    pub route: &'static str,
}

pub fn tree_json(run: &TreeRun) -> TreeJson {
    let t = &run.tree;
    TreeJson {
        base: BaseJson { domain: (&t.domain).into(), limit_map: t.limit.as_ref().map(Into::into) },
        spheres: t
            .spheres
            .iter()
            .map(|s| SphereJson {
                id: s.id,
                parent: match s.parent {
                    Parent::Base => ParentJson::Base("base"),
                    Parent::Sphere(j) => ParentJson::Sphere(j),
                },
                attach: cx(s.attach),
                base_point: cx(s.base_point),
                degree: s.degree,
                rational: (&s.map).into(),
                mass: s.mass,
                fit_mse: s.fit_mse,
                stability: s.stability,
            })
            .collect(),
        total_drop: t.total_drop,
        checks: (&run.checks).into(),
        route: match run.route {
            Route::Direct => "direct",
            Route::Perturbed { inverted: false } => "perturbed",
            Route::Perturbed { inverted: true } => "perturbed_inverted",
        },
    }
}

pub fn profile_csv(d: &DecayReport) -> Vec<u8> {
    let rows = d.radii.iter().zip(&d.energies).map(|(&r, &e)| vec![cell(r), cell(e)]);
    to_csv(&["rho", "energy"], rows)
}

/// One row per radius; the summary columns repeat on every row.
pub fn decay_csv(d: &DecayReport) -> Vec<u8> {
    let top = d.energies.first().copied().unwrap_or(0.0);
    let r = d.radii.first().copied().unwrap_or(1.0);
    let rows = d.radii.iter().zip(&d.energies).map(|(&s, &e)| {
        vec![
            cell(s),
            cell(e),
            cell((s / r).powf(ALPHA_FLOOR) * top),
            if d.alpha_hat.is_infinite() { "inf".into() } else { cell(d.alpha_hat) },
            d.admissible.to_string(),
            d.degenerate.to_string(),
            d.decay_holds.to_string(),
        ]
    });
    to_csv(&["rho", "energy", "decay_bound", "alpha_hat", "admissible", "degenerate", "decay_holds"], rows)
}

pub fn curves_csv(c: &CurveSystem) -> Vec<u8> {
    let circles = c.radii.iter().zip(&c.circle_lengths).enumerate().map(|(n, (&r, &l))| ("circle", n, r, l));
    let segments = c.angles.iter().zip(&c.segment_lengths).enumerate().map(|(n, (&t, &l))| ("segment", n, t, l));
    let rows = circles.chain(segments).map(|(kind, n, param, len)| {
        let k = if kind == "circle" { c.constant } else { c.segment_constant };
        vec![kind.to_string(), n.to_string(), cell(param), cell(len), cell(c.beta), cell(k), c.decay_holds.to_string()]
    });
    to_csv(&["curve", "index", "param", "length", "beta", "envelope", "decay_holds"], rows)
}

#[derive(Debug, Clone, Serialize)]
pub struct DefectJson {
    pub name: String,
    pub map: RationalJson,
    pub domain: DomainJson,
    pub energy: f64,
    pub defect: f64,
    pub boundary_lengths: Vec<f64>,
    pub boundary_bound: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IsoperimetryJson {
    pub cases: Vec<DefectJson>,
    pub max_ratio: f64,
}

pub fn isoperimetry_json(cases: &[(String, RationalMap, Region)], defects: &[Defect]) -> IsoperimetryJson {
    let cases: Vec<DefectJson> = cases
        .iter()
        .zip(defects)
        .map(|((name, f, region), d)| DefectJson {
            name: name.clone(),
            map: f.into(),
            domain: region.into(),
            energy: d.energy,
            defect: d.defect,
            boundary_lengths: d.lengths.clone(),
            boundary_bound: d.boundary_bound,
            ratio: d.ratio(),
        })
        .collect();
    let max_ratio = cases.iter().map(|c| c.ratio).filter(|r| r.is_finite()).fold(0.0, f64::max);
    IsoperimetryJson { cases, max_ratio }
}

#[derive(Debug, Clone, Serialize)]
pub struct HolderJson {
    pub map: RationalJson,
    pub center: [f64; 2],
    pub r: f64,
    pub samples: usize,
    pub pairs: usize,
    /// `null` when degenerate.
    pub exponent: f64,
    pub constant: f64,
    pub local_exponent: f64,
    pub degenerate: bool,
}

pub fn holder_json(f: &RationalMap, samples: usize, h: &HolderReport) -> HolderJson {
    HolderJson {
        map: f.into(),
        center: cx(h.center),
        r: h.r,
        samples,
        pairs: h.pairs,
        exponent: h.exponent,
        constant: h.constant,
        local_exponent: h.local_exponent,
        degenerate: h.degenerate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_digits() {
        let s = String::from_utf8(to_json(&(0.1, -2.5e-300, f64::NAN, 3u32))).unwrap();
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
        assert!(s.contains("-2.5000000000000000e-300"));
        assert!(s.contains("null") && s.contains('3'));
        let v: serde_json::Value = serde_json::from_slice(s.as_bytes()).unwrap();
        assert_eq!(v[0].as_f64(), Some(0.1));
    }

    #[test]
    fn points_and_domains() {
        let s = String::from_utf8(to_json(&PointJson::from(SpherePoint::Infinity))).unwrap();
        assert_eq!(s.trim(), "\"inf\"");
        let d = DomainJson::from(&Region::unit_disk());
        let v: serde_json::Value = serde_json::from_slice(&to_json(&d)).unwrap();
        assert_eq!(v["kind"], "disk");
        assert_eq!(v["radius"].as_f64(), Some(1.0));
    }

    #[test]
    fn csv_cells() {
        assert_eq!(cell(f64::INFINITY), "");
        let out = String::from_utf8(to_csv(&["a", "b"], [vec!["1".into(), cell(0.5)]])).unwrap();
        assert_eq!(out, "a,b\n1,5.0000000000000000e-1\n");
    }
}
