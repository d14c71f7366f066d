//! Scenario files.
//!
//! A scenario is a TOML document. Family pipelines read `[family]` and
//! `[domain]`; the removability pipelines read `[map]` plus their own
//! section. `[tolerances]` overrides detection and tree defaults.

use std::path::Path;

use bubblelab_core::family::{DetectOptions, FamilySpec};
use bubblelab_core::quadrature::Region;
use bubblelab_core::sphere::{RationalMap, C64};
use bubblelab_core::tree::TreeOptions;
use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Analyze,
    Tree,
    Energy,
    Isoperimetry,
    Holder,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Tree => "tree",
            Command::Energy => "energy",
            Command::Isoperimetry => "isoperimetry",
            Command::Holder => "holder",
        }
    }

    /// Pipelines a scenario may declare for this command.
    fn accepts(self, analysis: &str) -> bool {
        match self {
            Command::Analyze | Command::Tree => analysis == "quantize" || analysis == "tree",
            _ => analysis == self.name(),
        }
    }
}

const PIPELINES: [&str; 5] = ["quantize", "tree", "energy", "isoperimetry", "holder"];

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub analysis: Option<String>,
    pub family: Option<FamilyConfig>,
    pub domain: Option<DomainConfig>,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub output: Option<OutputConfig>,
    pub map: Option<MapConfig>,
    pub energy: Option<EnergyConfig>,
    pub isoperimetry: Option<IsoperimetryConfig>,
    pub holder: Option<HolderConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    pub num: Vec<String>,
    pub den: Vec<String>,
    pub ladder: Vec<u64>,
    pub bound: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    Disk,
    Annulus,
    Rect,
    DiskMinusDisks,
    Plane,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoleConfig {
    pub center: [f64; 2],
    pub radius: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub kind: DomainKind,
    #[serde(default)]
    pub center: [f64; 2],
    pub radius: Option<f64>,
    pub inner: Option<f64>,
    pub outer: Option<f64>,
    pub x0: Option<f64>,
    pub x1: Option<f64>,
    pub y0: Option<f64>,
    pub y1: Option<f64>,
    #[serde(default)]
    pub holes: Vec<HoleConfig>,
    #[serde(default)]
    pub excluded: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub grid: Option<usize>,
    pub tol_mass: Option<f64>,
    pub tol_quant: Option<f64>,
    pub eps_ann: Option<f64>,
    pub r0: Option<f64>,
    pub ladder_steps: Option<usize>,
    pub max_halvings: Option<usize>,
    pub cauchy_tol: Option<f64>,
    pub samples: Option<usize>,
    pub area_tol: Option<f64>,
    pub attach_tol: Option<f64>,
    pub radius_steps: Option<usize>,
    pub route: Option<bool>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: String,
}

/// A coefficient: a real number or an `[re, im]` pair.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum Coeff {
    Real(f64),
    Complex([f64; 2]),
}

impl Coeff {
    fn value(self) -> C64 {
        match self {
            Coeff::Real(x) => C64::new(x, 0.0),
            Coeff::Complex([re, im]) => C64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapConfig {
    pub num: Vec<Coeff>,
    #[serde(default = "unit_den")]
    pub den: Vec<Coeff>,
}

fn unit_den() -> Vec<Coeff> {
    vec![Coeff::Real(1.0)]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyConfig {
    #[serde(default)]
    pub center: [f64; 2],
    pub r: f64,
    #[serde(default = "default_radii")]
    pub radii: usize,
    /// Depth of the curve system; none is built when absent.
    pub curve_depth: Option<usize>,
    /// Outer radius of the curve system, `r/2` by default so that it lives
    /// in the same disk `B(p, r)`.
    pub curve_r: Option<f64>,
    #[serde(default)]
    pub exceptional: Vec<[f64; 2]>,
}

fn default_radii() -> usize {
    8
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsoperimetryCase {
    pub name: Option<String>,
    pub map: MapConfig,
    pub domain: DomainConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsoperimetryConfig {
    pub case: Vec<IsoperimetryCase>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HolderConfig {
    #[serde(default)]
    pub center: [f64; 2],
    pub r: f64,
    #[serde(default = "default_holder_samples")]
    pub samples: usize,
}

fn default_holder_samples() -> usize {
    200
}

/// What a validated scenario asks for.
#[derive(Debug, Clone)]
pub enum Job {
    Family { spec: FamilySpec, opts: TreeOptions },
    Energy { map: RationalMap, center: C64, r: f64, radii: usize, curve: Option<(f64, usize)>, exceptional: Vec<C64> },
    Isoperimetry { cases: Vec<(String, RationalMap, Region)> },
    Holder { map: RationalMap, center: C64, r: f64, samples: usize },
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub command: Command,
    pub job: Job,
    pub output_dir: Option<String>,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn point([re, im]: [f64; 2]) -> C64 {
    C64::new(re, im)
}

fn positive(x: f64, what: &str) -> Result<f64> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(invalid(format!("{what} must be positive and finite, got {x}")))
    }
}

fn need(x: Option<f64>, what: &str) -> Result<f64> {
    positive(x.ok_or_else(|| invalid(format!("{what} is required")))?, what)
}

impl DomainConfig {
    pub fn to_region(&self, at: &str) -> Result<Region> {
        let c = point(self.center);
        let field = |name: &str| format!("{at}.{name}");
        let region = match self.kind {
            DomainKind::Disk => Region::disk(c, need(self.radius, &field("radius"))?),
            DomainKind::Annulus => {
                let (inner, outer) = (need(self.inner, &field("inner"))?, need(self.outer, &field("outer"))?);
                if inner >= outer {
                    return Err(invalid(format!("{at}: inner radius must be below outer radius")));
                }
                Region::annulus(c, inner, outer)
            }
            DomainKind::Rect => {
                let get = |v: Option<f64>, name: &str| {
                    v.filter(|x| x.is_finite()).ok_or_else(|| invalid(format!("{} is required", field(name))))
                };
                let (x0, x1, y0, y1) = (get(self.x0, "x0")?, get(self.x1, "x1")?, get(self.y0, "y0")?, get(self.y1, "y1")?);
                if x0 >= x1 || y0 >= y1 {
                    return Err(invalid(format!("{at}: rectangle needs x0 < x1 and y0 < y1")));
                }
                Region::rect(x0, x1, y0, y1)
            }
            DomainKind::DiskMinusDisks => {
                let holes = self
                    .holes
                    .iter()
                    .enumerate()
                    .map(|(i, h)| Ok((point(h.center), positive(h.radius, &format!("{at}.holes[{i}].radius"))?)))
                    .collect::<Result<Vec<_>>>()?;
                Region::disk_minus_disks(c, need(self.radius, &field("radius"))?, holes)
            }
            DomainKind::Plane => Ok(Region::full_plane()),
        }
        .map_err(|e| invalid(format!("{at}: {e}")))?;
        Ok(region.with_excluded(self.excluded.iter().copied().map(point).collect()))
    }
}

impl MapConfig {
    pub fn to_map(&self, at: &str) -> Result<RationalMap> {
        let num: Vec<C64> = self.num.iter().map(|c| c.value()).collect();
        let den: Vec<C64> = self.den.iter().map(|c| c.value()).collect();
        if num.iter().chain(&den).any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(invalid(format!("{at}: coefficients must be finite")));
        }
        RationalMap::from_coeffs(&num, &den).map_err(|e| invalid(format!("{at}: {e}")))
    }
}

/// Renders an expression error with a caret under the offending byte.
fn expression_error(at: &str, src: &str, position: usize, message: &str) -> CliError {
    invalid(format!("{at}: parse error at position {position}: {message}\n  {src}\n  {}^", " ".repeat(position.min(src.len()))))
}

fn family_spec(f: &FamilyConfig, domain: Region) -> Result<FamilySpec> {
    if f.ladder.is_empty() {
        return Err(invalid("family.ladder: validation error: the n ladder is empty"));
    }
    if f.ladder.contains(&0) {
        return Err(invalid("family.ladder: validation error: n must be positive"));
    }
    if let Some(b) = f.bound {
        positive(b, "family.bound")?;
    }
    // parse each expression on its own so errors point into the right string
    for (name, list) in [("num", &f.num), ("den", &f.den)] {
        for (i, src) in list.iter().enumerate() {
            if let Err(bubblelab_core::Error::Expression { position, message }) = bubblelab_core::family::Expr::parse(src) {
                return Err(expression_error(&format!("family.{name}[{i}]"), src, position, &message));
            }
        }
    }
    let num: Vec<&str> = f.num.iter().map(String::as_str).collect();
    let den: Vec<&str> = f.den.iter().map(String::as_str).collect();
    FamilySpec::parse(&num, &den, domain, f.ladder.clone(), f.bound).map_err(|e| invalid(format!("family: {e}")))
}

impl Tolerances {
    /// Applies the overrides, then `--tol` on the area tolerance.
    pub fn tree_options(&self, tol: Option<f64>) -> Result<TreeOptions> {
        let mut d = DetectOptions::default();
        let pos = |v: Option<f64>, what: &str| v.map(|x| positive(x, &format!("tolerances.{what}"))).transpose();
        let count = |v: Option<usize>, what: &str| match v {
            Some(0) => Err(invalid(format!("tolerances.{what} must be positive"))),
            v => Ok(v),
        };
        if let Some(x) = count(self.grid, "grid")? {
            d.grid = x;
        }
        if let Some(x) = pos(self.tol_mass, "tol_mass")? {
            if x >= 1.0 {
                return Err(invalid("tolerances.tol_mass must be below 1"));
            }
            d.tol_mass = x;
        }
        if let Some(x) = pos(self.tol_quant, "tol_quant")? {
            d.tol_quant = x;
        }
        if let Some(x) = pos(self.eps_ann, "eps_ann")? {
            d.eps_ann = x;
        }
        if let Some(x) = pos(self.r0, "r0")? {
            d.r0 = Some(x);
        }
        if let Some(x) = count(self.ladder_steps, "ladder_steps")? {
            d.ladder_steps = x;
        }
        if let Some(x) = count(self.max_halvings, "max_halvings")? {
            d.max_halvings = x;
        }
        if let Some(x) = pos(self.cauchy_tol, "cauchy_tol")? {
            d.cauchy_tol = x;
        }
        if let Some(x) = count(self.samples, "samples")? {
            d.samples = x;
        }
        if let Some(x) = pos(self.area_tol, "area_tol")? {
            d.area_tol = x;
        }
        if let Some(x) = tol {
            d.area_tol = positive(x, "--tol")?;
        }
        let mut opts = TreeOptions { detect: d, ..TreeOptions::default() };
        if let Some(x) = pos(self.attach_tol, "attach_tol")? {
            opts.attach_tol = x;
        }
        if let Some(x) = count(self.radius_steps, "radius_steps")? {
            opts.radius_steps = x;
        }
        if let Some(x) = self.route {
            opts.route = x;
        }
        Ok(opts)
    }
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| invalid(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Checks the scenario against `command` and builds its inputs.
    pub fn validate(&self, command: Command, tol: Option<f64>) -> Result<Scenario> {
        if let Some(a) = &self.analysis {
            if !PIPELINES.contains(&a.as_str()) {
                return Err(invalid(format!("analysis: unknown pipeline `{a}` (expected one of {})", PIPELINES.join(", "))));
            }
            if !command.accepts(a) {
                return Err(invalid(format!("analysis: scenario is a `{a}` pipeline, not `{}`", command.name())));
            }
        }
        let opts = self.tolerances.tree_options(tol)?;
        let section = |present: bool, name: &str| {
            if present {
                Ok(())
            } else {
                Err(invalid(format!("[{name}] section is required for `{}`", command.name())))
            }
        };
        let map = || -> Result<RationalMap> {
            section(self.map.is_some(), "map")?;
            self.map.as_ref().unwrap().to_map("map")
        };
        let job = match command {
            Command::Analyze | Command::Tree => {
                section(self.family.is_some(), "family")?;
                section(self.domain.is_some(), "domain")?;
                let domain = self.domain.as_ref().unwrap().to_region("domain")?;
                if command == Command::Analyze && !domain.is_bounded() {
                    return Err(invalid("domain: the mass atlas needs a bounded domain"));
                }
                Job::Family { spec: family_spec(self.family.as_ref().unwrap(), domain)?, opts }
            }
            Command::Energy => {
                section(self.energy.is_some(), "energy")?;
                let e = self.energy.as_ref().unwrap();
                if e.radii < 2 {
                    return Err(invalid("energy.radii must be at least 2"));
                }
                Job::Energy {
                    map: map()?,
                    center: point(e.center),
                    r: positive(e.r, "energy.r")?,
                    radii: e.radii,
                    curve: match e.curve_depth {
                        Some(depth) => Some((positive(e.curve_r.unwrap_or(0.5 * e.r), "energy.curve_r")?, depth)),
                        None => None,
                    },
                    exceptional: e.exceptional.iter().copied().map(point).collect(),
                }
            }
            Command::Isoperimetry => {
                section(self.isoperimetry.is_some(), "isoperimetry")?;
                let cases = &self.isoperimetry.as_ref().unwrap().case;
                if cases.is_empty() {
                    return Err(invalid("isoperimetry.case: at least one case is required"));
                }
                let cases = cases
                    .iter()
                    .enumerate()
                    .map(|(i, c)| {
                        let at = format!("isoperimetry.case[{i}]");
                        let name = c.name.clone().unwrap_or_else(|| format!("case{i}"));
                        Ok((name, c.map.to_map(&format!("{at}.map"))?, c.domain.to_region(&format!("{at}.domain"))?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Job::Isoperimetry { cases }
            }
            Command::Holder => {
                section(self.holder.is_some(), "holder")?;
                let h = self.holder.as_ref().unwrap();
                if h.samples < 2 {
                    return Err(invalid("holder.samples must be at least 2"));
                }
                Job::Holder { map: map()?, center: point(h.center), r: positive(h.r, "holder.r")?, samples: h.samples }
            }
        };
        Ok(Scenario { command, job, output_dir: self.output.as_ref().map(|o| o.dir.clone()) })
    }
}
