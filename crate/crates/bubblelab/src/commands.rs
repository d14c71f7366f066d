use std::fs;
use std::path::{Path, PathBuf};

use bubblelab_core::family::{detect_with, MassAtlas, Members};
use bubblelab_core::removability::{build_curve_system, energy_decay, holder_modulus, isoperimetric_defect};
use bubblelab_core::runner::Runner;
use bubblelab_core::tree::build_tree_from;

use crate::config::{Command, Job, Scenario, ScenarioConfig};
use crate::error::{CliError, Result};
use crate::output::*;
use crate::record::{sha256_hex, timestamp, ConfigRef, RunRecord};

/// Files produced by one run, in the order they are written.
#[derive(Debug, Default)]
pub struct Outputs {
    pub files: Vec<(String, Vec<u8>)>,
    /// Set when the analysis ran but failed its own checks.
    pub failure: Option<String>,
}

impl Outputs {
    fn push(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.push((name.to_string(), bytes));
    }

    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files.iter().find(|f| f.0 == name).map(|f| f.1.as_slice())
    }
}

/// Runs a validated scenario without touching the file system.
pub fn run<R: Runner>(scenario: &Scenario, runner: &R) -> Result<Outputs> {
    let mut out = Outputs::default();
    match &scenario.job {
        Job::Family { spec, opts } => {
            let members = Members::build(spec, &opts.detect, runner)?;
            let report = detect_with(&members, &opts.detect, runner)?;
            if scenario.command == Command::Analyze {
                let g = opts.detect.grid;
                let atlases = runner
                    .map(members.len(), &|i| MassAtlas::compute(&members.maps[i], &spec.domain, g, g, members.ns[i]))
                    .into_iter()
                    .collect::<bubblelab_core::Result<Vec<_>>>()?;
                out.push("concentration_report.json", to_json(&concentration_json(spec, &report)));
                out.push("mass_atlas.csv", atlas_csv(&atlases));
            } else {
                out.push("concentration_report.json", to_json(&concentration_json(spec, &report)));
                let tree = build_tree_from(&members, report, opts, runner)?;
                out.push("bubble_tree.json", to_json(&tree_json(&tree)));
                if !tree.checks.all() {
                    let c = &tree.checks;
                    out.failure = Some(format!(
                        "degree_sum {} node_continuity {} mass {}",
                        c.degree_sum, c.node_continuity, c.mass
                    ));
                }
            }
        }
        Job::Energy { map, center, r, radii, curve, exceptional } => {
            let d = energy_decay(map, *center, *r, *radii)?;
            out.push("energy_profile.csv", profile_csv(&d));
            out.push("decay_report.csv", decay_csv(&d));
            if let Some((cr, depth)) = curve {
                let c = build_curve_system(map, *center, *cr, *depth, exceptional, runner)?;
                out.push("curve_system.csv", curves_csv(&c));
            }
        }
        Job::Isoperimetry { cases } => {
            let defects = runner
                .map(cases.len(), &|i| isoperimetric_defect(&cases[i].1, &cases[i].2))
                .into_iter()
                .collect::<bubblelab_core::Result<Vec<_>>>()?;
            out.push("isoperimetry.json", to_json(&isoperimetry_json(cases, &defects)));
        }
        Job::Holder { map, center, r, samples } => {
            let h = holder_modulus(map, *center, *r, *samples)?;
            out.push("holder.json", to_json(&holder_json(map, *samples, &h)));
        }
    }
    Ok(out)
}

/// Command-line inputs of one invocation.
#[derive(Debug, Clone)]
pub struct Invocation {
    pub command: Command,
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
}

/// Loads the scenario, runs it and writes outputs plus `run.json`. Returns
/// the output directory.
pub fn execute<R: Runner>(inv: &Invocation, runner: &R) -> Result<(PathBuf, Outputs)> {
    let text = fs::read(&inv.config).map_err(|e| CliError::Config(format!("{}: {e}", inv.config.display())))?;
    let source = String::from_utf8(text.clone()).map_err(|_| CliError::Config("config is not UTF-8".into()))?;
    let scenario = ScenarioConfig::parse(&source)?.validate(inv.command, inv.tol)?;
    let dir = match (&inv.out, &scenario.output_dir) {
        (Some(d), _) => d.clone(),
        (None, Some(d)) => PathBuf::from(d),
        (None, None) => {
            let stem = inv.config.file_stem().map_or("run".into(), |s| s.to_string_lossy().into_owned());
            Path::new("out").join(stem)
        }
    };
    let (started, clock) = timestamp();
    let outputs = run(&scenario, runner)?;
    let (finished, _) = timestamp();

    fs::create_dir_all(&dir).map_err(|e| CliError::io(dir.display().to_string(), e))?;
    for (name, bytes) in &outputs.files {
        let path = dir.join(name);
        fs::write(&path, bytes).map_err(|e| CliError::io(path.display().to_string(), e))?;
    }
    let record = RunRecord {
        command: inv.command.name(),
        config: ConfigRef {
            file: inv.config.file_name().map_or(String::new(), |s| s.to_string_lossy().into_owned()),
            sha256: sha256_hex(&text),
        },
        tol_override: inv.tol,
        versions: RunRecord::versions(),
        started,
        finished,
        clock,
        status: if outputs.failure.is_some() { "checks_failed" } else { "ok" },
        outputs: outputs.files.iter().map(|(n, b)| RunRecord::entry(n, b)).collect(),
    };
    let path = dir.join("run.json");
    fs::write(&path, to_json(&record)).map_err(|e| CliError::io(path.display().to_string(), e))?;
    if let Some(msg) = &outputs.failure {
        return Err(CliError::Checks(msg.clone()));
    }
    Ok((dir, outputs))
}
