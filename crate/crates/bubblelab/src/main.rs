use std::path::PathBuf;
use std::process::ExitCode;

use bubblelab::commands::{execute, Invocation};
use bubblelab::config::Command;
use bubblelab::runner::RayonRunner;
use bubblelab::CliError;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bubblelab", version, about = "Bubbling analysis of families of rational maps")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Singular set, mass quantization and mass atlas.
    Analyze(RunArgs),
    /// Tree of spheres.
    Tree(RunArgs),
    /// Energy decay on shrinking disks.
    Energy(RunArgs),
    /// Isoperimetric defect over a set of cases.
    Isoperimetry(RunArgs),
    /// Hölder modulus.
    Holder(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    config: PathBuf,
    /// Output directory (default: `output.dir` of the config, else out/<config name>).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Relative area tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Worker threads; BUBBLELAB_JOBS takes precedence.
    #[arg(long)]
    jobs: Option<usize>,
}

fn jobs(flag: Option<usize>) -> Result<usize, CliError> {
    match std::env::var("BUBBLELAB_JOBS") {
        Ok(v) => v.trim().parse().map_err(|_| CliError::Config(format!("BUBBLELAB_JOBS: not a thread count: {v:?}"))),
        Err(_) => Ok(flag.unwrap_or(0)),
    }
}

fn main_inner(cli: Cli) -> Result<(), CliError> {
    let (command, args) = match cli.command {
        Cmd::Analyze(a) => (Command::Analyze, a),
        Cmd::Tree(a) => (Command::Tree, a),
        Cmd::Energy(a) => (Command::Energy, a),
        Cmd::Isoperimetry(a) => (Command::Isoperimetry, a),
        Cmd::Holder(a) => (Command::Holder, a),
    };
    let runner = RayonRunner::new(jobs(args.jobs)?).map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let inv = Invocation { command, config: args.config, out: args.out, tol: args.tol };
    let (dir, outputs) = execute(&inv, &runner)?;
    for (name, _) in &outputs.files {
        println!("{}", dir.join(name).display());
    }
    println!("{}", dir.join("run.json").display());
    Ok(())
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
