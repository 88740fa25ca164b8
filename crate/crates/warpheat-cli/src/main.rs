use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use warpheat::scenario::{self, ExampleId, Scenario};
use warpheat::Error;

#[derive(Parser)]
#[command(
    name = "warpheat",
    about = "Numerical lab for the parabolic Schrödinger equation on rotationally symmetric manifolds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Output directory for report.json and CSV tables
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override the grid cell count
    #[arg(long)]
    grid_n: Option<usize>,
    /// Override the grid outer radius
    #[arg(long)]
    radius: Option<f64>,
    /// Override the time step
    #[arg(long)]
    dt: Option<f64>,
    /// Seed for randomized invariant probes
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario from a JSON config
    Run {
        config: PathBuf,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Run a canned reproduction of a worked example
    Reproduce {
        /// ex71a | ex71b | ex72 | ex73 | ex74 | ex75
        example: String,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Residual verification of the stationary profile only
    VerifyStationary {
        config: PathBuf,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Eigenvalue sweep only
    Spectrum {
        config: PathBuf,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Parabolic evolution only
    Evolve {
        config: PathBuf,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Weighted-integral and verdict analysis only
    UniquenessCheck {
        config: PathBuf,
        #[command(flatten)]
        opts: CommonOpts,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::BadConfig(_) | Error::UnknownExample(_) | Error::Json(_) => {
                    ExitCode::from(2)
                }
                _ => ExitCode::from(3),
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run { config, opts } => {
            let scenario = load(&config, &opts)?;
            execute(&scenario, &opts)
        }
        Command::Reproduce { example, opts } => {
            let id: ExampleId = example.parse()?;
            let mut scenario = scenario::reproduce(id);
            apply_overrides(&mut scenario, &opts);
            execute(&scenario, &opts)
        }
        Command::VerifyStationary { config, opts } => {
            let mut scenario = load(&config, &opts)?;
            scenario.analyses = vec!["stationary".into()];
            execute(&scenario, &opts)
        }
        Command::Spectrum { config, opts } => {
            let mut scenario = load(&config, &opts)?;
            scenario.analyses = vec!["spectrum".into()];
            execute(&scenario, &opts)
        }
        Command::Evolve { config, opts } => {
            let mut scenario = load(&config, &opts)?;
            scenario.analyses = vec!["evolve".into()];
            execute(&scenario, &opts)
        }
        Command::UniquenessCheck { config, opts } => {
            let mut scenario = load(&config, &opts)?;
            let keep: Vec<String> = scenario
                .analyses
                .iter()
                .filter(|a| *a == "evolve" || *a == "uniqueness")
                .cloned()
                .collect();
            scenario.analyses = if keep.iter().any(|a| a == "uniqueness") {
                keep
            } else {
                let mut v = keep;
                v.push("uniqueness".into());
                v
            };
            execute(&scenario, &opts)
        }
    }
}

fn load(path: &PathBuf, opts: &CommonOpts) -> Result<Scenario, Error> {
    let text = std::fs::read_to_string(path)?;
    let mut scenario = Scenario::from_json(&text)?;
    apply_overrides(&mut scenario, opts);
    Ok(scenario)
}

fn apply_overrides(scenario: &mut Scenario, opts: &CommonOpts) {
    if let Some(n) = opts.grid_n {
        scenario.grid.cells = n;
    }
    if let Some(r) = opts.radius {
        scenario.grid.radius = r;
    }
    if let Some(dt) = opts.dt {
        if let Some(time) = scenario.time.as_mut() {
            time.dt = dt;
        }
    }
    if let Some(seed) = opts.seed {
        scenario.seed = seed;
    }
}

fn execute(scenario: &Scenario, opts: &CommonOpts) -> Result<(), Error> {
    use std::io::Write;
    let report = scenario::run_to_dir(scenario, &opts.out)?;
    // best-effort status lines: a closed pipe must not turn into a panic
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let _ = writeln!(
        out,
        "scenario '{}' complete; report written to {}",
        report.scenario,
        opts.out.join("report.json").display()
    );
    if let Some(u) = &report.uniqueness {
        let _ = writeln!(
            out,
            "uniqueness: condition {} p={} finite={} theorem={:?} verdict: {}",
            u.report.condition_id, u.report.p, u.report.finite, u.report.theorem, u.report.verdict
        );
    }
    if let Some(s) = &report.spectrum {
        let _ = writeln!(out, "spectral bottom (extrapolated): {:.6e}", s.extrapolated);
    }
    Ok(())
}
