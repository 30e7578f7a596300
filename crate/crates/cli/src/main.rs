//! `coco` -- run, sweep and verify constrained online convex optimization
//! experiments from a JSON config, with command-line overrides.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 configuration
//! error, 3 numerical failure during a run.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use coco_core::error::Error;
use coco_core::harness::{cmd_run, cmd_sweep, cmd_verify, ExperimentConfig, PolicyChoice};
use coco_core::instances::{CostMode, Family};

#[derive(Parser)]
#[command(
    name = "coco",
    version,
    about = "constrained online convex optimization lab"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run each (seed, horizon) once and write full per-run artifacts.
    Run(CommonArgs),
    /// Run a horizon sweep and write aggregated medians plus power-law fits.
    Sweep(CommonArgs),
    /// Run the family-relevant bound checks and write verify.json.
    Verify(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Override the horizon list (comma separated).
    #[arg(long = "T", value_delimiter = ',')]
    horizons: Option<Vec<usize>>,
    /// Override the seed list (comma separated).
    #[arg(long, value_delimiter = ',')]
    seed: Option<Vec<u64>>,
    /// Override the policy: sinha | proj_ogd | switch.
    #[arg(long)]
    policy: Option<String>,
    /// Override the instance family (family defaults apply).
    #[arg(long)]
    family: Option<String>,
    /// Override the dimension.
    #[arg(long)]
    dim: Option<usize>,
    /// Override the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn default_family(name: &str) -> Result<Family, Error> {
    Ok(match name {
        "nested_balls" => Family::NestedBalls {
            diameter: 2.0,
            shrink: 0.5,
            cost_mode: CostMode::Zero,
        },
        "nested_boxes" => Family::NestedBoxes {
            diameter: 2.0,
            shrink: 0.5,
            cost_mode: CostMode::Zero,
        },
        "worst_case_d1" => Family::WorstCaseD1 { a: 4.0, c: 10.0 },
        "ocs_random" => Family::OcsRandom { diameter: 2.0 },
        "monotone_2d" => Family::Monotone2d {
            diameter: 2.0,
            step: 1e-4,
        },
        "rotating_polytope" => Family::RotatingPolytope {
            diameter: 2.0,
            rotation_step: 1e-3,
            slab_frac: 0.01,
        },
        other => {
            return Err(Error::InvalidConfig(format!(
                "family: unknown value `{other}`"
            )))
        }
    })
}

fn apply_overrides(config: &mut ExperimentConfig, args: &CommonArgs) -> Result<(), Error> {
    if let Some(horizons) = &args.horizons {
        if horizons.is_empty() {
            return Err(Error::InvalidConfig("--T needs at least one value".into()));
        }
        config.t_sweep = horizons.clone();
        config.generator.horizon = horizons[0];
    }
    if let Some(seeds) = &args.seed {
        config.seeds = seeds.clone();
    }
    if let Some(policy) = &args.policy {
        config.policy = policy.parse::<PolicyChoice>()?;
    }
    if let Some(family) = &args.family {
        config.generator.family = default_family(family)?;
    }
    if let Some(dim) = args.dim {
        config.generator.d = dim;
    }
    if let Some(out) = &args.out {
        config.out_dir = out.clone();
    }
    Ok(())
}

fn load(args: &CommonArgs) -> Result<ExperimentConfig, Error> {
    let mut config = ExperimentConfig::from_path(&args.config)?;
    apply_overrides(&mut config, args)?;
    Ok(config)
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::InvalidConfig(_) | Error::Json(_) | Error::DegenerateInput(_) => 2,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, action): (&CommonArgs, fn(&ExperimentConfig) -> Result<u8, Error>) =
        match &cli.command {
            Command::Run(a) => (a, |c| cmd_run(c).map(|()| 0)),
            Command::Sweep(a) => (a, |c| cmd_sweep(c).map(|()| 0)),
            Command::Verify(a) => (a, |c| cmd_verify(c).map(|ok| if ok { 0 } else { 1 })),
        };
    let config = match load(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match action(&config) {
        Ok(code) => {
            if code == 1 {
                eprintln!("verification failed; see verify.json");
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
