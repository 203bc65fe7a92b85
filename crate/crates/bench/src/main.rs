use std::fs;
use std::path::PathBuf;
use std::time::Duration;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use vecplan_bench::output::{write_cdf_csv, write_metadata, write_runs_csv, write_summary_csv};
use vecplan_bench::problem::{load_problem_set_with, LoadOverrides};
use vecplan_bench::run::{run_benchmark, PlannerKind, RunOptions};
use vecplan_bench::stats::{summarize_stats, TableRow, TABLE_HEADER};
use vecplan_bench::throughput::{measure_throughput, sample_states};
use vecplan_core::collision::{CheckContext, Environment};
use vecplan_core::robot::Robot;
use vecplan_core::simplify::SimplifySettings;
use vecplan_core::vector::LANES;

#[derive(Parser)]
#[command(
    name = "vecplan",
    version,
    about = "Run vectorized motion planners on problem sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan every problem in a set and write run records and statistics.
    Plan(PlanArgs),
    /// Measure batched state validation throughput, single lane vs full width.
    Throughput(ThroughputArgs),
}

#[derive(Args)]
struct PlanArgs {
    /// Robot URDF; defaults to the one named in the problem file.
    #[arg(long)]
    robot: Option<PathBuf>,
    /// Sphere model; defaults to the one named in the problem file.
    #[arg(long)]
    spheres: Option<PathBuf>,
    #[arg(long)]
    problems: PathBuf,
    #[arg(long, value_enum, default_value = "rrtc")]
    planner: PlannerKind,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    /// Iteration cap (sampler draws).
    #[arg(long)]
    iters: Option<u64>,
    #[arg(long)]
    resolution: Option<f32>,
    #[arg(long)]
    range: Option<f32>,
    /// Shortcut and smooth every solution.
    #[arg(long)]
    simplify: bool,
    /// Use single-lane blocks.
    #[arg(long)]
    scalar: bool,
    /// Output directory for runs.csv, summary.csv, cdf.csv and metadata.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ThroughputArgs {
    #[arg(long)]
    robot: PathBuf,
    #[arg(long)]
    spheres: PathBuf,
    #[arg(long)]
    env: PathBuf,
    #[arg(long, default_value_t = 4096)]
    states: usize,
    /// Seconds to spend on each lane width.
    #[arg(long, default_value_t = 1.0)]
    seconds: f64,
}

fn plan(args: PlanArgs) -> Result<()> {
    let overrides = LoadOverrides {
        robot: args.robot,
        spheres: args.spheres,
    };
    let set = load_problem_set_with(&args.problems, &overrides)?;
    let mut settings = set.doc.settings.clone();
    if let Some(n) = args.iters {
        settings.max_iterations = n;
    }
    if let Some(r) = args.resolution {
        settings.resolution = r;
    }
    if let Some(r) = args.range {
        settings.range = r;
    }
    settings.check()?;
    let simplify = args.simplify.then(|| SimplifySettings {
        resolution: settings.resolution,
        rake_direction: settings.rake_direction,
        ..SimplifySettings::default()
    });
    let options = RunOptions {
        planner: args.planner,
        trials: args.trials,
        settings,
        simplify,
        scalar: args.scalar,
    };

    let records = run_benchmark(&set, &options)?;
    let summary = summarize_stats(&records)?;
    println!(
        "{} problems x {} trials, planner {}, {} lanes",
        set.problems.len(),
        options.trials,
        options.planner.name(),
        options.lanes()
    );
    println!("{}", TABLE_HEADER.join(" | "));
    println!("{}", TableRow::from(&summary));

    if let Some(dir) = args.out {
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        write_runs_csv(&dir.join("runs.csv"), &records, &options)?;
        write_summary_csv(&dir.join("summary.csv"), &summary, &options)?;
        write_cdf_csv(&dir.join("cdf.csv"), &records)?;
        write_metadata(
            &dir.join("metadata.json"),
            &args.problems.display().to_string(),
            &options,
        )?;
        println!("wrote {}", dir.display());
    }
    Ok(())
}

fn throughput(args: ThroughputArgs) -> Result<()> {
    let read =
        |p: &PathBuf| fs::read_to_string(p).with_context(|| format!("reading {}", p.display()));
    let robot = Robot::from_documents(&read(&args.robot)?, &read(&args.spheres)?)?;
    let env = Environment::from_json(&read(&args.env)?)?;
    let ctx = CheckContext {
        robot: &robot,
        env: &env,
    };
    let states = sample_states(ctx, args.states);
    let time = Duration::from_secs_f64(args.seconds);
    let scalar = measure_throughput::<1>(ctx, &states, time);
    let wide = measure_throughput::<LANES>(ctx, &states, time);
    println!("valid fraction: {:.3}", wide.valid_fraction);
    for t in [&scalar, &wide] {
        println!(
            "{:>2} lanes: {:>12.0} states/s",
            t.lanes,
            t.states_per_second()
        );
    }
    println!(
        "speedup: {:.2}x",
        wide.states_per_second() / scalar.states_per_second()
    );
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Plan(args) => plan(args),
        Command::Throughput(args) => throughput(args),
    }
}
