use std::time::Instant;

use vecplan_core::collision::CheckContext;
use vecplan_core::planners::{
    prm, rrt_connect, Path, PlanReport, PlannerSettings, PlanningProblem,
};
use vecplan_core::simplify::{simplify, SimplifySettings};
use vecplan_core::vector::LANES;

use crate::problem::{Problem, ProblemSet};
use crate::BenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PlannerKind {
    Rrtc,
    Prm,
}

impl PlannerKind {
    pub fn name(self) -> &'static str {
        match self {
            PlannerKind::Rrtc => "rrtc",
            PlannerKind::Prm => "prm",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub planner: PlannerKind,
    pub trials: usize,
    pub settings: PlannerSettings,
    /// Shortcut and smooth successful paths.
    pub simplify: Option<SimplifySettings>,
    /// Use single-lane blocks instead of [`LANES`].
    pub scalar: bool,
}

impl RunOptions {
    pub fn lanes(&self) -> usize {
        if self.scalar {
            1
        } else {
            LANES
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub problem_id: String,
    pub trial: usize,
    pub success: bool,
    pub planning_ns: u64,
    pub simplify_ns: u64,
    pub initial_cost: Option<f64>,
    pub simplified_cost: Option<f64>,
    pub iterations: u64,
    pub vertices: usize,
    pub path: Option<Path>,
    pub simplified: Option<Path>,
}

fn plan_lanes<const W: usize>(
    kind: PlannerKind,
    problem: &PlanningProblem<'_>,
    settings: &PlannerSettings,
) -> vecplan_core::error::Result<PlanReport> {
    match kind {
        PlannerKind::Rrtc => rrt_connect::<W>(problem, settings),
        PlannerKind::Prm => prm::<W>(problem, settings),
    }
}

fn simplify_lanes<const W: usize>(
    path: &Path,
    ctx: CheckContext<'_>,
    settings: &SimplifySettings,
) -> vecplan_core::error::Result<Path> {
    simplify::<W>(path, ctx, settings)
}

/// Plans one problem once. Only the planner call is timed; the robot was
/// compiled when the set was loaded.
pub fn run_once(
    set: &ProblemSet,
    problem: &Problem,
    trial: usize,
    options: &RunOptions,
) -> Result<RunRecord, BenchError> {
    let ctx = CheckContext {
        robot: &set.robot,
        env: &problem.environment,
    };
    let planning = PlanningProblem {
        ctx,
        start: problem.start.clone(),
        goal: problem.goal.clone(),
    };

    let started = Instant::now();
    let report = if options.scalar {
        plan_lanes::<1>(options.planner, &planning, &options.settings)
    } else {
        plan_lanes::<LANES>(options.planner, &planning, &options.settings)
    }
    .map_err(|e| BenchError::Problem {
        id: problem.id.clone(),
        source: e,
    })?;
    let planning_ns = started.elapsed().as_nanos() as u64;

    let mut simplify_ns = 0;
    let mut simplified = None;
    if let (Some(path), Some(settings)) = (&report.path, &options.simplify) {
        let started = Instant::now();
        let out = if options.scalar {
            simplify_lanes::<1>(path, ctx, settings)
        } else {
            simplify_lanes::<LANES>(path, ctx, settings)
        }
        .map_err(|e| BenchError::Problem {
            id: problem.id.clone(),
            source: e,
        })?;
        simplify_ns = started.elapsed().as_nanos() as u64;
        simplified = Some(out);
    }

    Ok(RunRecord {
        problem_id: problem.id.clone(),
        trial,
        success: report.solved(),
        planning_ns,
        simplify_ns,
        initial_cost: report.path.as_ref().map(Path::cost),
        simplified_cost: simplified.as_ref().map(Path::cost),
        iterations: report.iterations,
        vertices: report.vertices,
        path: report.path,
        simplified,
    })
}

/// Every problem, `trials` times each, in `(problem, trial)` order. Each run
/// starts from a fresh sampler, so only the timings differ between trials.
pub fn run_benchmark(set: &ProblemSet, options: &RunOptions) -> Result<Vec<RunRecord>, BenchError> {
    let mut records = Vec::with_capacity(set.problems.len() * options.trials);
    for problem in &set.problems {
        for trial in 0..options.trials {
            records.push(run_once(set, problem, trial, options)?);
        }
    }
    Ok(records)
}
