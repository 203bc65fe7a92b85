//! Deterministic sampling-based planners over the batch primitives.

mod prm;
mod rrtc;

pub use prm::prm;
pub use rrtc::rrt_connect;

use serde::{Deserialize, Serialize};

use crate::collision::{BlockValidator, CheckContext, ValidateOptions, ValidationStats};
use crate::error::{Error, Result};
use crate::motion::{validate_motion_rake, RakeDirection};
use crate::vector::{l2_distance, Configuration};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerSettings {
    /// Motion checking resolution, configuration-space units per state.
    pub resolution: f32,
    /// Longest RRT-Connect extension.
    pub range: f32,
    /// Cap on sampler draws.
    pub max_iterations: u64,
    pub prm_k: usize,
    /// Samples per PRM round.
    pub prm_batch: usize,
    pub rake_direction: RakeDirection,
    /// Coarse-sphere pruning; never changes results, only speed.
    pub pruning: bool,
}

impl Default for PlannerSettings {
    fn default() -> Self {
        Self {
            resolution: 0.02,
            range: 2.0,
            max_iterations: 1_000_000,
            prm_k: 8,
            prm_batch: 128,
            rake_direction: RakeDirection::Forward,
            pruning: true,
        }
    }
}

impl PlannerSettings {
    pub fn check(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidSettings(msg.to_string()));
        if !(self.resolution > 0.0 && self.resolution.is_finite()) {
            return bad("resolution must be positive");
        }
        if !(self.range > 0.0 && self.range.is_finite()) {
            return bad("range must be positive");
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be positive");
        }
        if self.prm_k == 0 || self.prm_batch == 0 {
            return bad("prm_k and prm_batch must be positive");
        }
        Ok(())
    }
}

/// Start and goal in a given robot and environment.
#[derive(Debug, Clone)]
pub struct PlanningProblem<'a> {
    pub ctx: CheckContext<'a>,
    pub start: Configuration,
    pub goal: Configuration,
}

/// Piecewise-linear path in configuration space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Path {
    pub waypoints: Vec<Configuration>,
}

impl Path {
    pub fn new(waypoints: Vec<Configuration>) -> Result<Self> {
        if waypoints.len() < 2 {
            return Err(Error::TooFewWaypoints(waypoints.len()));
        }
        Ok(Self { waypoints })
    }

    /// Sum of segment lengths, accumulated in `f64`.
    pub fn cost(&self) -> f64 {
        self.waypoints
            .windows(2)
            .map(|w| l2_distance(&w[0], &w[1]).expect("waypoints share a dimension") as f64)
            .sum()
    }

    pub fn len(&self) -> usize {
        self.waypoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.waypoints.is_empty()
    }

    pub fn first(&self) -> &Configuration {
        &self.waypoints[0]
    }

    pub fn last(&self) -> &Configuration {
        &self.waypoints[self.waypoints.len() - 1]
    }

    pub fn bitwise_eq(&self, other: &Path) -> bool {
        self.len() == other.len()
            && self
                .waypoints
                .iter()
                .zip(&other.waypoints)
                .all(|(a, b)| a.bitwise_eq(b))
    }
}

/// What a planner run produced. `path` is `None` when the iteration budget
/// ran out.
#[derive(Debug, Clone)]
pub struct PlanReport {
    pub path: Option<Path>,
    pub iterations: u64,
    /// Total vertices across all trees or the roadmap.
    pub vertices: usize,
    pub validation: ValidationStats,
}

impl PlanReport {
    pub fn solved(&self) -> bool {
        self.path.is_some()
    }
}

/// Checks settings, dimensions, limits and endpoint validity, returning a
/// validator ready for planning.
pub(crate) fn setup<'a, const W: usize>(
    problem: &PlanningProblem<'a>,
    settings: &PlannerSettings,
) -> Result<BlockValidator<'a, W>> {
    settings.check()?;
    let robot = problem.ctx.robot;
    for (which, q) in [("start", &problem.start), ("goal", &problem.goal)] {
        crate::error::check_dim(robot.dof(), q.dim())?;
        if !robot.within_limits(q) {
            return Err(Error::OutOfLimits { which });
        }
    }
    let options = ValidateOptions {
        pruning: settings.pruning,
        reject_all: false,
    };
    let mut validator = BlockValidator::new(problem.ctx, options);
    for (which, q) in [("start", &problem.start), ("goal", &problem.goal)] {
        if !validator.validate_config(q)? {
            return Err(Error::InvalidEndpoint { which });
        }
    }
    Ok(validator)
}

/// Point at fraction `t` along `from -> to`, in the same weighted form as
/// the motion interpolation.
pub(crate) fn steer(from: &Configuration, to: &Configuration, t: f32) -> Configuration {
    let w0 = 1.0 - t;
    let values = from
        .values()
        .iter()
        .zip(to.values())
        .map(|(&a, &b)| w0 * a + t * b)
        .collect();
    Configuration::new(values).expect("interpolation of finite values is finite")
}

/// Re-checks every segment of `path` from scratch.
pub fn check_path<const W: usize>(
    ctx: CheckContext<'_>,
    path: &Path,
    resolution: f32,
    direction: RakeDirection,
) -> Result<bool> {
    let mut validator = BlockValidator::<W>::new(ctx, ValidateOptions::default());
    if !validator.validate_config(path.first())? {
        return Ok(false);
    }
    for w in path.waypoints.windows(2) {
        if !validate_motion_rake(&mut validator, &w[0], &w[1], resolution, direction)? {
            return Ok(false);
        }
    }
    Ok(true)
}
