//! Problem set files.
//!
//! ```json
//! {
//!   "robot": "../robots/synth7.urdf",
//!   "spheres": "../robots/synth7_spheres.json",
//!   "settings": { "range": 2.0, "resolution": 0.02 },
//!   "problems": [
//!     { "id": "table-00", "environment": "../envs/table.json",
//!       "start": [0, -0.78, 0, -2.35, 0, 1.57, 0.78], "goal": [...] }
//!   ]
//! }
//! ```
//!
//! Relative paths are resolved against the directory of the problem file.
//! `environment` may also be an inline environment document. `settings` is
//! optional and overrides the planner defaults field by field.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use vecplan_core::collision::Environment;
use vecplan_core::planners::PlannerSettings;
use vecplan_core::robot::Robot;
use vecplan_core::vector::Configuration;

use crate::BenchError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EnvironmentRef {
    File(String),
    Inline(Environment),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub id: String,
    pub environment: EnvironmentRef,
    pub start: Configuration,
    pub goal: Configuration,
}

/// The on-disk form of a problem set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSetDoc {
    pub robot: String,
    pub spheres: String,
    #[serde(default)]
    pub settings: PlannerSettings,
    pub problems: Vec<ProblemSpec>,
}

#[derive(Debug, Clone)]
pub struct Problem {
    pub id: String,
    pub environment: Environment,
    pub start: Configuration,
    pub goal: Configuration,
}

/// A problem set with the robot compiled and every environment loaded.
#[derive(Debug, Clone)]
pub struct ProblemSet {
    pub doc: ProblemSetDoc,
    pub robot: Robot,
    pub problems: Vec<Problem>,
}

/// Replacement robot files, e.g. from the command line.
#[derive(Debug, Clone, Default)]
pub struct LoadOverrides {
    pub robot: Option<PathBuf>,
    pub spheres: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String, BenchError> {
    fs::read_to_string(path).map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_problem_set(path: &Path) -> Result<ProblemSet, BenchError> {
    load_problem_set_with(path, &LoadOverrides::default())
}

pub fn load_problem_set_with(
    path: &Path,
    overrides: &LoadOverrides,
) -> Result<ProblemSet, BenchError> {
    let text = read(path)?;
    let doc: ProblemSetDoc = serde_json::from_str(&text).map_err(|e| BenchError::Schema {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    resolve(doc, base, overrides)
}

/// Resolves a document whose relative paths are anchored at `base`.
pub fn resolve(
    doc: ProblemSetDoc,
    base: &Path,
    overrides: &LoadOverrides,
) -> Result<ProblemSet, BenchError> {
    let robot_path = overrides
        .robot
        .clone()
        .unwrap_or_else(|| base.join(&doc.robot));
    let spheres_path = overrides
        .spheres
        .clone()
        .unwrap_or_else(|| base.join(&doc.spheres));
    let robot = Robot::from_documents(&read(&robot_path)?, &read(&spheres_path)?)?;
    doc.settings.check()?;

    let mut cache: BTreeMap<String, Environment> = BTreeMap::new();
    let mut problems = Vec::with_capacity(doc.problems.len());
    let mut issues = Vec::new();
    for spec in &doc.problems {
        let environment = match &spec.environment {
            EnvironmentRef::Inline(env) => env.clone(),
            EnvironmentRef::File(rel) => match cache.get(rel) {
                Some(env) => env.clone(),
                None => {
                    let env_path = base.join(rel);
                    let env = Environment::from_json(&read(&env_path)?).map_err(|e| {
                        BenchError::Schema {
                            path: env_path,
                            message: e.to_string(),
                        }
                    })?;
                    cache.insert(rel.clone(), env.clone());
                    env
                }
            },
        };
        for (which, q) in [("start", &spec.start), ("goal", &spec.goal)] {
            if q.dim() != robot.dof() {
                issues.push(format!(
                    "{}: {which} has {} values, robot has {} joints",
                    spec.id,
                    q.dim(),
                    robot.dof()
                ));
            } else if !robot.within_limits(q) {
                issues.push(format!(
                    "{}: {which} configuration is outside the joint limits",
                    spec.id
                ));
            }
        }
        problems.push(Problem {
            id: spec.id.clone(),
            environment,
            start: spec.start.clone(),
            goal: spec.goal.clone(),
        });
    }
    if !issues.is_empty() {
        return Err(BenchError::Validation(issues));
    }
    Ok(ProblemSet {
        doc,
        robot,
        problems,
    })
}

pub fn save_problem_set(doc: &ProblemSetDoc, path: &Path) -> Result<(), BenchError> {
    let text = serde_json::to_string_pretty(doc).expect("problem sets serialize");
    fs::write(path, text + "\n").map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })
}
