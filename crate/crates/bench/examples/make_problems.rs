//! Regenerates the bundled arm problem sets.
//!
//! Run from the repository root:
//! `cargo run --release -p vecplan-bench --example make_problems`

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vecplan_bench::problem::{save_problem_set, EnvironmentRef, ProblemSetDoc, ProblemSpec};
use vecplan_core::collision::{BlockValidator, CheckContext, Environment, ValidateOptions};
use vecplan_core::motion::{validate_motion_rake, RakeDirection};
use vecplan_core::planners::{prm, rrt_connect, PlannerSettings, PlanningProblem};
use vecplan_core::robot::Robot;
use vecplan_core::trace::trace_kinematics;
use vecplan_core::vector::Configuration;

const PER_SET: usize = 10;

/// Axis-aligned box the hand must end up in, if any.
type Region = Option<([f32; 3], [f32; 3])>;

fn main() {
    let root = Path::new("data");
    let urdf = std::fs::read_to_string(root.join("robots/synth7.urdf")).unwrap();
    let spheres = std::fs::read_to_string(root.join("robots/synth7_spheres.json")).unwrap();
    let robot = Robot::from_documents(&urdf, &spheres).unwrap();
    let graph = trace_kinematics(&robot.tree, &robot.model).unwrap();
    let hand = robot.tree.link_index("hand").unwrap();
    let hand_center = |q: &Configuration| {
        let outs = graph.outputs();
        let pos = graph.sphere_positions(q.values());
        let (sum, n) = outs
            .iter()
            .zip(&pos)
            .filter(|(o, _)| o.sphere.link == hand)
            .fold(([0.0f32; 3], 0), |(s, n), (_, p)| {
                ([s[0] + p[0], s[1] + p[1], s[2] + p[2]], n + 1)
            });
        sum.map(|v| v / n as f32)
    };

    let sets: [(&str, u64, Region); 3] = [
        ("table", 11, Some(([0.3, -0.45, 0.16], [0.8, 0.45, 0.4]))),
        ("shelf", 12, Some(([0.62, -0.4, 0.2], [0.86, 0.4, 0.7]))),
        ("cage", 13, None),
    ];
    let limits = robot.limits();
    for (name, seed, region) in sets {
        let env_rel = format!("../envs/{name}.json");
        let env = Environment::from_json(
            &std::fs::read_to_string(root.join(format!("envs/{name}.json"))).unwrap(),
        )
        .unwrap();
        let ctx = CheckContext {
            robot: &robot,
            env: &env,
        };
        let mut validator = BlockValidator::<8>::new(ctx, ValidateOptions::default());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sample = |validator: &mut BlockValidator<8>, want_region: bool| loop {
            let q = Configuration::new(
                limits
                    .iter()
                    .map(|&[lo, hi]| rng.gen_range(lo..hi) as f32)
                    .collect(),
            )
            .unwrap();
            if !validator.validate_config(&q).unwrap() {
                continue;
            }
            if let (true, Some((lo, hi))) = (want_region, region) {
                let c = hand_center(&q);
                if !(0..3).all(|i| lo[i] <= c[i] && c[i] <= hi[i]) {
                    continue;
                }
            }
            return q;
        };

        // Both planners must solve a candidate within these budgets. The PRM
        // budget is tighter because its linear-scan neighbor queries make
        // long runs quadratic.
        let settings = PlannerSettings {
            max_iterations: 200_000,
            ..Default::default()
        };
        let prm_settings = PlannerSettings {
            max_iterations: 20_000,
            ..Default::default()
        };
        let mut problems = Vec::new();
        let mut attempts = 0;
        while problems.len() < PER_SET {
            attempts += 1;
            let start = sample(&mut validator, false);
            let goal = sample(&mut validator, true);
            let direct = validate_motion_rake(
                &mut validator,
                &start,
                &goal,
                settings.resolution,
                RakeDirection::Forward,
            )
            .unwrap();
            if direct {
                continue;
            }
            let problem = PlanningProblem {
                ctx,
                start: start.clone(),
                goal: goal.clone(),
            };
            let report = rrt_connect::<8>(&problem, &settings).unwrap();
            if !report.solved() {
                println!(
                    "{name}: dropping candidate unsolved by rrtc after {} iterations",
                    report.iterations
                );
                continue;
            }
            if !prm::<8>(&problem, &prm_settings).unwrap().solved() {
                println!("{name}: dropping candidate unsolved by prm");
                continue;
            }
            problems.push(ProblemSpec {
                id: format!("{name}-{:02}", problems.len()),
                environment: EnvironmentRef::File(env_rel.clone()),
                start,
                goal,
            });
        }
        let doc = ProblemSetDoc {
            robot: "../robots/synth7.urdf".into(),
            spheres: "../robots/synth7_spheres.json".into(),
            settings: PlannerSettings::default(),
            problems,
        };
        let out = root.join(format!("problems/arm_{name}.json"));
        save_problem_set(&doc, &out).unwrap();
        println!(
            "{name}: {PER_SET} problems from {attempts} candidates -> {}",
            out.display()
        );
    }
}
