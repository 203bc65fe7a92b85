mod common;

use common::{arm, env, planar, sequential_motion_oracle};
use proptest::prelude::*;
use vecplan_core::collision::{CheckContext, Environment};
use vecplan_core::planners::{rrt_connect, Path, PlannerSettings, PlanningProblem};
use vecplan_core::simplify::{bspline_smooth, path_cost, shortcut, simplify, SimplifySettings};
use vecplan_core::vector::{Configuration, LANES};

fn path(points: &[[f32; 2]]) -> Path {
    Path::new(
        points
            .iter()
            .map(|p| Configuration::new(p.to_vec()).unwrap())
            .collect(),
    )
    .unwrap()
}

fn zigzag() -> Path {
    path(&[
        [-1.5, 0.0],
        [-1.0, 0.5],
        [-0.5, -0.5],
        [0.0, 0.5],
        [0.5, -0.5],
        [1.0, 0.5],
        [1.5, 0.0],
    ])
}

fn deviation(p: &Path) -> f32 {
    p.waypoints
        .iter()
        .map(|q| q.values()[1].abs())
        .fold(0.0, f32::max)
}

#[test]
fn smoothing_flattens_a_zigzag() {
    let robot = planar();
    let empty = Environment::empty("empty");
    let ctx = CheckContext {
        robot: &robot,
        env: &empty,
    };
    let input = zigzag();
    let mut last = deviation(&input);
    let mut last_cost = input.cost();
    for rounds in 1..=4 {
        let settings = SimplifySettings {
            smooth_rounds: rounds,
            ..Default::default()
        };
        let out = bspline_smooth::<LANES>(&input, ctx, &settings).unwrap();
        assert!(deviation(&out) < last, "round {rounds}");
        assert!(out.cost() <= last_cost);
        assert!(out.first().bitwise_eq(input.first()) && out.last().bitwise_eq(input.last()));
        last = deviation(&out);
        last_cost = out.cost();
    }
}

#[test]
fn shortcutting_straightens_free_space_paths() {
    let robot = planar();
    let empty = Environment::empty("empty");
    let ctx = CheckContext {
        robot: &robot,
        env: &empty,
    };
    let input = zigzag();
    let out = shortcut::<LANES>(&input, ctx, &SimplifySettings::default()).unwrap();
    assert!(out.cost() < 0.75 * input.cost());
    let none = SimplifySettings {
        shortcut_attempts: 0,
        ..Default::default()
    };
    assert!(shortcut::<LANES>(&input, ctx, &none)
        .unwrap()
        .bitwise_eq(&input));
}

#[test]
fn fixed_points() {
    let robot = planar();
    let empty = Environment::empty("empty");
    let ctx = CheckContext {
        robot: &robot,
        env: &empty,
    };
    let settings = SimplifySettings::default();
    let two = path(&[[0.1, 0.2], [-1.0, 1.3]]);
    assert!(simplify::<LANES>(&two, ctx, &settings)
        .unwrap()
        .bitwise_eq(&two));
    let line = path(&[[0.0, 0.0], [0.5, 0.0], [1.0, 0.0], [1.5, 0.0]]);
    assert!(bspline_smooth::<LANES>(&line, ctx, &settings)
        .unwrap()
        .bitwise_eq(&line));
    assert!(path_cost(&line).unwrap() == 1.5);
}

#[test]
fn planned_paths_only_get_shorter() {
    let cases = [
        (planar(), "wall_gap", vec![-1.5f32, -1.5], vec![1.5f32, 1.5]),
        (planar(), "pillars", vec![-1.8, 0.0], vec![1.8, 0.1]),
        (
            arm(),
            "table",
            vec![0.0, 0.0, 0.0, -1.5, 0.0, 1.5, 0.8],
            vec![1.2, 0.6, 0.3, -1.0, 0.4, 1.9, -0.3],
        ),
    ];
    for (robot, env_name, start, goal) in cases {
        let e = env(env_name);
        let ctx = CheckContext {
            robot: &robot,
            env: &e,
        };
        let problem = PlanningProblem {
            ctx,
            start: Configuration::new(start).unwrap(),
            goal: Configuration::new(goal).unwrap(),
        };
        let settings = PlannerSettings {
            range: 0.5,
            resolution: 0.01,
            ..Default::default()
        };
        let planned = rrt_connect::<LANES>(&problem, &settings)
            .unwrap()
            .path
            .unwrap();
        for seed in 0..5 {
            let s = SimplifySettings {
                seed,
                resolution: 0.01,
                ..Default::default()
            };
            let out = simplify::<LANES>(&planned, ctx, &s).unwrap();
            assert!(out.cost() <= planned.cost(), "{env_name} seed {seed}");
            assert!(
                out.first().bitwise_eq(planned.first()) && out.last().bitwise_eq(planned.last())
            );
            assert!(
                out.waypoints
                    .windows(2)
                    .all(|w| sequential_motion_oracle(ctx, &w[0], &w[1], 0.01)),
                "{env_name}"
            );
            assert!(out.bitwise_eq(&simplify::<1>(&planned, ctx, &s).unwrap()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_paths_keep_endpoints_and_never_lengthen(
        points in prop::collection::vec((-1.9f32..1.9, -1.9f32..1.9), 2..9),
        seed in any::<u64>(),
    ) {
        let robot = planar();
        let e = env("pillars");
        let ctx = CheckContext { robot: &robot, env: &e };
        let input = path(&points.iter().map(|&(x, y)| [x, y]).collect::<Vec<_>>());
        let out = simplify::<LANES>(&input, ctx, &SimplifySettings { seed, ..Default::default() }).unwrap();
        prop_assert!(out.cost() <= input.cost());
        prop_assert!(out.first().bitwise_eq(input.first()) && out.last().bitwise_eq(input.last()));
    }
}
