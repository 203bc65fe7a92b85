mod common;

use std::time::{Duration, Instant};

use common::{arm, link_poses, optimized_graph, planar, random_config, rng, sphere_center};
use proptest::prelude::*;
use vecplan_core::robot::Robot;
use vecplan_core::trace::{
    evaluate_program, optimize_graph, trace_kinematics, CheckMarker, Flow, ProgramScratch,
    TraceGraph, TraceOp,
};
use vecplan_core::vector::{soa_from_aos, Configuration, LANES};

/// Largest per-coordinate gap between the lane-wide program and the
/// matrix-chain oracle over `count` random configurations.
fn fk_max_error(robot: &Robot, count: usize, seed: u64) -> f64 {
    let mut rng = rng(seed);
    let configs: Vec<Configuration> = (0..count).map(|_| random_config(robot, &mut rng)).collect();
    let mut scratch = ProgramScratch::<LANES>::new(&robot.program);
    let mut worst = 0.0f64;
    for chunk in configs.chunks(LANES) {
        let block = soa_from_aos::<LANES>(chunk).unwrap();
        let poses: Vec<_> = chunk
            .iter()
            .map(|q| {
                link_poses(
                    robot,
                    &q.values().iter().map(|&v| v as f64).collect::<Vec<_>>(),
                )
            })
            .collect();
        let mut sink = |m: &CheckMarker, c: [&[f32; LANES]; 3]| {
            for (k, p) in poses.iter().enumerate() {
                let want = sphere_center(robot, p, m.sphere);
                for i in 0..3 {
                    worst = worst.max((c[i][k] as f64 - want[i]).abs());
                }
            }
            Flow::Continue
        };
        assert!(evaluate_program(&robot.program, &block, &mut scratch, &mut sink).unwrap());
    }
    worst
}

#[test]
fn arm_program_matches_matrix_chain() {
    let started = Instant::now();
    let err = fk_max_error(&arm(), 10_000, 1);
    let elapsed = started.elapsed();
    assert!(err <= 1e-4, "max error {err}");
    assert!(elapsed < Duration::from_secs(10), "{elapsed:?}");
}

#[test]
fn planar_program_matches_matrix_chain() {
    assert!(fk_max_error(&planar(), 1_000, 2) <= 1e-6);
}

#[test]
fn program_checks_every_sphere_once() {
    let robot = arm();
    let coarse = (0..robot.model.link_count())
        .filter(|&l| robot.model.coarse(l).is_some())
        .count();
    assert_eq!(robot.program.coarse_count(), coarse);
    assert_eq!(robot.program.fine_count(), robot.model.fine_count());
}

fn max_output_gap(a: &TraceGraph, b: &TraceGraph, q: &[f32]) -> f32 {
    a.sphere_positions(q)
        .iter()
        .zip(b.sphere_positions(q))
        .flat_map(|(x, y)| (0..3).map(move |i| (x[i] - y[i]).abs()))
        .fold(0.0, f32::max)
}

#[test]
fn optimizer_preserves_arm_kinematics() {
    let robot = arm();
    let raw = trace_kinematics(&robot.tree, &robot.model).unwrap();
    let opt = optimize_graph(&raw);
    assert!(opt.len() <= raw.len());
    assert_eq!(optimize_graph(&opt), opt);
    assert_eq!(opt, optimized_graph(&robot));
    let mut rng = rng(3);
    for _ in 0..1000 {
        let q = random_config(&robot, &mut rng);
        let gap = max_output_gap(&raw, &opt, q.values());
        assert!(gap <= 1e-6, "gap {gap} at {:?}", q.values());
    }
}

/// Random DAG over `dof` inputs with a few repeated subexpressions and
/// foldable constants, and one output per node triple at the tail.
fn random_graph(dof: usize, ops: &[(u8, u16, u16, i8)]) -> TraceGraph {
    let mut g = TraceGraph::new(dof);
    let mut ids = Vec::new();
    for j in 0..dof {
        ids.push(g.push(TraceOp::Input(j as u32)));
    }
    for c in [0.0, 1.0, 0.5] {
        ids.push(g.push(TraceOp::Const(c)));
    }
    for &(kind, a, b, c) in ops {
        let a = ids[a as usize % ids.len()];
        let b = ids[b as usize % ids.len()];
        let op = match kind % 8 {
            0 => TraceOp::Add(a, b),
            1 => TraceOp::Sub(a, b),
            2 => TraceOp::Mul(a, b),
            3 => TraceOp::Neg(a),
            4 => TraceOp::Sin(a),
            5 => TraceOp::Cos(a),
            6 => TraceOp::Const(c as f32 / 8.0),
            _ => TraceOp::Sub(a, a),
        };
        ids.push(g.push(op));
    }
    let tail = &ids[ids.len().saturating_sub(6)..];
    for (i, w) in tail.chunks_exact(3).enumerate() {
        let sphere = vecplan_core::trace::SphereRef {
            link: i,
            level: vecplan_core::trace::SphereLevel::Fine(0),
        };
        g.add_output(sphere, [w[0], w[1], w[2]], 0.1);
    }
    g
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn optimizer_sound_on_random_graphs(
        ops in prop::collection::vec((any::<u8>(), any::<u16>(), any::<u16>(), any::<i8>()), 6..60),
        q in prop::collection::vec(-3.0f32..3.0, 3),
    ) {
        let g = random_graph(3, &ops);
        let opt = optimize_graph(&g);
        prop_assert!(opt.len() <= g.len());
        prop_assert_eq!(&optimize_graph(&opt), &opt);
        for (x, y) in g.sphere_positions(&q).iter().zip(opt.sphere_positions(&q)) {
            for i in (0..3).filter(|&i| x[i].is_finite()) {
                let tol = 1e-6 * x[i].abs().max(1.0);
                prop_assert!((x[i] - y[i]).abs() <= tol, "{} vs {}", x[i], y[i]);
            }
        }
    }
}
