//! Fixtures and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use nalgebra::{Isometry3, Point3, Translation3, Unit, UnitQuaternion, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vecplan_core::collision::{
    BlockValidator, CheckContext, Environment, Primitive, ValidateOptions,
};
use vecplan_core::motion::discretization_count;
use vecplan_core::robot::{JointKind, Robot};
use vecplan_core::trace::{optimize_graph, trace_kinematics, SphereLevel, SphereRef, TraceGraph};
use vecplan_core::vector::{interpolate_step, Configuration};

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn read(rel: &str) -> String {
    std::fs::read_to_string(data_dir().join(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

pub fn arm() -> Robot {
    Robot::from_documents(
        &read("robots/synth7.urdf"),
        &read("robots/synth7_spheres.json"),
    )
    .unwrap()
}

pub fn planar() -> Robot {
    Robot::from_documents(
        &read("robots/planar2.urdf"),
        &read("robots/planar2_spheres.json"),
    )
    .unwrap()
}

pub fn env(name: &str) -> Environment {
    Environment::from_json(&read(&format!("envs/{name}.json"))).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform configuration inside the joint limits.
pub fn random_config(robot: &Robot, rng: &mut impl Rng) -> Configuration {
    let values = robot
        .limits()
        .iter()
        .map(|&[lo, hi]| rng.gen_range(lo..=hi) as f32)
        .collect();
    Configuration::new(values).unwrap()
}

pub fn optimized_graph(robot: &Robot) -> TraceGraph {
    optimize_graph(&trace_kinematics(&robot.tree, &robot.model).unwrap())
}

/// World pose of every link from a plain chain of homogeneous transforms.
pub fn link_poses(robot: &Robot, q: &[f64]) -> Vec<Isometry3<f64>> {
    let mut poses = vec![Isometry3::identity(); robot.tree.links().len()];
    for joint in robot.tree.joints() {
        let spec = &joint.spec;
        let [r, p, y] = spec.origin.rpy;
        let origin = Isometry3::from_parts(
            Translation3::from(Vector3::from(spec.origin.xyz)),
            UnitQuaternion::from_euler_angles(r, p, y),
        );
        let axis = Vector3::from(spec.axis);
        let motion = match (spec.kind, joint.dof_index) {
            (JointKind::Revolute | JointKind::Continuous, Some(i)) => Isometry3::from_parts(
                Translation3::identity(),
                UnitQuaternion::from_axis_angle(&Unit::new_normalize(axis), q[i]),
            ),
            (JointKind::Prismatic, Some(i)) => {
                Isometry3::from_parts(Translation3::from(axis * q[i]), UnitQuaternion::identity())
            }
            _ => Isometry3::identity(),
        };
        poses[joint.child] = poses[joint.parent] * origin * motion;
    }
    poses
}

/// World center of a model sphere under the matrix-chain FK.
pub fn sphere_center(robot: &Robot, poses: &[Isometry3<f64>], sphere: SphereRef) -> [f64; 3] {
    let local = match sphere.level {
        SphereLevel::Coarse => robot.model.coarse(sphere.link).unwrap().center,
        SphereLevel::Fine(k) => robot.model.fine(sphere.link)[k].center,
    };
    let p = poses[sphere.link] * Point3::from(local);
    [p.x, p.y, p.z]
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn widen(v: [f32; 3]) -> [f64; 3] {
    v.map(f64::from)
}

/// Signed clearance between a sphere and a primitive (negative when they
/// overlap), in double precision.
pub fn clearance(p: &Primitive, c: [f64; 3], r: f64) -> f64 {
    match *p {
        Primitive::Sphere { center, radius } => {
            let d = sub(c, widen(center));
            dot(d, d).sqrt() - r - radius as f64
        }
        Primitive::Capsule { p0, p1, radius } => {
            let (a, b) = (widen(p0), widen(p1));
            let ab = sub(b, a);
            let len2 = dot(ab, ab);
            let t = if len2 > 0.0 {
                (dot(sub(c, a), ab) / len2).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let d = sub(c, [a[0] + t * ab[0], a[1] + t * ab[1], a[2] + t * ab[2]]);
            dot(d, d).sqrt() - r - radius as f64
        }
        Primitive::Cuboid {
            center,
            half_extents,
            rotation,
        } => {
            let d = sub(c, widen(center));
            // Columns of the box-to-world rotation are the box axes.
            let mut outside = 0.0;
            for i in 0..3 {
                let axis = [
                    rotation[0][i] as f64,
                    rotation[1][i] as f64,
                    rotation[2][i] as f64,
                ];
                let excess = (dot(d, axis).abs() - half_extents[i] as f64).max(0.0);
                outside += excess * excess;
            }
            outside.sqrt() - r
        }
    }
}

/// Smallest absolute clearance seen while deciding validity.
pub struct Verdict {
    pub valid: bool,
    pub margin: f64,
}

/// Validity from fine spheres only: sphere centers come from scalar
/// evaluation of the traced graph, every test is done in `f64`.
pub fn validity_oracle(
    robot: &Robot,
    graph: &TraceGraph,
    env: &Environment,
    q: &Configuration,
) -> Verdict {
    let centers = graph.sphere_positions(q.values());
    let mut fine: Vec<Vec<([f64; 3], f64)>> = vec![Vec::new(); robot.tree.links().len()];
    for (out, c) in graph.outputs().iter().zip(&centers) {
        if let SphereLevel::Fine(_) = out.sphere.level {
            fine[out.sphere.link].push((widen(*c), out.radius as f64));
        }
    }
    let mut valid = true;
    let mut margin = f64::INFINITY;
    for spheres in &fine {
        for &(c, r) in spheres {
            for p in &env.primitives {
                let m = clearance(p, c, r);
                margin = margin.min(m.abs());
                valid &= m > 0.0;
            }
        }
    }
    for &(a, b) in robot.pairs.pairs() {
        for &(ca, ra) in &fine[a] {
            for &(cb, rb) in &fine[b] {
                let d = sub(ca, cb);
                let m = dot(d, d).sqrt() - ra - rb;
                margin = margin.min(m.abs());
                valid &= m > 0.0;
            }
        }
    }
    Verdict { valid, margin }
}

/// Checks every discretized state of `start -> goal` one at a time with a
/// single-lane validator and no pruning.
pub fn sequential_motion_oracle(
    ctx: CheckContext<'_>,
    start: &Configuration,
    goal: &Configuration,
    resolution: f32,
) -> bool {
    let mut v = BlockValidator::<1>::new(
        ctx,
        ValidateOptions {
            pruning: false,
            reject_all: false,
        },
    );
    let n = discretization_count(start, goal, resolution).unwrap();
    (1..=n).all(|i| {
        v.validate_config(&interpolate_step(start, goal, i, n))
            .unwrap()
    })
}
