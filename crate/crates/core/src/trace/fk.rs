use super::{NodeId, SphereLevel, SphereRef, TraceGraph, TraceOp};
use crate::error::{Error, Result};
use crate::robot::{JointKind, KinematicTree, Origin, SphereModel};

/// A traced value: either a compile-time constant or a recorded node.
///
/// Arithmetic between constants is carried out immediately in `f64` and
/// never recorded, and multiplying by 0 or 1 or adding 0 does not emit an
/// op. Constants only become `Const` nodes when they meet a recorded value.
#[derive(Debug, Clone, Copy)]
enum Val {
    K(f64),
    N(NodeId),
}

type Mat = [[Val; 4]; 3];
type Affine = [[f64; 4]; 3];

const IDENTITY: Affine = [
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
    [0.0, 0.0, 1.0, 0.0],
];

struct Tracer<'g> {
    graph: &'g mut TraceGraph,
}

impl Tracer<'_> {
    fn node(&mut self, v: Val) -> NodeId {
        match v {
            Val::N(n) => n,
            Val::K(c) => self.graph.push(TraceOp::Const(c as f32)),
        }
    }

    fn record(&mut self, op: TraceOp) -> Val {
        Val::N(self.graph.push(op))
    }

    fn add(&mut self, a: Val, b: Val) -> Val {
        match (a, b) {
            (Val::K(x), Val::K(y)) => Val::K(x + y),
            (Val::K(z), v) | (v, Val::K(z)) if z == 0.0 => v,
            _ => {
                let (a, b) = (self.node(a), self.node(b));
                self.record(TraceOp::Add(a, b))
            }
        }
    }

    fn sub(&mut self, a: Val, b: Val) -> Val {
        match (a, b) {
            (Val::K(x), Val::K(y)) => Val::K(x - y),
            (v, Val::K(z)) if z == 0.0 => v,
            (Val::K(z), v) if z == 0.0 => self.neg(v),
            _ => {
                let (a, b) = (self.node(a), self.node(b));
                self.record(TraceOp::Sub(a, b))
            }
        }
    }

    fn mul(&mut self, a: Val, b: Val) -> Val {
        match (a, b) {
            (Val::K(x), Val::K(y)) => Val::K(x * y),
            (Val::K(z), _) | (_, Val::K(z)) if z == 0.0 => Val::K(0.0),
            (Val::K(o), v) | (v, Val::K(o)) if o == 1.0 => v,
            (Val::K(m), v) | (v, Val::K(m)) if m == -1.0 => self.neg(v),
            _ => {
                let (a, b) = (self.node(a), self.node(b));
                self.record(TraceOp::Mul(a, b))
            }
        }
    }

    fn neg(&mut self, a: Val) -> Val {
        match a {
            Val::K(x) => Val::K(-x),
            Val::N(n) => self.record(TraceOp::Neg(n)),
        }
    }

    fn sum(&mut self, terms: impl IntoIterator<Item = Val>) -> Val {
        terms
            .into_iter()
            .fold(Val::K(0.0), |acc, t| self.add(acc, t))
    }

    /// `a * b` for affine 3x4 matrices with implicit `[0 0 0 1]` bottom rows.
    fn compose(&mut self, a: &Mat, b: &Mat) -> Mat {
        let mut out = [[Val::K(0.0); 4]; 3];
        for i in 0..3 {
            for j in 0..4 {
                let mut terms = Vec::with_capacity(4);
                for k in 0..3 {
                    terms.push(self.mul(a[i][k], b[k][j]));
                }
                if j == 3 {
                    terms.push(a[i][3]);
                }
                out[i][j] = self.sum(terms);
            }
        }
        out
    }

    /// Motion of joint `spec` as a function of configuration entry `dof`.
    fn joint_motion(&mut self, kind: JointKind, axis: [f64; 3], dof: usize) -> Mat {
        let q = self.record(TraceOp::Input(dof as u32));
        let mut m = constant(&IDENTITY);
        match kind {
            JointKind::Revolute | JointKind::Continuous => {
                let qn = self.node(q);
                let s = self.record(TraceOp::Sin(qn));
                let c = self.record(TraceOp::Cos(qn));
                let one_minus_c = self.sub(Val::K(1.0), c);
                // Rodrigues: R = c I + s [a]x + (1 - c) a a^T, with the
                // diagonal written as c (1 - a_i^2) + a_i^2 so that an
                // axis-aligned joint leaves exactly cos/sin/1/0 entries.
                let [x, y, z] = axis;
                let cross = [[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]];
                for i in 0..3 {
                    for j in 0..3 {
                        let outer = snap(axis[i] * axis[j]);
                        m[i][j] = if i == j {
                            let scaled = self.mul(c, Val::K(snap(1.0 - outer)));
                            self.add(scaled, Val::K(outer))
                        } else {
                            let a = self.mul(s, Val::K(snap(cross[i][j])));
                            let b = self.mul(one_minus_c, Val::K(outer));
                            self.add(a, b)
                        };
                    }
                }
            }
            JointKind::Prismatic => {
                for i in 0..3 {
                    m[i][3] = self.mul(q, Val::K(axis[i]));
                }
            }
            JointKind::Fixed => unreachable!("fixed joints are folded into constants"),
        }
        m
    }
}

fn constant(a: &Affine) -> Mat {
    a.map(|row| row.map(Val::K))
}

/// Rounds values within 1e-12 of -1, 0 or 1 onto them, so trigonometric
/// noise in constant rotations (e.g. cos(pi/2)) does not survive as work.
fn snap(v: f64) -> f64 {
    for t in [-1.0, 0.0, 1.0] {
        if (v - t).abs() < 1e-12 {
            return t;
        }
    }
    v
}

fn affine_mul(a: &Affine, b: &Affine) -> Affine {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let mut v = (0..3).map(|k| a[i][k] * b[k][j]).sum::<f64>();
            if j == 3 {
                v += a[i][3];
            }
            snap(v)
        })
    })
}

fn affine_point(a: &Affine, p: [f64; 3]) -> [f64; 3] {
    std::array::from_fn(|i| snap(a[i][0] * p[0] + a[i][1] * p[1] + a[i][2] * p[2] + a[i][3]))
}

pub(crate) fn origin_affine(origin: &Origin) -> Affine {
    let [r, p, y] = origin.rpy;
    let (sr, cr) = r.sin_cos();
    let (sp, cp) = p.sin_cos();
    let (sy, cy) = y.sin_cos();
    let [tx, ty, tz] = origin.xyz;
    [
        [cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr, tx],
        [sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr, ty],
        [-sp, cp * sr, cp * cr, tz],
    ]
    .map(|row| row.map(snap))
}

/// Traces the world position of every coarse and fine sphere.
///
/// Each link's pose is kept as `symbolic * constant`: fixed joints and joint
/// origins accumulate into the constant factor in `f64`, which is only
/// multiplied into the symbolic part at the next moving joint. Outputs are
/// ordered by link, coarse sphere first.
pub fn trace_kinematics(tree: &KinematicTree, model: &SphereModel) -> Result<TraceGraph> {
    let links = tree.links().len();
    if model.link_count() != links {
        return Err(Error::DimensionMismatch {
            expected: links,
            found: model.link_count(),
        });
    }
    let mut graph = TraceGraph::new(tree.dof());
    let mut poses: Vec<Option<(Mat, Affine)>> = vec![None; links];
    poses[tree.root()] = Some((constant(&IDENTITY), IDENTITY));

    let mut tracer = Tracer { graph: &mut graph };
    for joint in tree.joints() {
        let (sym, fixed) = poses[joint.parent]
            .ok_or_else(|| Error::UnknownLink(tree.links()[joint.parent].clone()))?;
        let local = affine_mul(&fixed, &origin_affine(&joint.spec.origin));
        poses[joint.child] = Some(match joint.dof_index {
            None => (sym, local),
            Some(dof) => {
                let motion = tracer.joint_motion(joint.spec.kind, joint.spec.axis, dof);
                let step = tracer.compose(&constant(&local), &motion);
                (tracer.compose(&sym, &step), IDENTITY)
            }
        });
    }

    let mut outputs = Vec::new();
    for link in 0..links {
        let spheres = model
            .coarse(link)
            .map(|s| (SphereLevel::Coarse, s))
            .into_iter()
            .chain(
                model
                    .fine(link)
                    .iter()
                    .enumerate()
                    .map(|(i, s)| (SphereLevel::Fine(i), *s)),
            );
        for (level, sphere) in spheres {
            let (sym, fixed) =
                poses[link].ok_or_else(|| Error::UnknownLink(tree.links()[link].clone()))?;
            let local = affine_point(&fixed, sphere.center);
            let position: [NodeId; 3] = std::array::from_fn(|i| {
                let terms: Vec<Val> = (0..3)
                    .map(|k| tracer.mul(sym[i][k], Val::K(local[k])))
                    .collect();
                let v = tracer.sum(terms.into_iter().chain([sym[i][3]]));
                tracer.node(v)
            });
            outputs.push((SphereRef { link, level }, position, sphere.radius as f32));
        }
    }
    for (sphere, position, radius) in outputs {
        graph.add_output(sphere, position, radius);
    }
    Ok(graph)
}
