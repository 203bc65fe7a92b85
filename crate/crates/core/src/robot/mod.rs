//! Robot description: kinematic tree, sphere collision model and the set of
//! link pairs tested for self-collision.

mod spheres;
mod urdf;

use std::collections::BTreeSet;

pub use spheres::{compute_coarse_sphere, load_sphere_model, Sphere, SphereModel};
pub use urdf::parse_urdf;

use crate::error::{Error, Result};
use crate::trace::{optimize_graph, schedule_program, trace_kinematics, KinematicProgram};
use crate::vector::Configuration;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JointKind {
    Fixed,
    Revolute,
    Continuous,
    Prismatic,
}

/// Rigid transform as URDF writes it: translation then fixed-axis
/// roll/pitch/yaw (`R = Rz(yaw) * Ry(pitch) * Rx(roll)`).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Origin {
    pub xyz: [f64; 3],
    pub rpy: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointSpec {
    pub name: String,
    pub kind: JointKind,
    /// Unit axis in the joint frame.
    pub axis: [f64; 3],
    pub origin: Origin,
    /// `[lower, upper]`; continuous joints get `[-pi, pi]`, fixed joints `[0, 0]`.
    pub limits: [f64; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeJoint {
    pub spec: JointSpec,
    pub parent: usize,
    pub child: usize,
    /// Position in the configuration vector, `None` for fixed joints.
    pub dof_index: Option<usize>,
}

/// Links and joints in depth-first order from the root (link 0).
///
/// Joint `i` always has its parent link placed before its child link, and
/// actuated joints are numbered in the same order.
#[derive(Debug, Clone, PartialEq)]
pub struct KinematicTree {
    links: Vec<String>,
    joints: Vec<TreeJoint>,
    parent_joint: Vec<Option<usize>>,
    dof: usize,
}

impl KinematicTree {
    pub(crate) fn from_parts(links: Vec<String>, joints: Vec<TreeJoint>, dof: usize) -> Self {
        let mut parent_joint = vec![None; links.len()];
        for (j, joint) in joints.iter().enumerate() {
            parent_joint[joint.child] = Some(j);
        }
        Self {
            links,
            joints,
            parent_joint,
            dof,
        }
    }

    pub fn links(&self) -> &[String] {
        &self.links
    }

    pub fn joints(&self) -> &[TreeJoint] {
        &self.joints
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn dof(&self) -> usize {
        self.dof
    }

    pub fn link_index(&self, name: &str) -> Option<usize> {
        self.links.iter().position(|l| l == name)
    }

    /// Joint whose child is `link`; `None` for the root.
    pub fn parent_joint(&self, link: usize) -> Option<&TreeJoint> {
        self.parent_joint[link].map(|j| &self.joints[j])
    }

    /// Actuated joints in configuration order.
    pub fn actuated(&self) -> impl Iterator<Item = &TreeJoint> {
        self.joints.iter().filter(|j| j.dof_index.is_some())
    }

    /// `[lower, upper]` per degree of freedom.
    pub fn limits(&self) -> Vec<[f64; 2]> {
        self.actuated().map(|j| j.spec.limits).collect()
    }
}

/// Unordered link pairs `(a, b)` with `a < b`, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SelfCollisionPairs {
    pairs: Vec<(usize, usize)>,
}

impl SelfCollisionPairs {
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        let key = (a.min(b), a.max(b));
        self.pairs.binary_search(&key).is_ok()
    }
}

/// Every unordered link pair except a link with itself, links joined by a
/// single joint, and `ignore`.
pub fn default_self_collision_pairs(
    tree: &KinematicTree,
    ignore: &[(usize, usize)],
) -> Result<SelfCollisionPairs> {
    let n = tree.links().len();
    let mut skip = BTreeSet::new();
    for &(a, b) in ignore {
        for link in [a, b] {
            if link >= n {
                return Err(Error::UnknownLink(format!("#{link}")));
            }
        }
        skip.insert((a.min(b), a.max(b)));
    }
    for j in tree.joints() {
        skip.insert((j.parent.min(j.child), j.parent.max(j.child)));
    }
    let pairs = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|p| !skip.contains(p))
        .collect();
    Ok(SelfCollisionPairs { pairs })
}

/// Everything a validity check needs to know about the robot, with the
/// kinematics compiled once up front.
#[derive(Debug, Clone)]
pub struct Robot {
    pub tree: KinematicTree,
    pub model: SphereModel,
    pub pairs: SelfCollisionPairs,
    pub program: KinematicProgram,
}

impl Robot {
    pub fn new(tree: KinematicTree, model: SphereModel) -> Result<Self> {
        let pairs = default_self_collision_pairs(&tree, model.ignore_pairs())?;
        let graph = optimize_graph(&trace_kinematics(&tree, &model)?);
        let program = schedule_program(&graph);
        Ok(Self {
            tree,
            model,
            pairs,
            program,
        })
    }

    pub fn from_documents(urdf: &str, spheres: &str) -> Result<Self> {
        let tree = parse_urdf(urdf)?;
        let model = load_sphere_model(&tree, spheres)?;
        Self::new(tree, model)
    }

    pub fn dof(&self) -> usize {
        self.tree.dof()
    }

    pub fn limits(&self) -> Vec<[f64; 2]> {
        self.tree.limits()
    }

    pub fn within_limits(&self, q: &Configuration) -> bool {
        q.dim() == self.dof()
            && q.values()
                .iter()
                .zip(self.limits())
                .all(|(&v, [lo, hi])| (lo as f32) <= v && v <= (hi as f32))
    }
}
