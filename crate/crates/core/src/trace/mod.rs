//! Tracing compiler for sphere forward kinematics.
//!
//! [`trace_kinematics`] records every arithmetic step from joint values to
//! sphere centers into a [`TraceGraph`]. [`optimize_graph`] shrinks it and
//! [`schedule_program`] flattens it into a branch-free [`KinematicProgram`]
//! with a collision-check marker placed right after each sphere's position
//! becomes available.

mod fk;
mod optimize;
mod program;

pub use fk::trace_kinematics;
pub use optimize::optimize_graph;
pub use program::{
    evaluate_program, schedule_program, CheckMarker, CheckSink, Flow, KinematicProgram,
    ProgramScratch,
};

use crate::vector;

/// Index of a node in a [`TraceGraph`] (or of an op in a [`KinematicProgram`]).
pub type NodeId = u32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TraceOp {
    Const(f32),
    Input(u32),
    Add(NodeId, NodeId),
    Sub(NodeId, NodeId),
    Mul(NodeId, NodeId),
    Neg(NodeId),
    Sin(NodeId),
    Cos(NodeId),
}

impl TraceOp {
    pub fn operands(&self) -> impl Iterator<Item = NodeId> {
        let (a, b) = match *self {
            TraceOp::Const(_) | TraceOp::Input(_) => (None, None),
            TraceOp::Neg(a) | TraceOp::Sin(a) | TraceOp::Cos(a) => (Some(a), None),
            TraceOp::Add(a, b) | TraceOp::Sub(a, b) | TraceOp::Mul(a, b) => (Some(a), Some(b)),
        };
        a.into_iter().chain(b)
    }

    pub(crate) fn map_operands(self, f: impl Fn(NodeId) -> NodeId) -> Self {
        match self {
            TraceOp::Const(_) | TraceOp::Input(_) => self,
            TraceOp::Add(a, b) => TraceOp::Add(f(a), f(b)),
            TraceOp::Sub(a, b) => TraceOp::Sub(f(a), f(b)),
            TraceOp::Mul(a, b) => TraceOp::Mul(f(a), f(b)),
            TraceOp::Neg(a) => TraceOp::Neg(f(a)),
            TraceOp::Sin(a) => TraceOp::Sin(f(a)),
            TraceOp::Cos(a) => TraceOp::Cos(f(a)),
        }
    }

    /// Scalar semantics shared by graph evaluation, constant folding and
    /// every lane of the program interpreter.
    #[inline]
    pub(crate) fn apply(&self, values: &[f32], inputs: &[f32]) -> f32 {
        let v = |n: NodeId| values[n as usize];
        match *self {
            TraceOp::Const(c) => c,
            TraceOp::Input(j) => inputs[j as usize],
            TraceOp::Add(a, b) => v(a) + v(b),
            TraceOp::Sub(a, b) => v(a) - v(b),
            TraceOp::Mul(a, b) => v(a) * v(b),
            TraceOp::Neg(a) => -v(a),
            TraceOp::Sin(a) => vector::sin(v(a)),
            TraceOp::Cos(a) => vector::cos(v(a)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SphereLevel {
    Coarse,
    Fine(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SphereRef {
    pub link: usize,
    pub level: SphereLevel,
}

/// Traced world-frame center of one sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereOutput {
    pub sphere: SphereRef,
    pub position: [NodeId; 3],
    pub radius: f32,
}

/// Append-only operation DAG. Operands always refer to earlier nodes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TraceGraph {
    pub(crate) nodes: Vec<TraceOp>,
    pub(crate) outputs: Vec<SphereOutput>,
    pub(crate) dof: usize,
}

impl TraceGraph {
    pub fn new(dof: usize) -> Self {
        Self {
            nodes: Vec::new(),
            outputs: Vec::new(),
            dof,
        }
    }

    /// Appends `op`. Panics if an operand does not precede it.
    pub fn push(&mut self, op: TraceOp) -> NodeId {
        let id = self.nodes.len() as NodeId;
        assert!(
            op.operands().all(|o| o < id),
            "operand must precede node {id}"
        );
        if let TraceOp::Input(j) = op {
            assert!((j as usize) < self.dof, "input {j} out of range");
        }
        self.nodes.push(op);
        id
    }

    pub fn add_output(&mut self, sphere: SphereRef, position: [NodeId; 3], radius: f32) {
        self.outputs.push(SphereOutput {
            sphere,
            position,
            radius,
        });
    }

    pub fn nodes(&self) -> &[TraceOp] {
        &self.nodes
    }

    pub fn outputs(&self) -> &[SphereOutput] {
        &self.outputs
    }

    pub fn dof(&self) -> usize {
        self.dof
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Value of every node at configuration `q`.
    pub fn evaluate(&self, q: &[f32]) -> Vec<f32> {
        let mut values = Vec::with_capacity(self.nodes.len());
        for op in &self.nodes {
            let v = op.apply(&values, q);
            values.push(v);
        }
        values
    }

    /// Sphere centers at `q`, in output order.
    pub fn sphere_positions(&self, q: &[f32]) -> Vec<[f32; 3]> {
        let values = self.evaluate(q);
        self.outputs
            .iter()
            .map(|o| o.position.map(|n| values[n as usize]))
            .collect()
    }
}
