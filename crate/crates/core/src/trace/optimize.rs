//! Graph optimizer.
//!
//! Rebuilds the graph front to back through a simplifying constructor, then
//! drops nodes no output depends on. The constructor folds constants, removes
//! identity operations (`x*1`, `x+0`, `x-0`, `x*0`, `x-x`), cancels and
//! absorbs negations, and hash-conses structurally equal nodes (commutative
//! operands are ordered first). Each input node maps to at most one output
//! node, so the node count never grows, and a rebuilt graph is already in
//! normal form, so a second run is a no-op.
//!
//! Every rewrite is exact in IEEE arithmetic for finite values, except that
//! `x*0` and `x-x` may flip the sign of a zero.

use std::collections::HashMap;

use super::{NodeId, SphereOutput, TraceGraph, TraceOp};

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Key {
    Const(u32),
    Input(u32),
    Add(NodeId, NodeId),
    Sub(NodeId, NodeId),
    Mul(NodeId, NodeId),
    Neg(NodeId),
    Sin(NodeId),
    Cos(NodeId),
}

impl From<TraceOp> for Key {
    fn from(op: TraceOp) -> Self {
        match op {
            TraceOp::Const(c) => Key::Const(c.to_bits()),
            TraceOp::Input(j) => Key::Input(j),
            TraceOp::Add(a, b) => Key::Add(a, b),
            TraceOp::Sub(a, b) => Key::Sub(a, b),
            TraceOp::Mul(a, b) => Key::Mul(a, b),
            TraceOp::Neg(a) => Key::Neg(a),
            TraceOp::Sin(a) => Key::Sin(a),
            TraceOp::Cos(a) => Key::Cos(a),
        }
    }
}

struct Builder {
    nodes: Vec<TraceOp>,
    memo: HashMap<Key, NodeId>,
}

impl Builder {
    fn constant_of(&self, n: NodeId) -> Option<f32> {
        match self.nodes[n as usize] {
            TraceOp::Const(c) => Some(c),
            _ => None,
        }
    }

    fn negated(&self, n: NodeId) -> Option<NodeId> {
        match self.nodes[n as usize] {
            TraceOp::Neg(a) => Some(a),
            _ => None,
        }
    }

    fn intern(&mut self, op: TraceOp) -> NodeId {
        let op = match op {
            TraceOp::Add(a, b) if b < a => TraceOp::Add(b, a),
            TraceOp::Mul(a, b) if b < a => TraceOp::Mul(b, a),
            other => other,
        };
        let next = self.nodes.len() as NodeId;
        let id = *self.memo.entry(Key::from(op)).or_insert(next);
        if id == next {
            self.nodes.push(op);
        }
        id
    }

    fn konst(&mut self, c: f32) -> NodeId {
        self.intern(TraceOp::Const(c))
    }

    fn make(&mut self, op: TraceOp) -> NodeId {
        use TraceOp::*;

        let operands: Vec<NodeId> = op.operands().collect();
        if !operands.is_empty() && operands.iter().all(|&o| self.constant_of(o).is_some()) {
            let folded = op.apply(&self.constant_values(&operands), &[]);
            return self.konst(folded);
        }

        match op {
            Neg(a) => {
                if let Some(inner) = self.negated(a) {
                    return inner;
                }
            }
            Cos(a) => {
                if let Some(inner) = self.negated(a) {
                    return self.make(Cos(inner));
                }
            }
            Add(a, b) => {
                if self.constant_of(a) == Some(0.0) {
                    return b;
                }
                if self.constant_of(b) == Some(0.0) {
                    return a;
                }
                match (self.negated(a), self.negated(b)) {
                    (_, Some(nb)) => return self.make(Sub(a, nb)),
                    (Some(na), None) => return self.make(Sub(b, na)),
                    _ => {}
                }
            }
            Sub(a, b) => {
                if a == b {
                    return self.konst(0.0);
                }
                if self.constant_of(b) == Some(0.0) {
                    return a;
                }
                if self.constant_of(a) == Some(0.0) {
                    return self.make(Neg(b));
                }
                if let Some(nb) = self.negated(b) {
                    return self.make(Add(a, nb));
                }
            }
            Mul(a, b) => {
                for (x, y) in [(a, b), (b, a)] {
                    match self.constant_of(x) {
                        Some(c) if c == 0.0 => return self.konst(0.0),
                        Some(c) if c == 1.0 => return y,
                        Some(c) if c == -1.0 => return self.make(Neg(y)),
                        _ => {}
                    }
                }
                if let (Some(na), Some(nb)) = (self.negated(a), self.negated(b)) {
                    return self.make(Mul(na, nb));
                }
            }
            _ => {}
        }
        self.intern(op)
    }

    fn constant_values(&self, operands: &[NodeId]) -> Vec<f32> {
        // `apply` indexes by node id; give it a sparse view of just the
        // constant operands.
        let mut values = vec![0.0; operands.iter().max().map_or(0, |&m| m as usize + 1)];
        for &o in operands {
            values[o as usize] = self.constant_of(o).unwrap();
        }
        values
    }
}

/// Semantics-preserving simplification; see the module docs.
pub fn optimize_graph(graph: &TraceGraph) -> TraceGraph {
    let mut builder = Builder {
        nodes: Vec::with_capacity(graph.len()),
        memo: HashMap::new(),
    };
    let mut remap: Vec<NodeId> = Vec::with_capacity(graph.len());
    for op in graph.nodes() {
        let mapped = op.map_operands(|o| remap[o as usize]);
        let id = builder.make(mapped);
        remap.push(id);
    }
    let outputs: Vec<SphereOutput> = graph
        .outputs()
        .iter()
        .map(|o| SphereOutput {
            position: o.position.map(|n| remap[n as usize]),
            ..*o
        })
        .collect();
    eliminate_dead(builder.nodes, outputs, graph.dof())
}

fn eliminate_dead(nodes: Vec<TraceOp>, outputs: Vec<SphereOutput>, dof: usize) -> TraceGraph {
    let mut live = vec![false; nodes.len()];
    for o in &outputs {
        for n in o.position {
            live[n as usize] = true;
        }
    }
    // Operands precede their users, so one backward sweep marks every ancestor.
    for i in (0..nodes.len()).rev() {
        if live[i] {
            for o in nodes[i].operands() {
                live[o as usize] = true;
            }
        }
    }
    let mut remap = vec![NodeId::MAX; nodes.len()];
    let mut graph = TraceGraph::new(dof);
    for (i, op) in nodes.into_iter().enumerate() {
        if live[i] {
            remap[i] = graph.push(op.map_operands(|o| remap[o as usize]));
        }
    }
    for o in outputs {
        graph.add_output(o.sphere, o.position.map(|n| remap[n as usize]), o.radius);
    }
    graph
}
