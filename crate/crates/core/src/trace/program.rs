use std::fmt;

use super::{NodeId, SphereLevel, SphereRef, TraceGraph, TraceOp};
use crate::error::{check_dim, Result};
use crate::vector::{self, ConfigBlock};

/// Collision check inserted into the op stream once its sphere's center is
/// computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckMarker {
    pub sphere: SphereRef,
    /// Number of ops that run before this check.
    pub position: usize,
    /// Op slots holding the center's x, y and z.
    pub coords: [NodeId; 3],
    pub radius: f32,
}

/// Branch-free, topologically ordered forward kinematics with interleaved
/// check markers. Op `i` writes slot `i`; operands name earlier slots.
#[derive(Debug, Clone, PartialEq)]
pub struct KinematicProgram {
    ops: Vec<TraceOp>,
    checks: Vec<CheckMarker>,
    dof: usize,
    coarse_count: usize,
    fine_count: usize,
}

impl KinematicProgram {
    pub fn ops(&self) -> &[TraceOp] {
        &self.ops
    }

    pub fn checks(&self) -> &[CheckMarker] {
        &self.checks
    }

    pub fn dof(&self) -> usize {
        self.dof
    }

    pub fn coarse_count(&self) -> usize {
        self.coarse_count
    }

    pub fn fine_count(&self) -> usize {
        self.fine_count
    }

    /// Slots `marker` depends on, directly or transitively.
    pub fn dependencies(&self, marker: &CheckMarker) -> Vec<bool> {
        let mut needed = vec![false; self.ops.len()];
        for c in marker.coords {
            needed[c as usize] = true;
        }
        for i in (0..self.ops.len()).rev() {
            if needed[i] {
                for o in self.ops[i].operands() {
                    needed[o as usize] = true;
                }
            }
        }
        needed
    }
}

/// Orders ops so that each check lands as early as possible.
///
/// Outputs are visited in graph order (by link, coarse sphere before fine).
/// For each one, the not-yet-scheduled ancestors of its center are emitted
/// in node-creation order and the marker is placed right after them. Work
/// that only later spheres need therefore always follows earlier checks.
/// Nodes no output depends on are never emitted.
pub fn schedule_program(graph: &TraceGraph) -> KinematicProgram {
    let nodes = graph.nodes();
    let mut slot = vec![NodeId::MAX; nodes.len()];
    let mut ops = Vec::with_capacity(nodes.len());
    let mut checks = Vec::with_capacity(graph.outputs().len());

    for out in graph.outputs() {
        let mut pending: Vec<NodeId> = Vec::new();
        let mut stack: Vec<NodeId> = out.position.to_vec();
        let mut seen = std::collections::HashSet::new();
        while let Some(n) = stack.pop() {
            if slot[n as usize] != NodeId::MAX || !seen.insert(n) {
                continue;
            }
            pending.push(n);
            stack.extend(nodes[n as usize].operands());
        }
        pending.sort_unstable();
        for n in pending {
            slot[n as usize] = ops.len() as NodeId;
            ops.push(nodes[n as usize].map_operands(|o| slot[o as usize]));
        }
        checks.push(CheckMarker {
            sphere: out.sphere,
            position: ops.len(),
            coords: out.position.map(|n| slot[n as usize]),
            radius: out.radius,
        });
    }

    let coarse_count = checks
        .iter()
        .filter(|c| c.sphere.level == SphereLevel::Coarse)
        .count();
    KinematicProgram {
        fine_count: checks.len() - coarse_count,
        coarse_count,
        ops,
        checks,
        dof: graph.dof(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Stop,
}

/// Receives each sphere's lane-wide center as soon as it is computed.
pub trait CheckSink<const W: usize> {
    fn check(&mut self, marker: &CheckMarker, center: [&[f32; W]; 3]) -> Flow;
}

impl<const W: usize, F> CheckSink<W> for F
where
    F: FnMut(&CheckMarker, [&[f32; W]; 3]) -> Flow,
{
    fn check(&mut self, marker: &CheckMarker, center: [&[f32; W]; 3]) -> Flow {
        self(marker, center)
    }
}

/// Register file for [`evaluate_program`], reusable across calls.
#[derive(Debug, Clone, Default)]
pub struct ProgramScratch<const W: usize> {
    regs: Vec<[f32; W]>,
}

impl<const W: usize> ProgramScratch<W> {
    pub fn new(program: &KinematicProgram) -> Self {
        Self {
            regs: vec![[0.0; W]; program.ops.len()],
        }
    }
}

#[inline(always)]
fn lanewise<const W: usize>(a: &[f32; W], b: &[f32; W], f: impl Fn(f32, f32) -> f32) -> [f32; W] {
    std::array::from_fn(|k| f(a[k], b[k]))
}

/// Runs the program over every lane of `block`, calling `sink` at each
/// marker. Returns `false` if the sink stopped evaluation early.
pub fn evaluate_program<const W: usize, S: CheckSink<W>>(
    program: &KinematicProgram,
    block: &ConfigBlock<W>,
    scratch: &mut ProgramScratch<W>,
    sink: &mut S,
) -> Result<bool> {
    check_dim(program.dof, block.dim())?;
    let regs = &mut scratch.regs;
    if regs.len() < program.ops.len() {
        regs.resize(program.ops.len(), [0.0; W]);
    }

    let mut cursor = 0;
    for marker in &program.checks {
        while cursor < marker.position {
            let value = match program.ops[cursor] {
                TraceOp::Const(c) => [c; W],
                TraceOp::Input(j) => *block.row(j as usize),
                TraceOp::Add(a, b) => lanewise(&regs[a as usize], &regs[b as usize], |x, y| x + y),
                TraceOp::Sub(a, b) => lanewise(&regs[a as usize], &regs[b as usize], |x, y| x - y),
                TraceOp::Mul(a, b) => lanewise(&regs[a as usize], &regs[b as usize], |x, y| x * y),
                TraceOp::Neg(a) => regs[a as usize].map(|x| -x),
                TraceOp::Sin(a) => regs[a as usize].map(vector::sin),
                TraceOp::Cos(a) => regs[a as usize].map(vector::cos),
            };
            regs[cursor] = value;
            cursor += 1;
        }
        let [x, y, z] = marker.coords.map(|c| c as usize);
        if sink.check(marker, [&regs[x], &regs[y], &regs[z]]) == Flow::Stop {
            return Ok(false);
        }
    }
    Ok(true)
}

impl fmt::Display for KinematicProgram {
    /// One line per op or check, e.g. `%3 = mul %1 %2` and
    /// `check link=1 fine=0 at=%4,%5,%6 r=0.05`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut checks = self.checks.iter().peekable();
        for i in 0..=self.ops.len() {
            while let Some(c) = checks.next_if(|c| c.position == i) {
                let level = match c.sphere.level {
                    SphereLevel::Coarse => "coarse".to_string(),
                    SphereLevel::Fine(k) => format!("fine={k}"),
                };
                let [x, y, z] = c.coords;
                writeln!(
                    f,
                    "check link={} {level} at=%{x},%{y},%{z} r={}",
                    c.sphere.link, c.radius
                )?;
            }
            let Some(op) = self.ops.get(i) else { break };
            match *op {
                TraceOp::Const(c) => writeln!(f, "%{i} = const {c:?}")?,
                TraceOp::Input(j) => writeln!(f, "%{i} = input {j}")?,
                TraceOp::Add(a, b) => writeln!(f, "%{i} = add %{a} %{b}")?,
                TraceOp::Sub(a, b) => writeln!(f, "%{i} = sub %{a} %{b}")?,
                TraceOp::Mul(a, b) => writeln!(f, "%{i} = mul %{a} %{b}")?,
                TraceOp::Neg(a) => writeln!(f, "%{i} = neg %{a}")?,
                TraceOp::Sin(a) => writeln!(f, "%{i} = sin %{a}")?,
                TraceOp::Cos(a) => writeln!(f, "%{i} = cos %{a}")?,
            }
        }
        Ok(())
    }
}
