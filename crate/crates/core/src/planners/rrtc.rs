//! Bidirectional RRT-Connect.

use super::{setup, steer, Path, PlanReport, PlannerSettings, PlanningProblem};
use crate::collision::BlockValidator;
use crate::error::Result;
use crate::motion::validate_motion_rake;
use crate::nn::NNIndex;
use crate::sampling::HaltonSampler;
use crate::vector::Configuration;

struct Tree {
    nodes: Vec<Configuration>,
    parents: Vec<usize>,
    index: NNIndex,
}

impl Tree {
    fn new(root: &Configuration) -> Self {
        let mut tree = Self {
            nodes: Vec::new(),
            parents: Vec::new(),
            index: NNIndex::new(root.dim()),
        };
        tree.add(root.clone(), 0);
        tree
    }

    fn add(&mut self, q: Configuration, parent: usize) -> usize {
        let id = self.nodes.len();
        self.index
            .insert(&q, id)
            .expect("fresh id of matching dimension");
        self.nodes.push(q);
        self.parents.push(parent);
        id
    }

    /// Node `id` back to the root, inclusive.
    fn branch(&self, mut id: usize) -> Vec<Configuration> {
        let mut out = vec![self.nodes[id].clone()];
        while id != 0 {
            id = self.parents[id];
            out.push(self.nodes[id].clone());
        }
        out
    }
}

enum Step {
    Trapped,
    Advanced(usize),
    Reached(usize),
}

struct Grower<'v, 'a, const W: usize> {
    validator: &'v mut BlockValidator<'a, W>,
    settings: &'v PlannerSettings,
}

impl<const W: usize> Grower<'_, '_, W> {
    /// One step of at most `range` from the nearest node toward `target`.
    fn extend(&mut self, tree: &mut Tree, target: &Configuration) -> Result<Step> {
        let (near, d) = tree.index.nearest(target)?;
        if d == 0.0 {
            return Ok(Step::Reached(near));
        }
        let range = self.settings.range;
        let reached = d <= range;
        let q_new = if reached {
            target.clone()
        } else {
            steer(&tree.nodes[near], target, range / d)
        };
        let s = self.settings;
        if !validate_motion_rake(
            self.validator,
            &tree.nodes[near],
            &q_new,
            s.resolution,
            s.rake_direction,
        )? {
            return Ok(Step::Trapped);
        }
        let id = tree.add(q_new, near);
        Ok(if reached {
            Step::Reached(id)
        } else {
            Step::Advanced(id)
        })
    }

    fn connect(&mut self, tree: &mut Tree, target: &Configuration) -> Result<Step> {
        loop {
            match self.extend(tree, target)? {
                Step::Advanced(_) => continue,
                other => return Ok(other),
            }
        }
    }
}

/// Index of the tree holding the node nearest to `q`; ties go to the start
/// tree.
fn nearer_tree(trees: &[Tree; 2], q: &Configuration) -> Result<usize> {
    let (_, d0) = trees[0].index.nearest(q)?;
    let (_, d1) = trees[1].index.nearest(q)?;
    Ok(usize::from(d1 < d0))
}

/// RRT-Connect without goal bias. Each iteration draws one Halton sample,
/// extends whichever tree is nearer to it and greedily connects the other
/// tree to the new node.
///
/// Picking the tree by distance rather than strict alternation matters with
/// Halton sampling: the base-2 coordinate alternates halves of its range on
/// consecutive draws, so strict alternation would feed each tree samples from
/// only one half of the first joint.
pub fn rrt_connect<const W: usize>(
    problem: &PlanningProblem<'_>,
    settings: &PlannerSettings,
) -> Result<PlanReport> {
    let mut validator = setup::<W>(problem, settings)?;
    let (start, goal) = (&problem.start, &problem.goal);
    if start.bitwise_eq(goal) {
        return Ok(PlanReport {
            path: Some(Path::new(vec![start.clone(), goal.clone()])?),
            iterations: 0,
            vertices: 1,
            validation: validator.stats(),
        });
    }

    let mut sampler = HaltonSampler::new(problem.ctx.robot.limits());
    let mut trees = [Tree::new(start), Tree::new(goal)];
    let mut grower = Grower {
        validator: &mut validator,
        settings,
    };
    let mut path = None;
    let mut iterations = 0;
    while iterations < settings.max_iterations {
        iterations += 1;
        let sample = sampler.next_sample();
        let active = nearer_tree(&trees, &sample)?;
        let (a, b) = {
            let [x, y] = &mut trees;
            if active == 0 {
                (x, y)
            } else {
                (y, x)
            }
        };
        if let Step::Advanced(id) | Step::Reached(id) = grower.extend(a, &sample)? {
            let target = a.nodes[id].clone();
            if let Step::Reached(other) = grower.connect(b, &target)? {
                let (from_start, from_goal) = if active == 0 {
                    (id, other)
                } else {
                    (other, id)
                };
                let mut waypoints = trees[0].branch(from_start);
                waypoints.reverse();
                waypoints.extend(trees[1].branch(from_goal).into_iter().skip(1));
                path = Some(Path::new(waypoints)?);
                break;
            }
        }
    }
    Ok(PlanReport {
        path,
        iterations,
        vertices: trees[0].nodes.len() + trees[1].nodes.len(),
        validation: validator.stats(),
    })
}
