//! Incremental k-nearest PRM.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use super::{setup, Path, PlanReport, PlannerSettings, PlanningProblem};
use crate::collision::BlockValidator;
use crate::error::Result;
use crate::motion::validate_motion_rake;
use crate::nn::NNIndex;
use crate::sampling::HaltonSampler;
use crate::vector::{soa_from_aos, Configuration};

const START: usize = 0;
const GOAL: usize = 1;

struct Roadmap {
    vertices: Vec<Configuration>,
    edges: Vec<Vec<(usize, f64)>>,
    index: NNIndex,
    components: Vec<usize>,
}

impl Roadmap {
    fn find(&mut self, mut v: usize) -> usize {
        while self.components[v] != v {
            self.components[v] = self.components[self.components[v]];
            v = self.components[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        // Smaller root wins so the forest shape is input-determined.
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        self.components[hi] = lo;
    }

    /// Adds `q` and tries edges to its `k` nearest vertices in increasing
    /// distance, skipping any already in the same component as `q`, so the
    /// roadmap stays a forest.
    fn connect_vertex<const W: usize>(
        &mut self,
        q: Configuration,
        validator: &mut BlockValidator<'_, W>,
        settings: &PlannerSettings,
    ) -> Result<usize> {
        let neighbors = if self.index.is_empty() {
            Vec::new()
        } else {
            self.index.k_nearest(&q, settings.prm_k)?
        };
        let id = self.vertices.len();
        self.index.insert(&q, id)?;
        self.edges.push(Vec::new());
        self.components.push(id);
        for (n, d) in neighbors {
            if self.find(n) == self.find(id) {
                continue;
            }
            let from = &self.vertices[n];
            if validate_motion_rake(
                validator,
                from,
                &q,
                settings.resolution,
                settings.rake_direction,
            )? {
                self.edges[n].push((id, d as f64));
                self.edges[id].push((n, d as f64));
                self.union(n, id);
            }
        }
        self.vertices.push(q);
        Ok(id)
    }

    /// Uniform-cost search from start to goal; equal costs pop the smaller
    /// vertex index first.
    fn shortest_path(&self) -> Option<Path> {
        #[derive(PartialEq)]
        struct Cost(f64);
        impl Eq for Cost {}
        impl PartialOrd for Cost {
            fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
                Some(self.cmp(other))
            }
        }
        impl Ord for Cost {
            fn cmp(&self, other: &Self) -> Ordering {
                self.0.total_cmp(&other.0)
            }
        }

        let n = self.vertices.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut prev = vec![usize::MAX; n];
        let mut heap = BinaryHeap::new();
        dist[START] = 0.0;
        heap.push(Reverse((Cost(0.0), START)));
        while let Some(Reverse((Cost(d), v))) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            if v == GOAL {
                break;
            }
            for &(u, w) in &self.edges[v] {
                let nd = d + w;
                if nd < dist[u] {
                    dist[u] = nd;
                    prev[u] = v;
                    heap.push(Reverse((Cost(nd), u)));
                }
            }
        }
        if dist[GOAL].is_infinite() {
            return None;
        }
        let mut order = vec![GOAL];
        while *order.last().unwrap() != START {
            order.push(prev[*order.last().unwrap()]);
        }
        let waypoints = order
            .iter()
            .rev()
            .map(|&v| self.vertices[v].clone())
            .collect();
        Path::new(waypoints).ok()
    }
}

/// PRM grown in rounds of `prm_batch` Halton draws. Start and goal are added
/// first (the goal is connected like any sample); after each round the
/// roadmap is searched if start and goal share a component.
pub fn prm<const W: usize>(
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

    let mut map = Roadmap {
        vertices: Vec::new(),
        edges: Vec::new(),
        index: NNIndex::new(start.dim()),
        components: Vec::new(),
    };
    map.connect_vertex(start.clone(), &mut validator, settings)?;
    map.connect_vertex(goal.clone(), &mut validator, settings)?;

    let mut sampler = HaltonSampler::new(problem.ctx.robot.limits());
    let mut iterations = 0;
    let mut path = None;
    loop {
        if map.find(START) == map.find(GOAL) {
            path = map.shortest_path();
            break;
        }
        if iterations >= settings.max_iterations {
            break;
        }
        let take = (settings.max_iterations - iterations).min(settings.prm_batch as u64);
        iterations += take;
        let samples: Vec<Configuration> = (0..take).map(|_| sampler.next_sample()).collect();
        for chunk in samples.chunks(W) {
            let mask = validator.validate(&soa_from_aos::<W>(chunk)?)?;
            for (k, q) in chunk.iter().enumerate() {
                if mask.get(k) {
                    map.connect_vertex(q.clone(), &mut validator, settings)?;
                }
            }
        }
    }
    Ok(PlanReport {
        path,
        iterations,
        vertices: map.vertices.len(),
        validation: validator.stats(),
    })
}
