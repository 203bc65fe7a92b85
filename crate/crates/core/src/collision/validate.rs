//! Batch state validation over the compiled kinematics.

use super::Environment;
use crate::error::{check_dim, Result};
use crate::robot::Robot;
use crate::trace::{evaluate_program, CheckMarker, CheckSink, Flow, ProgramScratch, SphereLevel};
use crate::vector::{ConfigBlock, Configuration, LaneMask};

/// Slack added to coarse radii so the pruning test stays conservative when
/// coarse and fine centers round differently in `f32`.
pub const COARSE_MARGIN: f32 = 1e-4;

/// The robot and the world it is checked against.
#[derive(Debug, Clone, Copy)]
pub struct CheckContext<'a> {
    pub robot: &'a Robot,
    pub env: &'a Environment,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidateOptions {
    /// Skip fine tests against obstacles the link's coarse sphere misses.
    pub pruning: bool,
    /// Reject the whole block as soon as any lane collides.
    pub reject_all: bool,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self {
            pruning: true,
            reject_all: false,
        }
    }
}

/// Work counters, accumulated across calls.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ValidationStats {
    pub blocks: u64,
    pub coarse_tests: u64,
    pub fine_tests: u64,
    pub pruned_tests: u64,
    pub self_tests: u64,
    pub early_exits: u64,
}

/// Reusable validation state for one robot and environment.
pub struct BlockValidator<'a, const W: usize> {
    ctx: CheckContext<'a>,
    options: ValidateOptions,
    scratch: ProgramScratch<W>,
    /// Per marker: earlier fine markers it must be tested against.
    self_partners: Vec<Vec<(usize, f32)>>,
    stash: Vec<[[f32; W]; 3]>,
    coarse_hit: Vec<bool>,
    stats: ValidationStats,
}

impl<'a, const W: usize> BlockValidator<'a, W> {
    pub fn new(ctx: CheckContext<'a>, options: ValidateOptions) -> Self {
        let checks = ctx.robot.program.checks();
        let self_partners = checks
            .iter()
            .enumerate()
            .map(|(i, m)| {
                if m.sphere.level == SphereLevel::Coarse {
                    return Vec::new();
                }
                (0..i)
                    .filter(|&j| {
                        let other = &checks[j];
                        other.sphere.level != SphereLevel::Coarse
                            && ctx.robot.pairs.contains(other.sphere.link, m.sphere.link)
                    })
                    .map(|j| (j, checks[j].radius))
                    .collect()
            })
            .collect();
        Self {
            ctx,
            options,
            scratch: ProgramScratch::new(&ctx.robot.program),
            self_partners,
            stash: vec![[[0.0; W]; 3]; checks.len()],
            coarse_hit: vec![false; ctx.env.len()],
            stats: ValidationStats::default(),
        }
    }

    pub fn context(&self) -> CheckContext<'a> {
        self.ctx
    }

    pub fn options(&self) -> ValidateOptions {
        self.options
    }

    pub fn set_options(&mut self, options: ValidateOptions) {
        self.options = options;
    }

    pub fn stats(&self) -> ValidationStats {
        self.stats
    }

    pub fn reset_stats(&mut self) {
        self.stats = ValidationStats::default();
    }

    /// Lanes of `block` that are collision free (bit set = valid).
    ///
    /// Padding lanes report lane 0's verdict. In reject-all mode the result
    /// is either every lane or none.
    pub fn validate(&mut self, block: &ConfigBlock<W>) -> Result<LaneMask<W>> {
        check_dim(self.ctx.robot.dof(), block.dim())?;
        self.stats.blocks += 1;
        self.coarse_hit.fill(false);
        let mut sink = Sink {
            env: self.ctx.env,
            options: self.options,
            valid_count: block.valid_count(),
            index: 0,
            invalid: LaneMask::NONE,
            self_partners: &self.self_partners,
            stash: &mut self.stash,
            coarse_hit: &mut self.coarse_hit,
            stats: &mut self.stats,
        };
        let finished =
            evaluate_program(&self.ctx.robot.program, block, &mut self.scratch, &mut sink)?;
        let invalid = sink.invalid;
        if !finished {
            self.stats.early_exits += 1;
        }
        if self.options.reject_all && invalid.any_in(block.valid_count()) {
            return Ok(LaneMask::NONE);
        }
        Ok(!invalid)
    }

    /// Validity of a single configuration.
    pub fn validate_config(&mut self, q: &Configuration) -> Result<bool> {
        Ok(self.validate(&ConfigBlock::splat(q))?.get(0))
    }
}

struct Sink<'s, const W: usize> {
    env: &'s Environment,
    options: ValidateOptions,
    valid_count: usize,
    index: usize,
    invalid: LaneMask<W>,
    self_partners: &'s [Vec<(usize, f32)>],
    stash: &'s mut [[[f32; W]; 3]],
    coarse_hit: &'s mut [bool],
    stats: &'s mut ValidationStats,
}

impl<const W: usize> CheckSink<W> for Sink<'_, W> {
    fn check(&mut self, marker: &CheckMarker, center: [&[f32; W]; 3]) -> Flow {
        let index = self.index;
        self.index += 1;

        // Markers arrive link by link with the coarse sphere first, so
        // `coarse_hit` always describes the link of the current fine sphere.
        if marker.sphere.level == SphereLevel::Coarse {
            if self.options.pruning {
                let r = marker.radius + COARSE_MARGIN;
                for (hit, prim) in self.coarse_hit.iter_mut().zip(&self.env.primitives) {
                    *hit = prim.collides_lanes(center, r).any();
                }
                self.stats.coarse_tests += self.env.len() as u64;
            }
            return Flow::Continue;
        }

        let mut hits = LaneMask::NONE;
        for (o, prim) in self.env.primitives.iter().enumerate() {
            if self.options.pruning && !self.coarse_hit[o] {
                self.stats.pruned_tests += 1;
                continue;
            }
            self.stats.fine_tests += 1;
            hits = hits | prim.collides_lanes(center, marker.radius);
        }

        for &(j, other_radius) in &self.self_partners[index] {
            let [ox, oy, oz] = &self.stash[j];
            self.stats.self_tests += 1;
            // Sphere-sphere with per-lane obstacle centers.
            let reach = marker.radius + other_radius;
            let reach2 = reach * reach;
            let [x, y, z] = center;
            hits = hits
                | LaneMask(std::array::from_fn(|k| {
                    let dx = x[k] - ox[k];
                    let dy = y[k] - oy[k];
                    let dz = z[k] - oz[k];
                    dx * dx + dy * dy + dz * dz <= reach2
                }));
        }
        self.stash[index] = [*center[0], *center[1], *center[2]];

        self.invalid = self.invalid | hits;
        let n = self.valid_count;
        if (self.options.reject_all && self.invalid.any_in(n)) || self.invalid.all_in(n) {
            return Flow::Stop;
        }
        Flow::Continue
    }
}

/// One-shot form of [`BlockValidator::validate`].
pub fn validate_block<const W: usize>(
    ctx: CheckContext<'_>,
    block: &ConfigBlock<W>,
    options: ValidateOptions,
) -> Result<LaneMask<W>> {
    BlockValidator::new(ctx, options).validate(block)
}
