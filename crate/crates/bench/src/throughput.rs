//! Batched state validation throughput.

use std::hint::black_box;
use std::time::{Duration, Instant};

use vecplan_core::collision::{BlockValidator, CheckContext, ValidateOptions};
use vecplan_core::sampling::HaltonSampler;
use vecplan_core::vector::{soa_from_aos, ConfigBlock, Configuration};

#[derive(Debug, Clone, Copy)]
pub struct Throughput {
    pub lanes: usize,
    pub states: u64,
    pub elapsed: Duration,
    /// Fraction of states found valid.
    pub valid_fraction: f64,
}

impl Throughput {
    pub fn states_per_second(&self) -> f64 {
        self.states as f64 / self.elapsed.as_secs_f64()
    }
}

/// `count` Halton configurations over the robot's joint limits.
pub fn sample_states(ctx: CheckContext<'_>, count: usize) -> Vec<Configuration> {
    let mut sampler = HaltonSampler::new(ctx.robot.limits());
    (0..count).map(|_| sampler.next_sample()).collect()
}

/// Validates `states` in blocks of `W` lanes, repeating the whole batch
/// until at least `min_time` has passed.
pub fn measure_throughput<const W: usize>(
    ctx: CheckContext<'_>,
    states: &[Configuration],
    min_time: Duration,
) -> Throughput {
    let blocks: Vec<ConfigBlock<W>> = states
        .chunks(W)
        .map(|c| soa_from_aos::<W>(c).expect("states share a dimension"))
        .collect();
    let mut validator = BlockValidator::<W>::new(ctx, ValidateOptions::default());

    let mut valid = 0u64;
    for b in &blocks {
        let mask = validator.validate(b).expect("dimensions match");
        valid += mask.0[..b.valid_count()].iter().filter(|&&v| v).count() as u64;
    }

    let started = Instant::now();
    let mut passes = 0u64;
    loop {
        for b in &blocks {
            black_box(validator.validate(black_box(b)).expect("dimensions match"));
        }
        passes += 1;
        if started.elapsed() >= min_time {
            break;
        }
    }
    Throughput {
        lanes: W,
        states: passes * states.len() as u64,
        elapsed: started.elapsed(),
        valid_fraction: valid as f64 / states.len() as f64,
    }
}
