//! Straight-line motion validation with the rake schedule.
//!
//! A motion is discretized into `n` states `i / n`, `i = 1..=n` (the start is
//! assumed checked). The indices are split into `W` contiguous strata of
//! length `s = ceil(n / W)`; iteration `j` checks index `k * s + j` in lane
//! `k`, so every block samples the whole motion at once and a collision
//! anywhere tends to be found in the first few blocks.

use serde::{Deserialize, Serialize};

use crate::collision::{BlockValidator, ValidateOptions};
use crate::error::{check_dim, Error, Result};
use crate::vector::{interpolate_steps, l2_distance, Configuration};

/// Order in which each stratum is combed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RakeDirection {
    /// `j = 1, 2, ..., s`.
    #[default]
    Forward,
    /// `j = s, s - 1, ..., 1`.
    Backward,
}

/// Number of checked states for `start -> goal` at `resolution`:
/// `max(1, ceil(distance / resolution))`.
pub fn discretization_count(
    start: &Configuration,
    goal: &Configuration,
    resolution: f32,
) -> Result<u32> {
    if !(resolution > 0.0) || !resolution.is_finite() {
        return Err(Error::NonPositiveResolution(resolution));
    }
    let d = l2_distance(start, goal)?;
    let n = (d as f64 / resolution as f64).ceil();
    Ok(n.clamp(1.0, u32::MAX as f64) as u32)
}

/// Stratum length `ceil(n / W)`, which is also the number of iterations.
pub fn rake_iterations(n: u32, lanes: usize) -> u32 {
    n.div_ceil(lanes as u32)
}

/// Indices checked in iteration `j` (`1..=s`) and how many lanes are in
/// range. In-range lanes always form a prefix.
pub fn rake_indices<const W: usize>(n: u32, j: u32) -> ([u32; W], usize) {
    let s = rake_iterations(n, W);
    debug_assert!((1..=s).contains(&j));
    let indices = std::array::from_fn(|k| k as u32 * s + j);
    let valid = (((n - j) / s) as usize + 1).min(W);
    (indices, valid)
}

/// Whether every state of `start -> goal` after the start is valid.
///
/// Runs at most `ceil(n / W)` block evaluations and stops at the first block
/// with an invalid in-range lane. The validator is switched to reject-all
/// mode for the duration of the call.
pub fn validate_motion_rake<const W: usize>(
    validator: &mut BlockValidator<'_, W>,
    start: &Configuration,
    goal: &Configuration,
    resolution: f32,
    direction: RakeDirection,
) -> Result<bool> {
    check_dim(validator.context().robot.dof(), start.dim())?;
    let n = discretization_count(start, goal, resolution)?;
    let s = rake_iterations(n, W);

    let saved = validator.options();
    validator.set_options(ValidateOptions {
        reject_all: true,
        ..saved
    });
    let mut verdict = Ok(true);
    for it in 0..s {
        let j = match direction {
            RakeDirection::Forward => it + 1,
            RakeDirection::Backward => s - it,
        };
        let (indices, valid) = rake_indices::<W>(n, j);
        let block = interpolate_steps(start, goal, &indices, n, valid);
        match validator.validate(&block) {
            Ok(mask) if mask.all_in(valid) => {}
            Ok(_) => {
                verdict = Ok(false);
                break;
            }
            Err(e) => {
                verdict = Err(e);
                break;
            }
        }
    }
    validator.set_options(saved);
    verdict
}
