//! Path post-processing: randomized shortcutting and B-spline smoothing.
//!
//! Both passes only ever splice in motions that pass the rake check, so a
//! valid input path stays valid, and neither moves the endpoints.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::collision::{BlockValidator, CheckContext, ValidateOptions};
use crate::error::{Error, Result};
use crate::motion::{validate_motion_rake, RakeDirection};
use crate::planners::{steer, Path};
use crate::vector::{l2_distance, Configuration};

/// A shortcut must shorten the path by more than this to be taken.
pub const MIN_IMPROVEMENT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimplifySettings {
    pub shortcut_attempts: usize,
    pub smooth_rounds: usize,
    pub seed: u64,
    pub resolution: f32,
    pub rake_direction: RakeDirection,
}

impl Default for SimplifySettings {
    fn default() -> Self {
        Self {
            shortcut_attempts: 100,
            smooth_rounds: 3,
            seed: 0,
            resolution: 0.02,
            rake_direction: RakeDirection::Forward,
        }
    }
}

/// Sum of consecutive distances, accumulated in `f64`.
pub fn path_cost(path: &Path) -> Result<f64> {
    if path.len() < 2 {
        return Err(Error::TooFewWaypoints(path.len()));
    }
    Ok(path.cost())
}

fn cost_of(waypoints: &[Configuration]) -> f64 {
    waypoints
        .windows(2)
        .map(|w| l2_distance(&w[0], &w[1]).unwrap() as f64)
        .sum()
}

struct Checker<'a, const W: usize> {
    validator: BlockValidator<'a, W>,
    resolution: f32,
    direction: RakeDirection,
}

impl<const W: usize> Checker<'_, W> {
    fn motion(&mut self, a: &Configuration, b: &Configuration) -> Result<bool> {
        validate_motion_rake(&mut self.validator, a, b, self.resolution, self.direction)
    }
}

fn checker<'a, const W: usize>(
    ctx: CheckContext<'a>,
    settings: &SimplifySettings,
) -> Result<Checker<'a, W>> {
    if !(settings.resolution > 0.0) {
        return Err(Error::NonPositiveResolution(settings.resolution));
    }
    Ok(Checker {
        validator: BlockValidator::new(ctx, ValidateOptions::default()),
        resolution: settings.resolution,
        direction: settings.rake_direction,
    })
}

/// Point at arc length `s` along `waypoints`, with the segment it lies on.
fn locate(waypoints: &[Configuration], cumulative: &[f64], s: f64) -> (usize, Configuration) {
    let seg = cumulative
        .partition_point(|&c| c <= s)
        .saturating_sub(1)
        .min(waypoints.len() - 2);
    let len = cumulative[seg + 1] - cumulative[seg];
    let t = if len > 0.0 {
        ((s - cumulative[seg]) / len).clamp(0.0, 1.0) as f32
    } else {
        0.0
    };
    (seg, steer(&waypoints[seg], &waypoints[seg + 1], t))
}

/// Randomized shortcutting: each attempt picks two arc-length positions
/// uniformly, and replaces the stretch between them with a straight motion
/// if all new motions are valid and the path gets shorter.
pub fn shortcut<const W: usize>(
    path: &Path,
    ctx: CheckContext<'_>,
    settings: &SimplifySettings,
) -> Result<Path> {
    let mut check = checker::<W>(ctx, settings)?;
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut waypoints = path.waypoints.clone();
    let mut cost = cost_of(&waypoints);

    for _ in 0..settings.shortcut_attempts {
        if waypoints.len() < 3 {
            break;
        }
        let mut cumulative = vec![0.0];
        for w in waypoints.windows(2) {
            cumulative.push(cumulative.last().unwrap() + l2_distance(&w[0], &w[1])? as f64);
        }
        let total = *cumulative.last().unwrap();
        let (u, v) = (rng.gen::<f64>() * total, rng.gen::<f64>() * total);
        let (lo, hi) = (u.min(v), u.max(v));
        let (sa, pa) = locate(&waypoints, &cumulative, lo);
        let (sb, pb) = locate(&waypoints, &cumulative, hi);
        if sa == sb {
            continue;
        }

        let mut candidate: Vec<Configuration> = waypoints[..=sa].to_vec();
        if !pa.bitwise_eq(&waypoints[sa]) {
            candidate.push(pa.clone());
        }
        candidate.push(pb.clone());
        if pb.bitwise_eq(&waypoints[sb + 1]) {
            candidate.pop();
        }
        candidate.extend_from_slice(&waypoints[sb + 1..]);
        let new_cost = cost_of(&candidate);
        if new_cost >= cost - MIN_IMPROVEMENT {
            continue;
        }
        let ok = check.motion(&waypoints[sa], &pa)?
            && check.motion(&pa, &pb)?
            && check.motion(&pb, &waypoints[sb + 1])?;
        if ok {
            waypoints = candidate;
            cost = new_cost;
        }
    }
    Path::new(waypoints)
}

/// Local cubic B-spline smoothing. Each round moves every interior waypoint
/// in turn to `(prev + 4 * cur + next) / 6` when both adjacent motions stay
/// valid and the path does not get longer.
pub fn bspline_smooth<const W: usize>(
    path: &Path,
    ctx: CheckContext<'_>,
    settings: &SimplifySettings,
) -> Result<Path> {
    let mut check = checker::<W>(ctx, settings)?;
    let mut waypoints = path.waypoints.clone();
    let mut cost = cost_of(&waypoints);
    for _ in 0..settings.smooth_rounds {
        for i in 1..waypoints.len().saturating_sub(1) {
            let (prev, cur, next) = (&waypoints[i - 1], &waypoints[i], &waypoints[i + 1]);
            let values = prev
                .values()
                .iter()
                .zip(cur.values())
                .zip(next.values())
                .map(|((&p, &c), &n)| (p + 4.0 * c + n) / 6.0)
                .collect();
            let proposal = Configuration::new(values)?;
            if proposal.bitwise_eq(cur) {
                continue;
            }
            let old = waypoints[i].clone();
            waypoints[i] = proposal;
            let new_cost = cost_of(&waypoints);
            let ok = new_cost <= cost
                && check.motion(&waypoints[i - 1], &waypoints[i])?
                && check.motion(&waypoints[i], &waypoints[i + 1])?;
            if ok {
                cost = new_cost;
            } else {
                waypoints[i] = old;
            }
        }
    }
    Path::new(waypoints)
}

/// Shortcutting followed by smoothing.
pub fn simplify<const W: usize>(
    path: &Path,
    ctx: CheckContext<'_>,
    settings: &SimplifySettings,
) -> Result<Path> {
    let cut = shortcut::<W>(path, ctx, settings)?;
    bspline_smooth::<W>(&cut, ctx, settings)
}
