//! Lane-wide numeric primitives.
//!
//! A [`ConfigBlock`] stores `W` configurations in struct-of-arrays form: row
//! `j` holds joint `j` of every lane, so each arithmetic step of forward
//! kinematics runs over a contiguous `[f32; W]`. Every per-lane computation in
//! this crate uses exactly the same scalar arithmetic regardless of `W`, which
//! is what lets a `W = 1` build act as a bit-exact oracle for wider builds.

use std::ops::{BitAnd, BitOr, Not};

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Default lane width.
pub const LANES: usize = 8;

/// A single joint configuration in array-of-structs form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f32>", into = "Vec<f32>")]
pub struct Configuration(Vec<f32>);

impl Configuration {
    pub fn new(values: Vec<f32>) -> Result<Self> {
        if values.iter().all(|v| v.is_finite()) {
            Ok(Self(values))
        } else {
            Err(Error::NonFinite)
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn values(&self) -> &[f32] {
        &self.0
    }

    /// True when every value has the same bit pattern.
    pub fn bitwise_eq(&self, other: &Self) -> bool {
        self.0.len() == other.0.len()
            && self
                .0
                .iter()
                .zip(&other.0)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

impl TryFrom<Vec<f32>> for Configuration {
    type Error = Error;

    fn try_from(values: Vec<f32>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<Configuration> for Vec<f32> {
    fn from(c: Configuration) -> Self {
        c.0
    }
}

/// One flag per lane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LaneMask<const W: usize>(pub [bool; W]);

impl<const W: usize> LaneMask<W> {
    pub const NONE: Self = Self([false; W]);
    pub const ALL: Self = Self([true; W]);

    #[inline]
    pub fn get(&self, lane: usize) -> bool {
        self.0[lane]
    }

    #[inline]
    pub fn set(&mut self, lane: usize, value: bool) {
        self.0[lane] = value;
    }

    #[inline]
    pub fn any(&self) -> bool {
        self.0.iter().any(|&b| b)
    }

    #[inline]
    pub fn all(&self) -> bool {
        self.0.iter().all(|&b| b)
    }

    /// True when any of the first `count` lanes is set.
    #[inline]
    pub fn any_in(&self, count: usize) -> bool {
        self.0[..count].iter().any(|&b| b)
    }

    #[inline]
    pub fn all_in(&self, count: usize) -> bool {
        self.0[..count].iter().all(|&b| b)
    }

    pub fn count(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }
}

impl<const W: usize> BitAnd for LaneMask<W> {
    type Output = Self;

    #[inline]
    fn bitand(self, rhs: Self) -> Self {
        Self(std::array::from_fn(|k| self.0[k] & rhs.0[k]))
    }
}

impl<const W: usize> BitOr for LaneMask<W> {
    type Output = Self;

    #[inline]
    fn bitor(self, rhs: Self) -> Self {
        Self(std::array::from_fn(|k| self.0[k] | rhs.0[k]))
    }
}

impl<const W: usize> Not for LaneMask<W> {
    type Output = Self;

    #[inline]
    fn not(self) -> Self {
        Self(self.0.map(|b| !b))
    }
}

/// `W` configurations in struct-of-arrays layout.
///
/// Lanes at or beyond `valid_count` replicate lane 0, so they are always
/// within joint limits and never produce a verdict lane 0 would not.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigBlock<const W: usize> {
    rows: Vec<[f32; W]>,
    valid_count: usize,
}

impl<const W: usize> ConfigBlock<W> {
    /// Builds a block from rows, re-imposing the padding rule on lanes
    /// `valid_count..W`.
    pub fn from_rows(mut rows: Vec<[f32; W]>, valid_count: usize) -> Result<Self> {
        if valid_count == 0 {
            return Err(Error::EmptyInput);
        }
        if valid_count > W {
            return Err(Error::TooManyConfigurations {
                count: valid_count,
                width: W,
            });
        }
        for row in &mut rows {
            let head = row[0];
            row[valid_count..].fill(head);
        }
        Ok(Self { rows, valid_count })
    }

    /// A block where every lane is `config`.
    pub fn splat(config: &Configuration) -> Self {
        Self {
            rows: config.values().iter().map(|&v| [v; W]).collect(),
            valid_count: 1,
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn valid_count(&self) -> usize {
        self.valid_count
    }

    #[inline]
    pub fn rows(&self) -> &[[f32; W]] {
        &self.rows
    }

    #[inline]
    pub fn row(&self, joint: usize) -> &[f32; W] {
        &self.rows[joint]
    }

    /// Configuration held in `lane` (including padding lanes).
    pub fn lane(&self, lane: usize) -> Configuration {
        Configuration(self.rows.iter().map(|r| r[lane]).collect())
    }
}

/// Transposes up to `W` configurations into a block.
pub fn soa_from_aos<const W: usize>(configs: &[Configuration]) -> Result<ConfigBlock<W>> {
    let first = configs.first().ok_or(Error::EmptyInput)?;
    if configs.len() > W {
        return Err(Error::TooManyConfigurations {
            count: configs.len(),
            width: W,
        });
    }
    let dim = first.dim();
    for c in configs {
        check_dim(dim, c.dim())?;
    }
    let rows = (0..dim)
        .map(|j| std::array::from_fn(|k| configs.get(k).unwrap_or(first).0[j]))
        .collect();
    Ok(ConfigBlock {
        rows,
        valid_count: configs.len(),
    })
}

/// Inverse of [`soa_from_aos`]: returns the `valid_count` meaningful lanes.
pub fn aos_from_soa<const W: usize>(block: &ConfigBlock<W>) -> Vec<Configuration> {
    (0..block.valid_count).map(|k| block.lane(k)).collect()
}

/// Lane `k` holds `(1 - t_k) * start + t_k * goal`.
///
/// The weighted-sum form reproduces both endpoints exactly at `t = 0` and
/// `t = 1`.
pub fn interpolate_lanes<const W: usize>(
    start: &Configuration,
    goal: &Configuration,
    params: &[f32; W],
) -> Result<ConfigBlock<W>> {
    check_dim(start.dim(), goal.dim())?;
    let w0 = params.map(|t| 1.0 - t);
    let rows = start
        .values()
        .iter()
        .zip(goal.values())
        .map(|(&a, &b)| std::array::from_fn(|k| w0[k] * a + params[k] * b))
        .collect();
    Ok(ConfigBlock {
        rows,
        valid_count: W,
    })
}

/// Interpolation weights for discretization step `step` out of `steps`.
///
/// Both weights come straight from integer ratios, so step `i` of the motion
/// `a -> b` is bitwise identical to step `steps - i` of `b -> a`.
#[inline]
pub(crate) fn step_weights(step: u32, steps: u32) -> (f32, f32) {
    let n = steps as f32;
    ((steps - step) as f32 / n, step as f32 / n)
}

/// State `step / steps` of the straight motion `start -> goal`.
pub fn interpolate_step(
    start: &Configuration,
    goal: &Configuration,
    step: u32,
    steps: u32,
) -> Configuration {
    let (w0, w1) = step_weights(step, steps);
    Configuration(
        start
            .values()
            .iter()
            .zip(goal.values())
            .map(|(&a, &b)| w0 * a + w1 * b)
            .collect(),
    )
}

/// Builds a block holding discretization steps `steps_per_lane` of
/// `start -> goal`; lanes at or past `valid` are padding.
pub(crate) fn interpolate_steps<const W: usize>(
    start: &Configuration,
    goal: &Configuration,
    steps_per_lane: &[u32; W],
    steps: u32,
    valid: usize,
) -> ConfigBlock<W> {
    let weights: [(f32, f32); W] = std::array::from_fn(|k| {
        let lane = if k < valid { k } else { 0 };
        step_weights(steps_per_lane[lane], steps)
    });
    let rows = start
        .values()
        .iter()
        .zip(goal.values())
        .map(|(&a, &b)| std::array::from_fn(|k| weights[k].0 * a + weights[k].1 * b))
        .collect();
    ConfigBlock {
        rows,
        valid_count: valid,
    }
}

#[inline]
pub(crate) fn squared_distance(a: &[f32], b: &[f32]) -> f32 {
    a.iter().zip(b).fold(0.0, |acc, (&x, &y)| {
        let d = x - y;
        acc + d * d
    })
}

/// Euclidean distance between two configurations.
pub fn l2_distance(a: &Configuration, b: &Configuration) -> Result<f32> {
    check_dim(a.dim(), b.dim())?;
    Ok(squared_distance(a.values(), b.values()).sqrt())
}

// Cody-Waite split of pi/2; the leading part has few enough bits that
// `k * PIO2_HI` is exact for the quadrant counts reached in practice.
const PIO2_HI: f32 = 1.570_312_5;
const PIO2_MID: f32 = 4.837_512_969_970_703e-4;
const PIO2_LO: f32 = 7.549_789_954_891_882e-8;

// Minimax coefficients on [-pi/4, pi/4].
const SIN_C1: f32 = -1.666_665_461_1e-1;
const SIN_C2: f32 = 8.332_160_873_6e-3;
const SIN_C3: f32 = -1.951_529_589_1e-4;
const COS_C1: f32 = 4.166_664_568_298_827e-2;
const COS_C2: f32 = -1.388_731_625_493_765e-3;
const COS_C3: f32 = 2.443_315_711_809_948e-5;

// Adding 1.5 * 2^23 rounds to the nearest integer (ties to even) and leaves
// that integer in the low mantissa bits.
const ROUND_MAGIC: f32 = 12_582_912.0;

/// Scalar sine and cosine used by every lane. Branch-free so that lane loops
/// vectorize; accurate to about 2e-6 for `|x| <= 4 pi` and usable up to
/// `|x| < 2^21`.
#[inline]
pub fn sin_cos(x: f32) -> (f32, f32) {
    let t = x * std::f32::consts::FRAC_2_PI + ROUND_MAGIC;
    let q = t.to_bits();
    let k = t - ROUND_MAGIC;
    let r = ((x - k * PIO2_HI) - k * PIO2_MID) - k * PIO2_LO;
    let r2 = r * r;
    let s = r + r * r2 * (SIN_C1 + r2 * (SIN_C2 + r2 * SIN_C3));
    let c = 1.0 - 0.5 * r2 + r2 * r2 * (COS_C1 + r2 * (COS_C2 + r2 * COS_C3));
    // Quadrant q: odd swaps sin and cos; the sign bits follow q and q + 1.
    let swap = q & 1 != 0;
    let (a, b) = if swap { (c, s) } else { (s, c) };
    let sin = f32::from_bits(a.to_bits() ^ ((q & 2) << 30));
    let cos = f32::from_bits(b.to_bits() ^ ((q.wrapping_add(1) & 2) << 30));
    (sin, cos)
}

#[inline]
pub fn sin(x: f32) -> f32 {
    sin_cos(x).0
}

#[inline]
pub fn cos(x: f32) -> f32 {
    sin_cos(x).1
}

/// Per-lane sine and cosine.
pub fn sincos_lanes<const W: usize>(angles: &[f32; W]) -> ([f32; W], [f32; W]) {
    let pairs = angles.map(sin_cos);
    (pairs.map(|p| p.0), pairs.map(|p| p.1))
}
