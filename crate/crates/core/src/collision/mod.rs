//! Lane-wide sphere-vs-primitive narrowphase and batch state validation.
//!
//! Every test treats touching as colliding: a lane is flagged when the
//! squared center-to-primitive distance is `<=` the squared radius sum.

mod env;
mod validate;

pub use env::{Environment, Primitive};
pub use validate::{
    validate_block, BlockValidator, CheckContext, ValidateOptions, ValidationStats,
};

use crate::vector::LaneMask;

#[inline(always)]
fn dot3(a: [f32; 3], b: [f32; 3]) -> f32 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Lanes whose sphere `(x, y, z, r)` touches the sphere `(center, radius)`.
#[inline]
pub fn sphere_vs_sphere_lanes<const W: usize>(
    center: [&[f32; W]; 3],
    r: f32,
    obstacle_center: [f32; 3],
    obstacle_radius: f32,
) -> LaneMask<W> {
    let reach = r + obstacle_radius;
    let reach2 = reach * reach;
    let [x, y, z] = center;
    LaneMask(std::array::from_fn(|k| {
        let dx = x[k] - obstacle_center[0];
        let dy = y[k] - obstacle_center[1];
        let dz = z[k] - obstacle_center[2];
        dx * dx + dy * dy + dz * dz <= reach2
    }))
}

/// Lanes whose sphere touches the capsule around segment `p0 -> p1`.
///
/// The closest point comes from clamping the projection onto the segment to
/// `[0, 1]`; a zero-length segment degenerates to a sphere at `p0`.
#[inline]
pub fn sphere_vs_capsule_lanes<const W: usize>(
    center: [&[f32; W]; 3],
    r: f32,
    p0: [f32; 3],
    p1: [f32; 3],
    capsule_radius: f32,
) -> LaneMask<W> {
    let axis = [p1[0] - p0[0], p1[1] - p0[1], p1[2] - p0[2]];
    let len2 = dot3(axis, axis);
    let inv_len2 = if len2 > 0.0 { 1.0 / len2 } else { 0.0 };
    let reach = r + capsule_radius;
    let reach2 = reach * reach;
    let [x, y, z] = center;
    LaneMask(std::array::from_fn(|k| {
        let d = [x[k] - p0[0], y[k] - p0[1], z[k] - p0[2]];
        let t = (dot3(d, axis) * inv_len2).clamp(0.0, 1.0);
        let ex = d[0] - t * axis[0];
        let ey = d[1] - t * axis[1];
        let ez = d[2] - t * axis[2];
        ex * ex + ey * ey + ez * ez <= reach2
    }))
}

/// Lanes whose sphere touches an oriented box.
///
/// `rotation` maps box-frame vectors to world (row-major), so the center is
/// brought into the box frame with its transpose and clamped per axis.
#[inline]
pub fn sphere_vs_cuboid_lanes<const W: usize>(
    center: [&[f32; W]; 3],
    r: f32,
    box_center: [f32; 3],
    half_extents: [f32; 3],
    rotation: &[[f32; 3]; 3],
) -> LaneMask<W> {
    let r2 = r * r;
    let [x, y, z] = center;
    LaneMask(std::array::from_fn(|k| {
        let d = [
            x[k] - box_center[0],
            y[k] - box_center[1],
            z[k] - box_center[2],
        ];
        let mut dist2 = 0.0;
        for a in 0..3 {
            let local = rotation[0][a] * d[0] + rotation[1][a] * d[1] + rotation[2][a] * d[2];
            let excess = local - local.clamp(-half_extents[a], half_extents[a]);
            dist2 += excess * excess;
        }
        dist2 <= r2
    }))
}
