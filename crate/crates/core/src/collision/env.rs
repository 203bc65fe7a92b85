//! Environment documents.
//!
//! ```json
//! {
//!   "name": "shelf",
//!   "obstacles": [
//!     { "type": "sphere", "center": [0.5, 0.0, 0.4], "radius": 0.1 },
//!     { "type": "capsule", "p0": [0, 0, 0], "p1": [0, 0, 1], "radius": 0.05 },
//!     { "type": "cylinder", "p0": [0, 0, 0], "p1": [0, 0, 1], "radius": 0.05 },
//!     { "type": "cuboid", "center": [0.6, 0, 0.2], "half_extents": [0.2, 0.4, 0.01],
//!       "rpy": [0, 0, 0.3] }
//!   ]
//! }
//! ```
//!
//! Meters and radians. A cuboid's orientation is given either as `rpy`
//! (fixed-axis roll/pitch/yaw) or `rotation` (row-major 3x3, box frame to
//! world); identity if both are absent. Cylinders are loaded as the capsule
//! with the same axis and radius, which contains them.

use serde::{Deserialize, Serialize};

use super::{sphere_vs_capsule_lanes, sphere_vs_cuboid_lanes, sphere_vs_sphere_lanes};
use crate::error::{Error, Result};
use crate::vector::LaneMask;

#[derive(Debug, Clone, PartialEq)]
pub enum Primitive {
    Sphere {
        center: [f32; 3],
        radius: f32,
    },
    Capsule {
        p0: [f32; 3],
        p1: [f32; 3],
        radius: f32,
    },
    Cuboid {
        center: [f32; 3],
        half_extents: [f32; 3],
        rotation: [[f32; 3]; 3],
    },
}

impl Primitive {
    /// Lanes where the sphere `(center, r)` touches this primitive.
    #[inline]
    pub fn collides_lanes<const W: usize>(&self, center: [&[f32; W]; 3], r: f32) -> LaneMask<W> {
        match self {
            Primitive::Sphere { center: c, radius } => {
                sphere_vs_sphere_lanes(center, r, *c, *radius)
            }
            Primitive::Capsule { p0, p1, radius } => {
                sphere_vs_capsule_lanes(center, r, *p0, *p1, *radius)
            }
            Primitive::Cuboid {
                center: c,
                half_extents,
                rotation,
            } => sphere_vs_cuboid_lanes(center, r, *c, *half_extents, rotation),
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidPrimitive(what.to_string()));
        match self {
            Primitive::Sphere { radius, .. } | Primitive::Capsule { radius, .. }
                if !(*radius > 0.0) =>
            {
                bad("radius must be positive")
            }
            Primitive::Cuboid {
                half_extents,
                rotation,
                ..
            } => {
                if !half_extents.iter().all(|&h| h > 0.0) {
                    return bad("half extents must be positive");
                }
                for i in 0..3 {
                    for j in 0..3 {
                        let dot: f32 = (0..3).map(|k| rotation[i][k] * rotation[j][k]).sum();
                        let expected = if i == j { 1.0 } else { 0.0 };
                        if (dot - expected).abs() > 1e-5 {
                            return bad("rotation is not orthonormal");
                        }
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Named set of obstacles, checked in document order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Environment {
    pub name: String,
    pub primitives: Vec<Primitive>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum PrimitiveDoc {
    Sphere {
        center: [f64; 3],
        radius: f64,
    },
    Capsule {
        p0: [f64; 3],
        p1: [f64; 3],
        radius: f64,
    },
    Cylinder {
        p0: [f64; 3],
        p1: [f64; 3],
        radius: f64,
    },
    Cuboid {
        center: [f64; 3],
        half_extents: [f64; 3],
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rpy: Option<[f64; 3]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rotation: Option<[f64; 9]>,
    },
}

/// Serialized form of an [`Environment`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentDoc {
    #[serde(default)]
    name: String,
    obstacles: Vec<PrimitiveDoc>,
}

fn f32x3(v: [f64; 3]) -> [f32; 3] {
    v.map(|x| x as f32)
}

fn rpy_matrix([r, p, y]: [f64; 3]) -> [[f64; 3]; 3] {
    let (sr, cr) = r.sin_cos();
    let (sp, cp) = p.sin_cos();
    let (sy, cy) = y.sin_cos();
    [
        [cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr],
        [sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr],
        [-sp, cp * sr, cp * cr],
    ]
}

impl TryFrom<EnvironmentDoc> for Environment {
    type Error = Error;

    fn try_from(doc: EnvironmentDoc) -> Result<Self> {
        let primitives = doc
            .obstacles
            .into_iter()
            .map(|p| {
                let prim = match p {
                    PrimitiveDoc::Sphere { center, radius } => Primitive::Sphere {
                        center: f32x3(center),
                        radius: radius as f32,
                    },
                    PrimitiveDoc::Capsule { p0, p1, radius }
                    | PrimitiveDoc::Cylinder { p0, p1, radius } => Primitive::Capsule {
                        p0: f32x3(p0),
                        p1: f32x3(p1),
                        radius: radius as f32,
                    },
                    PrimitiveDoc::Cuboid {
                        center,
                        half_extents,
                        rpy,
                        rotation,
                    } => {
                        let m = match (rpy, rotation) {
                            (Some(_), Some(_)) => {
                                return Err(Error::InvalidPrimitive(
                                    "give either rpy or rotation".into(),
                                ))
                            }
                            (Some(rpy), None) => rpy_matrix(rpy),
                            (None, Some(r)) => {
                                [[r[0], r[1], r[2]], [r[3], r[4], r[5]], [r[6], r[7], r[8]]]
                            }
                            (None, None) => rpy_matrix([0.0; 3]),
                        };
                        Primitive::Cuboid {
                            center: f32x3(center),
                            half_extents: f32x3(half_extents),
                            rotation: m.map(f32x3),
                        }
                    }
                };
                prim.validate()?;
                Ok(prim)
            })
            .collect::<Result<_>>()?;
        Ok(Environment {
            name: doc.name,
            primitives,
        })
    }
}

impl From<&Environment> for EnvironmentDoc {
    fn from(env: &Environment) -> Self {
        let f64x3 = |v: [f32; 3]| v.map(f64::from);
        let obstacles = env
            .primitives
            .iter()
            .map(|p| match p {
                Primitive::Sphere { center, radius } => PrimitiveDoc::Sphere {
                    center: f64x3(*center),
                    radius: *radius as f64,
                },
                Primitive::Capsule { p0, p1, radius } => PrimitiveDoc::Capsule {
                    p0: f64x3(*p0),
                    p1: f64x3(*p1),
                    radius: *radius as f64,
                },
                Primitive::Cuboid {
                    center,
                    half_extents,
                    rotation,
                } => PrimitiveDoc::Cuboid {
                    center: f64x3(*center),
                    half_extents: f64x3(*half_extents),
                    rpy: None,
                    rotation: Some(std::array::from_fn(|i| rotation[i / 3][i % 3] as f64)),
                },
            })
            .collect();
        EnvironmentDoc {
            name: env.name.clone(),
            obstacles,
        }
    }
}

impl Serialize for Environment {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        EnvironmentDoc::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Environment {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let doc = EnvironmentDoc::deserialize(deserializer)?;
        Environment::try_from(doc).map_err(serde::de::Error::custom)
    }
}

impl Environment {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            what: "environment",
            message: e.to_string(),
        })
    }

    pub fn empty(name: &str) -> Self {
        Self {
            name: name.to_string(),
            primitives: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.primitives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primitives.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_kind() {
        let env = Environment::from_json(
            r#"{"name": "mix", "obstacles": [
                {"type": "sphere", "center": [1, 0, 0], "radius": 0.5},
                {"type": "cylinder", "p0": [0, 0, 0], "p1": [0, 0, 1], "radius": 0.1},
                {"type": "cuboid", "center": [0, 0, 0], "half_extents": [1, 1, 1], "rpy": [0, 0, 1.5707963267948966]},
                {"type": "cuboid", "center": [0, 0, 0], "half_extents": [1, 2, 3], "rotation": [0, -1, 0, 1, 0, 0, 0, 0, 1]}
            ]}"#,
        )
        .unwrap();
        assert_eq!(env.name, "mix");
        assert_eq!(env.len(), 4);
        assert!(matches!(env.primitives[1], Primitive::Capsule { .. }));
        let (Primitive::Cuboid { rotation: a, .. }, Primitive::Cuboid { rotation: b, .. }) =
            (&env.primitives[2], &env.primitives[3])
        else {
            panic!("expected cuboids")
        };
        for i in 0..3 {
            for j in 0..3 {
                assert!((a[i][j] - b[i][j]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn rejects_invalid_primitives() {
        for doc in [
            r#"{"obstacles": [{"type": "sphere", "center": [0, 0, 0], "radius": 0}]}"#,
            r#"{"obstacles": [{"type": "cuboid", "center": [0, 0, 0], "half_extents": [1, -1, 1]}]}"#,
            r#"{"obstacles": [{"type": "cuboid", "center": [0, 0, 0], "half_extents": [1, 1, 1], "rotation": [1, 0, 0, 1, 0, 0, 0, 0, 1]}]}"#,
            r#"{"obstacles": [{"type": "cone", "center": [0, 0, 0]}]}"#,
        ] {
            assert!(Environment::from_json(doc).is_err(), "{doc}");
        }
        assert!(Environment::from_json(r#"{"obstacles": []}"#)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn serialization_round_trip() {
        let env = Environment::from_json(
            r#"{"name": "rt", "obstacles": [
                {"type": "capsule", "p0": [0.1, 0.2, 0.3], "p1": [0.4, 0.5, 0.6], "radius": 0.07},
                {"type": "cuboid", "center": [0.3, 0, 0.2], "half_extents": [0.1, 0.2, 0.3], "rpy": [0.3, -0.2, 1.1]}
            ]}"#,
        )
        .unwrap();
        let text = serde_json::to_string(&env).unwrap();
        assert_eq!(Environment::from_json(&text).unwrap(), env);
    }
}
