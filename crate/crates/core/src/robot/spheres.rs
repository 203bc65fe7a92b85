//! Per-link sphere collision models.
//!
//! The document is JSON:
//!
//! ```json
//! {
//!   "links": {
//!     "link1": [{ "x": 0.0, "y": 0.0, "z": -0.1, "r": 0.07 }]
//!   },
//!   "ignore": [["link5", "link7"]]
//! }
//! ```
//!
//! Coordinates are meters in the link frame. `ignore` lists extra link pairs
//! excluded from self-collision checking (adjacent links are always excluded).

use std::collections::BTreeMap;

use serde::Deserialize;

use super::KinematicTree;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sphere {
    pub center: [f64; 3],
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SphereModel {
    fine: Vec<Vec<Sphere>>,
    coarse: Vec<Option<Sphere>>,
    ignore: Vec<(usize, usize)>,
}

impl SphereModel {
    /// Builds a model from per-link fine spheres, computing the coarse level.
    pub fn new(fine: Vec<Vec<Sphere>>, ignore: Vec<(usize, usize)>) -> Result<Self> {
        let coarse = fine
            .iter()
            .map(|s| {
                if s.is_empty() {
                    Ok(None)
                } else {
                    compute_coarse_sphere(s).map(Some)
                }
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            fine,
            coarse,
            ignore,
        })
    }

    pub fn fine(&self, link: usize) -> &[Sphere] {
        &self.fine[link]
    }

    pub fn coarse(&self, link: usize) -> Option<Sphere> {
        self.coarse[link]
    }

    pub fn link_count(&self) -> usize {
        self.fine.len()
    }

    pub fn fine_count(&self) -> usize {
        self.fine.iter().map(Vec::len).sum()
    }

    pub fn ignore_pairs(&self) -> &[(usize, usize)] {
        &self.ignore
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SphereDoc {
    links: BTreeMap<String, Vec<SphereEntry>>,
    #[serde(default)]
    ignore: Vec<[String; 2]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SphereEntry {
    x: f64,
    y: f64,
    z: f64,
    r: f64,
}

pub fn load_sphere_model(tree: &KinematicTree, text: &str) -> Result<SphereModel> {
    let doc: SphereDoc = serde_json::from_str(text).map_err(|e| Error::Parse {
        what: "sphere model",
        message: e.to_string(),
    })?;
    let lookup = |name: &str| {
        tree.link_index(name)
            .ok_or_else(|| Error::UnknownLink(name.to_string()))
    };

    let mut fine = vec![Vec::new(); tree.links().len()];
    for (name, entries) in &doc.links {
        let link = lookup(name)?;
        for e in entries {
            if !(e.r > 0.0) {
                return Err(Error::NonPositiveRadius {
                    link: name.clone(),
                    radius: e.r,
                });
            }
            fine[link].push(Sphere {
                center: [e.x, e.y, e.z],
                radius: e.r,
            });
        }
    }
    let ignore = doc
        .ignore
        .iter()
        .map(|[a, b]| Ok((lookup(a)?, lookup(b)?)))
        .collect::<Result<_>>()?;
    SphereModel::new(fine, ignore)
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

fn enclosing_radius(center: [f64; 3], spheres: &[Sphere]) -> f64 {
    spheres
        .iter()
        .map(|s| dist(s.center, center) + s.radius)
        .fold(0.0, f64::max)
}

/// A sphere containing every input sphere.
///
/// Starts at the bounding-box center and refines with Badoiu-Clarkson
/// steps toward the farthest surface point, keeping the best center seen.
/// After `ITERATIONS` steps the radius is within a few percent of the
/// minimal enclosing sphere.
pub fn compute_coarse_sphere(spheres: &[Sphere]) -> Result<Sphere> {
    const ITERATIONS: usize = 256;
    if spheres.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for s in spheres {
        for a in 0..3 {
            lo[a] = lo[a].min(s.center[a] - s.radius);
            hi[a] = hi[a].max(s.center[a] + s.radius);
        }
    }
    let mut center: [f64; 3] = std::array::from_fn(|a| 0.5 * (lo[a] + hi[a]));
    let mut best = Sphere {
        center,
        radius: enclosing_radius(center, spheres),
    };

    for i in 1..=ITERATIONS {
        let (far, d) = spheres
            .iter()
            .map(|s| (s, dist(s.center, center)))
            .max_by(|a, b| (a.1 + a.0.radius).total_cmp(&(b.1 + b.0.radius)))
            .unwrap();
        let dir = if d > 0.0 {
            std::array::from_fn(|a| (far.center[a] - center[a]) / d)
        } else {
            [1.0, 0.0, 0.0]
        };
        let step = 1.0 / (i as f64 + 1.0);
        for a in 0..3 {
            let target = far.center[a] + far.radius * dir[a];
            center[a] += (target - center[a]) * step;
        }
        let radius = enclosing_radius(center, spheres);
        if radius < best.radius {
            best = Sphere { center, radius };
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::robot::parse_urdf;
    use rand::{Rng, SeedableRng};

    const TWO_LINKS: &str = r#"<robot name="r"><link name="base"/><link name="arm"/>
        <joint name="j" type="revolute"><parent link="base"/><child link="arm"/>
        <axis xyz="0 0 1"/><limit lower="-3" upper="3"/></joint></robot>"#;

    fn contains(outer: &Sphere, inner: &Sphere) -> bool {
        dist(outer.center, inner.center) + inner.radius <= outer.radius + 1e-6
    }

    #[test]
    fn singleton_coarse_is_itself() {
        let tree = parse_urdf(TWO_LINKS).unwrap();
        let model = load_sphere_model(
            &tree,
            r#"{"links": {"arm": [{"x": 0, "y": 0, "z": 0, "r": 0.1}]}}"#,
        )
        .unwrap();
        let arm = tree.link_index("arm").unwrap();
        assert_eq!(
            model.coarse(arm),
            Some(Sphere {
                center: [0.0; 3],
                radius: 0.1
            })
        );
        assert!(model.fine(tree.link_index("base").unwrap()).is_empty());
        assert_eq!(model.coarse(tree.link_index("base").unwrap()), None);
    }

    #[test]
    fn empty_sphere_list() {
        let tree = parse_urdf(TWO_LINKS).unwrap();
        let model = load_sphere_model(&tree, r#"{"links": {"arm": []}}"#).unwrap();
        assert!(model.fine(1).is_empty());
        assert_eq!(model.coarse(1), None);
    }

    #[test]
    fn load_errors() {
        let tree = parse_urdf(TWO_LINKS).unwrap();
        let unknown = r#"{"links": {"hand": [{"x": 0, "y": 0, "z": 0, "r": 0.1}]}}"#;
        assert!(matches!(
            load_sphere_model(&tree, unknown),
            Err(Error::UnknownLink(_))
        ));
        let negative = r#"{"links": {"arm": [{"x": 0, "y": 0, "z": 0, "r": -0.1}]}}"#;
        assert!(matches!(
            load_sphere_model(&tree, negative),
            Err(Error::NonPositiveRadius { .. })
        ));
        let zero = r#"{"links": {"arm": [{"x": 0, "y": 0, "z": 0, "r": 0}]}}"#;
        assert!(load_sphere_model(&tree, zero).is_err());
        assert!(matches!(
            load_sphere_model(&tree, "{"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn two_unit_spheres() {
        let s = [
            Sphere {
                center: [-1.0, 0.0, 0.0],
                radius: 1.0,
            },
            Sphere {
                center: [1.0, 0.0, 0.0],
                radius: 1.0,
            },
        ];
        let c = compute_coarse_sphere(&s).unwrap();
        assert!(s.iter().all(|x| contains(&c, x)));
        assert!(c.center[1].abs() < 1e-12 && c.center[2].abs() < 1e-12 && c.center[0].abs() <= 1.0);
        assert!(c.radius <= 1.5 * 2.0);
        assert!(matches!(compute_coarse_sphere(&[]), Err(Error::EmptyInput)));
    }

    #[test]
    fn random_sets_are_contained_and_tight() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let n = rng.gen_range(1..=50);
            let s: Vec<Sphere> = (0..n)
                .map(|_| Sphere {
                    center: std::array::from_fn(|_| rng.gen_range(-1.0..1.0)),
                    radius: rng.gen_range(0.01..0.3),
                })
                .collect();
            let c = compute_coarse_sphere(&s).unwrap();
            assert!(s.iter().all(|x| contains(&c, x)));
            // Lower bound on the minimal radius: every pair and every single
            // sphere must fit. Jung's theorem puts the true minimum at most
            // ~1.23x this bound, so 1.5x of the bound is a safe ceiling.
            let mut lower = s.iter().map(|x| x.radius).fold(0.0, f64::max);
            for a in &s {
                for b in &s {
                    lower = lower.max(0.5 * (dist(a.center, b.center) + a.radius + b.radius));
                }
            }
            assert!(c.radius <= 1.5 * lower, "{} vs {}", c.radius, lower);
        }
    }
}
