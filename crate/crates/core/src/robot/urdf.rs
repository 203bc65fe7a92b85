//! A URDF subset: `<link>` names and `<joint>` elements with `type`,
//! `<parent>`, `<child>`, `<origin xyz rpy>`, `<axis xyz>` and
//! `<limit lower upper>`. Visual, collision and inertial elements are ignored.

use std::collections::HashMap;
use std::f64::consts::PI;

use roxmltree::{Document, Node};

use super::{JointKind, JointSpec, KinematicTree, Origin, TreeJoint};
use crate::error::UrdfError;

pub fn parse_urdf(text: &str) -> Result<KinematicTree, UrdfError> {
    let doc = Document::parse(text).map_err(|e| UrdfError::Xml(e.to_string()))?;
    let robot = doc.root_element();
    if robot.tag_name().name() != "robot" {
        return Err(UrdfError::NotARobot);
    }

    let mut doc_links: Vec<String> = Vec::new();
    let mut link_ids: HashMap<String, usize> = HashMap::new();
    for link in robot.children().filter(|n| n.has_tag_name("link")) {
        let name = attr(link, "name")?.to_string();
        if link_ids.insert(name.clone(), doc_links.len()).is_some() {
            return Err(UrdfError::DuplicateLink(name));
        }
        doc_links.push(name);
    }
    if doc_links.is_empty() {
        return Err(UrdfError::NoLinks);
    }

    let mut specs = Vec::new();
    let mut joint_names = HashMap::new();
    for joint in robot.children().filter(|n| n.has_tag_name("joint")) {
        let spec = parse_joint(joint)?;
        if joint_names.insert(spec.name.clone(), ()).is_some() {
            return Err(UrdfError::DuplicateJoint(spec.name));
        }
        let lookup = |link: &str| {
            link_ids
                .get(link)
                .copied()
                .ok_or_else(|| UrdfError::UnknownLink {
                    joint: spec.name.clone(),
                    link: link.to_string(),
                })
        };
        let parent = lookup(child_attr(joint, "parent", "link")?)?;
        let child = lookup(child_attr(joint, "child", "link")?)?;
        specs.push((spec, parent, child));
    }

    // Each link may be the child of at most one joint.
    let mut parent_joint: Vec<Option<usize>> = vec![None; doc_links.len()];
    for (j, (_, _, child)) in specs.iter().enumerate() {
        if parent_joint[*child].replace(j).is_some() {
            return Err(UrdfError::KinematicLoop(doc_links[*child].clone()));
        }
    }
    let roots: Vec<usize> = (0..doc_links.len())
        .filter(|&l| parent_joint[l].is_none())
        .collect();
    match roots.len() {
        1 => {}
        // Every link has a parent, so following parents never terminates.
        0 => return Err(UrdfError::KinematicLoop(doc_links[0].clone())),
        n => return Err(UrdfError::RootCount(n)),
    }

    let mut children: Vec<Vec<usize>> = vec![Vec::new(); doc_links.len()];
    for (j, (_, parent, _)) in specs.iter().enumerate() {
        children[*parent].push(j);
    }

    // Depth-first preorder from the root, children in document order.
    let mut new_index = vec![usize::MAX; doc_links.len()];
    let mut links = Vec::with_capacity(doc_links.len());
    let mut joints = Vec::with_capacity(specs.len());
    let mut stack = vec![(roots[0], None::<usize>)];
    let mut dof = 0;
    while let Some((link, via)) = stack.pop() {
        new_index[link] = links.len();
        links.push(doc_links[link].clone());
        if let Some(j) = via {
            let (spec, parent, _) = &specs[j];
            let dof_index = (spec.kind != JointKind::Fixed).then(|| {
                dof += 1;
                dof - 1
            });
            joints.push(TreeJoint {
                spec: spec.clone(),
                parent: new_index[*parent],
                child: new_index[link],
                dof_index,
            });
        }
        for &j in children[link].iter().rev() {
            stack.push((specs[j].2, Some(j)));
        }
    }
    // Links not reached from the root sit on a cycle detached from it.
    if links.len() != doc_links.len() {
        let stray = (0..doc_links.len())
            .find(|&l| new_index[l] == usize::MAX)
            .unwrap();
        return Err(UrdfError::KinematicLoop(doc_links[stray].clone()));
    }

    Ok(KinematicTree::from_parts(links, joints, dof))
}

fn parse_joint(node: Node) -> Result<JointSpec, UrdfError> {
    let name = attr(node, "name")?.to_string();
    let kind = match attr(node, "type")? {
        "fixed" => JointKind::Fixed,
        "revolute" => JointKind::Revolute,
        "continuous" => JointKind::Continuous,
        "prismatic" => JointKind::Prismatic,
        other => {
            return Err(UrdfError::UnsupportedJoint {
                joint: name,
                kind: other.to_string(),
            })
        }
    };

    let origin = match node.children().find(|n| n.has_tag_name("origin")) {
        Some(o) => Origin {
            xyz: triple(o.attribute("xyz"), [0.0; 3], &name)?,
            rpy: triple(o.attribute("rpy"), [0.0; 3], &name)?,
        },
        None => Origin::default(),
    };

    let raw_axis = triple(
        node.children()
            .find(|n| n.has_tag_name("axis"))
            .and_then(|a| a.attribute("xyz")),
        [1.0, 0.0, 0.0],
        &name,
    )?;
    let norm = raw_axis.iter().map(|v| v * v).sum::<f64>().sqrt();
    if kind != JointKind::Fixed && norm < 1e-12 {
        return Err(UrdfError::ZeroAxis(name));
    }
    let axis = if norm < 1e-12 {
        [1.0, 0.0, 0.0]
    } else {
        raw_axis.map(|v| v / norm)
    };

    let limit = node.children().find(|n| n.has_tag_name("limit"));
    let limits = match kind {
        JointKind::Fixed => [0.0, 0.0],
        JointKind::Continuous => [-PI, PI],
        JointKind::Revolute | JointKind::Prismatic => {
            let limit = limit.ok_or_else(|| UrdfError::MissingLimits(name.clone()))?;
            let bound = |key| {
                limit
                    .attribute(key)
                    .ok_or_else(|| UrdfError::MissingLimits(name.clone()))
                    .and_then(|v| number(v, &name))
            };
            let (lower, upper) = (bound("lower")?, bound("upper")?);
            if lower > upper {
                return Err(UrdfError::InvertedLimits {
                    joint: name,
                    lower,
                    upper,
                });
            }
            [lower, upper]
        }
    };

    Ok(JointSpec {
        name,
        kind,
        axis,
        origin,
        limits,
    })
}

fn attr<'a>(node: Node<'a, '_>, key: &str) -> Result<&'a str, UrdfError> {
    node.attribute(key)
        .ok_or_else(|| UrdfError::MissingAttribute {
            element: node.tag_name().name().to_string(),
            attribute: key.to_string(),
        })
}

fn child_attr<'a>(node: Node<'a, '_>, tag: &str, key: &str) -> Result<&'a str, UrdfError> {
    let child = node
        .children()
        .find(|n| n.has_tag_name(tag))
        .ok_or_else(|| UrdfError::MissingAttribute {
            element: node.tag_name().name().to_string(),
            attribute: tag.to_string(),
        })?;
    attr(child, key)
}

fn number(text: &str, context: &str) -> Result<f64, UrdfError> {
    text.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| UrdfError::BadNumber {
            value: text.to_string(),
            context: context.to_string(),
        })
}

fn triple(text: Option<&str>, default: [f64; 3], context: &str) -> Result<[f64; 3], UrdfError> {
    let Some(text) = text else { return Ok(default) };
    let parts: Vec<&str> = text.split_whitespace().collect();
    if parts.len() != 3 {
        return Err(UrdfError::BadNumber {
            value: text.to_string(),
            context: context.to_string(),
        });
    }
    Ok([
        number(parts[0], context)?,
        number(parts[1], context)?,
        number(parts[2], context)?,
    ])
}
