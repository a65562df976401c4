//! Wavefront OBJ export of a packed result, and the reader used to check
//! exported files.

use std::fmt::Write as _;

use anyhow::{anyhow, bail, ensure, Context, Result};
use boxpress::geom3::{convex_hull, Point3};
use boxpress::slab::prepare_polyhedron;
use boxpress::verify::{first_overlap, Aabb, Violation};
use boxpress::{Container, Instance, ItemId, PackingResult};

use crate::format::real;

/// Placed geometry of one item.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Point3>,
    pub faces: Vec<[usize; 3]>,
}

/// Box corners in `local_corners` order, triangulated with outward faces.
const BOX_FACES: [[usize; 3]; 12] = [
    [0, 2, 1],
    [1, 2, 3],
    [4, 5, 6],
    [5, 7, 6],
    [0, 1, 4],
    [1, 5, 4],
    [2, 6, 3],
    [3, 6, 7],
    [0, 4, 2],
    [2, 4, 6],
    [1, 3, 5],
    [3, 7, 5],
];

const BOX_EDGES: [[usize; 2]; 12] =
    [[0, 1], [2, 3], [4, 5], [6, 7], [0, 2], [1, 3], [4, 6], [5, 7], [0, 4], [1, 5], [2, 6], [3, 7]];

/// Item meshes moved to their placed positions, in placement order.
pub fn placed_meshes(result: &PackingResult, instance: &Instance) -> Result<Vec<(ItemId, Mesh)>> {
    result
        .placements
        .iter()
        .map(|p| {
            let mesh = match instance {
                Instance::Boxes(boxes) => {
                    let b = boxes.iter().find(|b| b.id == p.id).ok_or_else(|| anyhow!("unknown item {}", p.id))?;
                    Mesh { vertices: b.local_corners().iter().map(|c| p.apply(c)).collect(), faces: BOX_FACES.to_vec() }
                }
                Instance::Polyhedra(polys) => {
                    let item = polys.iter().find(|q| q.id == p.id).ok_or_else(|| anyhow!("unknown item {}", p.id))?;
                    let hull = convex_hull(&item.vertices)?;
                    Mesh { vertices: hull.vertices().iter().map(|v| p.apply(v)).collect(), faces: hull.faces().to_vec() }
                }
            };
            Ok((p.id, mesh))
        })
        .collect()
}

pub fn write_obj(result: &PackingResult, instance: &Instance) -> Result<String> {
    let mut out = String::new();
    let c = result.container;
    writeln!(out, "# boxpress {} container {} {} {}", result.variant.tag(), real(c.height), real(c.width), real(c.depth))?;
    let mut base = 1;
    writeln!(out, "o container")?;
    for v in c.corners() {
        writeln!(out, "v {} {} {}", real(v.x), real(v.y), real(v.z))?;
    }
    for [a, b] in BOX_EDGES {
        writeln!(out, "l {} {}", base + a, base + b)?;
    }
    base += 8;
    for (id, mesh) in placed_meshes(result, instance)? {
        writeln!(out, "o item-{}", id.0)?;
        for v in &mesh.vertices {
            writeln!(out, "v {} {} {}", real(v.x), real(v.y), real(v.z))?;
        }
        for [a, b, c] in &mesh.faces {
            writeln!(out, "f {} {} {}", base + a, base + b, base + c)?;
        }
        base += mesh.vertices.len();
    }
    Ok(out)
}

/// Contents of an exported file: the container corners and the item meshes
/// with faces indexed locally.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjScene {
    pub container: Vec<Point3>,
    pub items: Vec<(ItemId, Mesh)>,
}

pub fn read_obj(text: &str) -> Result<ObjScene> {
    let mut vertices: Vec<Point3> = Vec::new();
    // (name, first vertex, faces with global 1-based indices)
    let mut objects: Vec<(String, usize, Vec<[usize; 3]>)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let f: Vec<&str> = line.split_whitespace().collect();
        let at = || format!("line {}", i + 1);
        match f.first().copied() {
            Some("o") => {
                ensure!(f.len() == 2, "{}: object needs a name", at());
                objects.push((f[1].to_string(), vertices.len(), Vec::new()));
            }
            Some("v") => {
                ensure!(f.len() == 4, "{}: vertex needs 3 coordinates", at());
                let c: Vec<f64> =
                    f[1..].iter().map(|s| s.parse::<f64>()).collect::<Result<_, _>>().with_context(at)?;
                vertices.push(Point3::new(c[0], c[1], c[2]));
            }
            Some("f") => {
                ensure!(f.len() == 4, "{}: only triangles are supported", at());
                let idx: Vec<usize> =
                    f[1..].iter().map(|s| s.parse::<usize>()).collect::<Result<_, _>>().with_context(at)?;
                let obj = objects.last_mut().ok_or_else(|| anyhow!("{}: face outside an object", at()))?;
                obj.2.push([idx[0], idx[1], idx[2]]);
            }
            _ => {}
        }
    }
    let mut container = None;
    let mut items = Vec::new();
    for (k, (name, start, faces)) in objects.iter().enumerate() {
        let end = objects.get(k + 1).map_or(vertices.len(), |o| o.1);
        let verts = vertices[*start..end].to_vec();
        if name == "container" {
            container = Some(verts);
            continue;
        }
        let id: u64 = name
            .strip_prefix("item-")
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| anyhow!("unexpected object `{name}`"))?;
        let faces = faces
            .iter()
            .map(|t| {
                let local = t.map(|g| g.wrapping_sub(1 + start));
                ensure!(local.iter().all(|&l| l < verts.len()), "face of item-{id} uses another object's vertices");
                Ok(local)
            })
            .collect::<Result<Vec<_>>>()?;
        items.push((ItemId(id), Mesh { vertices: verts, faces }));
    }
    let container = container.ok_or_else(|| anyhow!("no container object"))?;
    ensure!(container.len() == 8, "container must have 8 corners");
    Ok(ObjScene { container, items })
}

/// Checks exported meshes directly: every item inside the container and no
/// two item bounding boxes overlapping. Items are placed with their boxes
/// axis-parallel, so this matches the validator's box-level check.
pub fn validate_scene(scene: &ObjScene, instance: &Instance) -> Result<Option<Violation>> {
    let bounds = Aabb::of_points(&scene.container);
    ensure!(bounds.min.iter().all(|&m| m == 0.0), "container is not anchored at the origin");
    let container = Container { width: bounds.max[0], depth: bounds.max[1], height: bounds.max[2] };
    let ext = container.extents();
    let tol = boxpress::geom3::REL_TOL * ext.iter().copied().fold(1.0, f64::max);

    let ids = instance.ids();
    ensure!(scene.items.len() == ids.len(), "scene has {} items, instance {}", scene.items.len(), ids.len());
    let mut placed = Vec::with_capacity(scene.items.len());
    for (id, mesh) in &scene.items {
        ensure!(ids.contains(id), "scene item {id} is not in the instance");
        let aabb = match instance {
            Instance::Boxes(_) => Aabb::of_points(&mesh.vertices),
            // The validator works with the enclosing boxes of polyhedra, which
            // fit exactly into their axis-parallel slots; the hull bounds lie
            // inside those.
            Instance::Polyhedra(polys) => {
                let item = polys.iter().find(|p| p.id == *id).expect("id checked above");
                let prep = prepare_polyhedron(item)?;
                let expected = prep.hull.volume();
                let got = convex_hull(&mesh.vertices)?.volume();
                if (got - expected).abs() > 1e-9 * expected.max(1.0) {
                    bail!("mesh of item {id} has volume {got}, expected {expected}");
                }
                Aabb::of_points(&mesh.vertices)
            }
        };
        for k in 0..3 {
            let excess = (-aabb.min[k]).max(aabb.max[k] - ext[k]);
            if excess > tol {
                return Ok(Some(Violation::OutsideContainer { id: *id, axis: k, excess }));
            }
        }
        placed.push((*id, aabb));
    }
    Ok(first_overlap(&placed, tol))
}
