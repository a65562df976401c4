//! Ground truth for packings: validity checks, lower bounds on the optimal
//! container volume, ratio certificates, and small exact oracles.

use std::collections::HashMap;

use nalgebra::Matrix3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geom3::{ConvexPolyhedron, Point3, Vector3, ORTHO_TOL, REL_TOL};
use crate::model::{BoxItem, Instance, ItemId, PackingResult, Variant};
use crate::slab::prepare_polyhedron;
use crate::{Error, Result};

/// `LB = max(sum_volume, extent_product / divisor)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBoundReport {
    pub sum_volume: f64,
    pub extent_product: f64,
    pub divisor: f64,
    pub lower_bound: f64,
}

/// The inequality `achieved <= ratio * lower_bound`, with relative slack.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    pub achieved: f64,
    pub lower_bound: f64,
    pub ratio: f64,
    pub pass: bool,
}

impl Certificate {
    pub fn new(achieved: f64, lower_bound: f64, ratio: f64) -> Self {
        let pass = achieved <= ratio * lower_bound * (1.0 + REL_TOL);
        Self { achieved, lower_bound, ratio, pass }
    }

    pub fn empirical_ratio(&self) -> f64 {
        self.achieved / self.lower_bound
    }
}

/// Lower bound on the volume of an optimal container for `variant`.
///
/// Extents are the per-axis maxima of the boxes as packed: raw `(h, w, d)`
/// under translation, canonical `h >= w >= d` for rigid variants, and the
/// canonical enclosing boxes for polyhedra. The volume term always uses the
/// items themselves.
pub fn lower_bound(instance: &Instance, variant: Variant) -> Result<LowerBoundReport> {
    if instance.is_empty() {
        return Err(Error::EmptyInstance);
    }
    let (sum_volume, maxima) = match instance {
        Instance::Boxes(boxes) => {
            if variant.is_polyhedra() {
                return Err(Error::VariantMismatch(format!("box instance with variant {variant}")));
            }
            let mut maxima = [0.0f64; 3];
            let mut sum = 0.0;
            for b in boxes {
                b.check_positive()?;
                let mut dims = [b.h, b.w, b.d];
                if variant.is_rigid() {
                    dims.sort_by(|a, b| b.total_cmp(a));
                }
                for k in 0..3 {
                    maxima[k] = maxima[k].max(dims[k]);
                }
                sum += b.volume();
            }
            (sum, maxima)
        }
        Instance::Polyhedra(polys) => {
            if !variant.is_polyhedra() {
                return Err(Error::VariantMismatch(format!("polyhedra instance with variant {variant}")));
            }
            let mut maxima = [0.0f64; 3];
            let mut sum = 0.0;
            for p in polys {
                let prep = prepare_polyhedron(p)?;
                let dims = [prep.dims.h, prep.dims.w, prep.dims.d];
                for k in 0..3 {
                    maxima[k] = maxima[k].max(dims[k]);
                }
                sum += prep.hull.volume();
            }
            (sum, maxima)
        }
    };
    let extent_product = maxima.iter().product::<f64>();
    let divisor = variant.extent_divisor();
    Ok(LowerBoundReport { sum_volume, extent_product, divisor, lower_bound: sum_volume.max(extent_product / divisor) })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Overlap { a: ItemId, b: ItemId, overlap: [f64; 3] },
    OutsideContainer { id: ItemId, axis: usize, excess: f64 },
    BadRotation { id: ItemId, error: f64 },
    Missing(ItemId),
    Duplicate(ItemId),
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        const AXES: [&str; 3] = ["x", "y", "z"];
        match self {
            Violation::Overlap { a, b, overlap } => {
                write!(f, "items {a} and {b} overlap by {:e} x {:e} x {:e}", overlap[0], overlap[1], overlap[2])
            }
            Violation::OutsideContainer { id, axis, excess } => {
                write!(f, "item {id} leaves the container along {} by {excess:e}", AXES[*axis])
            }
            Violation::BadRotation { id, error } => write!(f, "item {id} has a non-rigid rotation (error {error:e})"),
            Violation::Missing(id) => write!(f, "item {id} is not placed"),
            Violation::Duplicate(id) => write!(f, "item {id} is placed twice"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub first_violation: Option<Violation>,
    pub items: usize,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.first_violation.is_none()
    }
}

/// Axis-parallel bounds of a placed item, `[min, max]` per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl Aabb {
    pub fn of_points<'a>(points: impl IntoIterator<Item = &'a Point3>) -> Aabb {
        let mut b = Aabb { min: [f64::INFINITY; 3], max: [f64::NEG_INFINITY; 3] };
        for p in points {
            for k in 0..3 {
                b.min[k] = b.min[k].min(p[k]);
                b.max[k] = b.max[k].max(p[k]);
            }
        }
        b
    }

    /// Overlap length per axis (negative when separated).
    pub fn overlap(&self, other: &Aabb) -> [f64; 3] {
        std::array::from_fn(|k| self.max[k].min(other.max[k]) - self.min[k].max(other.min[k]))
    }
}

/// Finds the first pair of boxes whose interiors intersect by more than `tol`
/// on every axis. Sweep along `x`.
pub fn first_overlap(boxes: &[(ItemId, Aabb)], tol: f64) -> Option<Violation> {
    let mut order: Vec<usize> = (0..boxes.len()).collect();
    order.sort_by(|&a, &b| boxes[a].1.min[0].total_cmp(&boxes[b].1.min[0]).then(boxes[a].0.cmp(&boxes[b].0)));
    for (pos, &i) in order.iter().enumerate() {
        let (id_a, a) = &boxes[i];
        for &j in &order[pos + 1..] {
            let (id_b, b) = &boxes[j];
            if b.min[0] >= a.max[0] - tol {
                break;
            }
            let overlap = a.overlap(b);
            if overlap.iter().all(|&o| o > tol) {
                let (a, b) = if id_a <= id_b { (*id_a, *id_b) } else { (*id_b, *id_a) };
                return Some(Violation::Overlap { a, b, overlap });
            }
        }
    }
    None
}

fn rotation_error(r: &Matrix3<f64>) -> f64 {
    let ortho = (r * r.transpose() - Matrix3::identity()).amax();
    let det = (r.determinant() - 1.0).abs();
    ortho.max(det)
}

/// Checks non-overlap, containment and rigidity of a packing against the
/// items it claims to place. Polyhedra are compared through their placed
/// enclosing boxes.
pub fn validate_packing(result: &PackingResult, instance: &Instance) -> Result<ValidationReport> {
    let ext = result.container.extents();
    let tol = REL_TOL * ext.iter().copied().fold(1.0, f64::max);
    let report = |v: Option<Violation>| Ok(ValidationReport { first_violation: v, items: instance.len() });

    let index: HashMap<ItemId, usize> = instance.ids().into_iter().enumerate().map(|(i, id)| (id, i)).collect();
    let mut seen = vec![false; instance.len()];
    for p in &result.placements {
        let &i = index.get(&p.id).ok_or(Error::UnknownItem(p.id))?;
        if std::mem::replace(&mut seen[i], true) {
            return report(Some(Violation::Duplicate(p.id)));
        }
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return report(Some(Violation::Missing(instance.ids()[i])));
    }

    let mut placed = Vec::with_capacity(result.placements.len());
    for p in &result.placements {
        let error = if result.variant.is_rigid() {
            rotation_error(&p.rotation)
        } else {
            (p.rotation - Matrix3::identity()).amax()
        };
        if !(error <= ORTHO_TOL) {
            return report(Some(Violation::BadRotation { id: p.id, error }));
        }
        let i = index[&p.id];
        let (aabb, extra): (Aabb, Vec<Point3>) = match instance {
            Instance::Boxes(boxes) => {
                let corners = boxes[i].local_corners().map(|c| p.apply(&c));
                (Aabb::of_points(&corners), Vec::new())
            }
            Instance::Polyhedra(polys) => {
                let prep = prepare_polyhedron(&polys[i])?;
                let corners = prep.obb.corners().map(|c| p.apply(&c));
                let verts = prep.hull.vertices().iter().map(|v| p.apply(v)).collect();
                (Aabb::of_points(&corners), verts)
            }
        };
        let hull_box = Aabb::of_points(&extra);
        for k in 0..3 {
            let mut excess = (-aabb.min[k]).max(aabb.max[k] - ext[k]);
            if !extra.is_empty() {
                excess = excess.max((-hull_box.min[k]).max(hull_box.max[k] - ext[k]));
            }
            if excess > tol {
                return report(Some(Violation::OutsideContainer { id: p.id, axis: k, excess }));
            }
        }
        placed.push((p.id, aabb));
    }
    report(first_overlap(&placed, tol))
}

/// Exact minimal container volume for at most three boxes under
/// translation.
///
/// Any packing can be pushed towards the origin axis by axis until every
/// coordinate is either 0 or the far side of another box, so each coordinate
/// of a box is a sum of extents of a subset of the other boxes. All such
/// configurations are enumerated.
pub fn brute_force_optimal_translation(boxes: &[BoxItem]) -> Result<f64> {
    if boxes.len() > 3 {
        return Err(Error::TooManyItems(boxes.len()));
    }
    if boxes.is_empty() {
        return Err(Error::EmptyInstance);
    }
    for b in boxes {
        b.check_positive()?;
    }
    let n = boxes.len();
    let extent = |b: &BoxItem, axis: usize| [b.w, b.d, b.h][axis];
    // candidate[axis][i]: possible coordinates of box i along axis.
    let candidates: Vec<Vec<Vec<f64>>> = (0..3)
        .map(|axis| {
            (0..n)
                .map(|i| {
                    let others: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| extent(&boxes[j], axis)).collect();
                    let mut sums: Vec<f64> = (0..1usize << others.len())
                        .map(|mask| (0..others.len()).filter(|k| mask >> k & 1 == 1).map(|k| others[k]).sum())
                        .collect();
                    sums.sort_by(f64::total_cmp);
                    sums.dedup();
                    sums
                })
                .collect()
        })
        .collect();

    let scale: f64 = boxes.iter().map(|b| b.h + b.w + b.d).sum();
    let tol = 1e-12 * scale;
    let combos = |axis: usize| -> Vec<Vec<f64>> {
        let mut out = vec![Vec::new()];
        for i in 0..n {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    candidates[axis][i].iter().map(move |&c| {
                        let mut v = prefix.clone();
                        v.push(c);
                        v
                    })
                })
                .collect();
        }
        out
    };
    let (cx, cy, cz) = (combos(0), combos(1), combos(2));
    let separated = |pos: &[&Vec<f64>; 3], i: usize, j: usize| {
        (0..3).any(|axis| {
            let (a0, b0) = (pos[axis][i], pos[axis][j]);
            a0 + extent(&boxes[i], axis) <= b0 + tol || b0 + extent(&boxes[j], axis) <= a0 + tol
        })
    };
    let mut best = f64::INFINITY;
    for x in &cx {
        for y in &cy {
            for z in &cz {
                let pos = [x, y, z];
                let ok = (0..n).all(|i| (i + 1..n).all(|j| separated(&pos, i, j)));
                if !ok {
                    continue;
                }
                let vol: f64 = (0..3)
                    .map(|axis| (0..n).map(|i| pos[axis][i] + extent(&boxes[i], axis)).fold(0.0, f64::max))
                    .product();
                best = best.min(vol);
            }
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentBoundReport {
    pub h: f64,
    pub w: f64,
    pub d: f64,
    /// Shortest of the longest plane-parallel chords found, over `w / sqrt(5)`.
    pub min_segment_ratio: f64,
    /// Smallest support width found, over `d / (8 sqrt(3))`.
    pub min_width_ratio: f64,
    pub segment_violations: usize,
    pub width_violations: usize,
    pub samples: usize,
}

impl SegmentBoundReport {
    pub fn passed(&self) -> bool {
        self.segment_violations == 0 && self.width_violations == 0
    }
}

fn random_unit(rng: &mut ChaCha8Rng) -> Vector3 {
    loop {
        let v = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Longest segment inside triangle `tri` parallel to the plane with the
/// given normal, among chords through a vertex.
fn longest_parallel_chord(tri: [Point3; 3], normal: &Vector3) -> f64 {
    let mut best = 0.0f64;
    let mut all_flat = true;
    for k in 0..3 {
        let v = tri[k];
        let (p, q) = (tri[(k + 1) % 3], tri[(k + 2) % 3]);
        let (sp, sq) = (normal.dot(&(p - v)), normal.dot(&(q - v)));
        if sp != 0.0 || sq != 0.0 {
            all_flat = false;
        }
        if sp * sq <= 0.0 && sp != sq {
            let t = sp / (sp - sq);
            best = best.max((p + (q - p) * t - v).norm());
        }
    }
    if all_flat {
        return (0..3).map(|k| (tri[k] - tri[(k + 1) % 3]).norm()).fold(0.0, f64::max);
    }
    best
}

/// Samples the two chord/width bounds that hold for every polyhedron relative
/// to its canonical enclosing box `(h, w, d)`:
/// a chord of length `>= w / sqrt(5)` parallel to any plane, found in the
/// triangle spanned by the diameter and the farther of the two points
/// touching the `w` sides; and support width `>= d / (8 sqrt(3))` along any
/// direction.
pub fn segment_bound_checks(p: &ConvexPolyhedron, samples: usize, seed: u64) -> Result<SegmentBoundReport> {
    let obb = crate::geom3::lemma3_bounding_box(p)?;
    let (dims, _) = obb.canonical_frame();
    let (top, bottom) = p.diameter_pair();
    let w_axis = if obb.half_extents[1] >= obb.half_extents[2] { obb.axes[1] } else { obb.axes[2] };
    let along = |v: &Point3| w_axis.dot(&v.coords);
    let verts = p.vertices();
    let left = verts.iter().min_by(|a, b| along(a).total_cmp(&along(b))).unwrap();
    let right = verts.iter().max_by(|a, b| along(a).total_cmp(&along(b))).unwrap();
    let tb = (bottom - top).normalize();
    let dist_to_tb = |v: &Point3| {
        let r = v - top;
        (r - tb * tb.dot(&r)).norm()
    };
    let apex = if dist_to_tb(left) >= dist_to_tb(right) { *left } else { *right };
    let tri = [top, bottom, apex];

    let tol = REL_TOL * p.scale();
    let seg_bound = dims.w / 5f64.sqrt();
    let width_bound = dims.d / (8.0 * 3f64.sqrt());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SegmentBoundReport {
        h: dims.h,
        w: dims.w,
        d: dims.d,
        min_segment_ratio: f64::INFINITY,
        min_width_ratio: f64::INFINITY,
        segment_violations: 0,
        width_violations: 0,
        samples,
    };
    for _ in 0..samples {
        let normal = random_unit(&mut rng);
        let chord = longest_parallel_chord(tri, &normal);
        report.min_segment_ratio = report.min_segment_ratio.min(chord / seg_bound);
        if chord < seg_bound - tol {
            report.segment_violations += 1;
        }
        let dir = random_unit(&mut rng);
        let width = p.support_width(&dir);
        report.min_width_ratio = report.min_width_ratio.min(width / width_bound);
        if width < width_bound - tol {
            report.width_violations += 1;
        }
    }
    Ok(report)
}
