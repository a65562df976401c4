//! Height-class slab packing for boxes and convex polyhedra.
//!
//! Items are bucketed by height with ratio `1 - eps`; each class is packed
//! as 2D footprints into a strip of width `w_max`, the strip is cut into
//! pieces of depth `(c - 1) * d_max`, every piece is widened to depth
//! `c * d_max` so that each item fits in the piece holding its front, and the
//! pieces are stacked. Rigid variants first turn every box so that
//! `h >= w >= d`; polyhedra are first replaced by enclosing boxes.

use std::collections::BTreeMap;

use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;

use crate::geom3::{canonicalize_box, convex_hull, lemma3_bounding_box, ConvexPolyhedron, Dims3, OrientedBox};
use crate::model::{BoxItem, Container, Instance, ItemId, Method, PackingResult, Placement, PolyItem, Variant};
use crate::strip2d::{pack_strip_2d, RectItem};
use crate::verify::{lower_bound, Certificate};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlabParams {
    /// Piece depth factor, `c > 1`.
    pub c: f64,
    /// Height-class ratio, `0 < eps < 1`.
    pub eps: f64,
}

impl SlabParams {
    pub fn new(c: f64, eps: f64) -> Result<Self> {
        let p = Self { c, eps };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 1.0 && self.c.is_finite()) {
            return Err(Error::InvalidParameter(format!("c must exceed 1, got {}", self.c)));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::InvalidParameter(format!("eps must lie in (0, 1), got {}", self.eps)));
        }
        Ok(())
    }

    /// Parameters minimizing the ratio bound of `variant`.
    pub fn tuned(variant: Variant) -> Self {
        let t = tune_params(RatioParamsSpec::for_variant(variant));
        Self { c: t.c, eps: t.eps }
    }
}

/// Coefficients of the bound `2Fc/((1-eps)(c-1)) + Gc/eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioParamsSpec {
    pub f: f64,
    pub g: f64,
}

impl RatioParamsSpec {
    pub fn for_variant(variant: Variant) -> Self {
        Self { f: variant.volume_factor(), g: variant.extent_divisor() }
    }

    pub fn ratio(&self, params: SlabParams) -> f64 {
        let SlabParams { c, eps } = params;
        2.0 * self.f * c / ((1.0 - eps) * (c - 1.0)) + self.g * c / eps
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TunedParams {
    pub c: f64,
    pub eps: f64,
    pub ratio: f64,
}

/// Stationary point of the ratio bound over `c > 1`, `0 < eps < 1`.
///
/// For fixed `c` the bound is `A/(1-eps) + B/eps` with `A = 2Fc/(c-1)` and
/// `B = Gc`, minimized at `eps = sqrt(B)/(sqrt(A)+sqrt(B))` with value
/// `(sqrt(A)+sqrt(B))^2`. The remaining derivative in `c` changes sign once
/// and is bisected to machine precision.
pub fn tune_params(spec: RatioParamsSpec) -> TunedParams {
    let RatioParamsSpec { f, g } = spec;
    let a = |c: f64| 2.0 * f * c / (c - 1.0);
    let b = |c: f64| g * c;
    // d/dc (sqrt(A) + sqrt(B)), up to the factor 1/2.
    let slope = |c: f64| -2.0 * f / ((c - 1.0).powi(2) * a(c).sqrt()) + g / b(c).sqrt();

    let mut lo = 1.0 + 1e-12;
    let mut hi = 2.0;
    while slope(hi) <= 0.0 {
        lo = hi;
        hi = 1.0 + 2.0 * (hi - 1.0);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if slope(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let c = 0.5 * (lo + hi);
    let (sa, sb) = (a(c).sqrt(), b(c).sqrt());
    let eps = sb / (sa + sb);
    TunedParams { c, eps, ratio: spec.ratio(SlabParams { c, eps }) }
}

/// Height class of `h`: `j >= 1` with
/// `h_max (1-eps)^j < h <= h_max (1-eps)^(j-1)`.
pub fn height_class(h: f64, h_max: f64, eps: f64) -> u32 {
    let nominal = |j: u32| class_height(h_max, eps, j);
    let guess = 1.0 + ((h / h_max).ln() / (1.0 - eps).ln()).floor();
    let mut j = if guess.is_finite() { guess.clamp(1.0, 1e9) as u32 } else { 1 };
    while j > 1 && h > nominal(j) {
        j -= 1;
    }
    while h <= nominal(j + 1) {
        j += 1;
    }
    j
}

/// Nominal height `h_max (1-eps)^(j-1)` of class `j`.
pub fn class_height(h_max: f64, eps: f64, class: u32) -> f64 {
    h_max * (1.0 - eps).powi(class as i32 - 1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassLayout {
    pub class: u32,
    pub nominal_height: f64,
    /// Depth of the 2D strip packing of the class footprints.
    pub strip_depth: f64,
    pub pieces: usize,
    pub items: Vec<usize>,
}

/// Geometry of a slab packing before it is turned into placements.
#[derive(Debug, Clone, PartialEq)]
pub struct SlabLayout {
    pub container: Container,
    /// Minimum corner `(x, y, z)` of each input box.
    pub corners: Vec<[f64; 3]>,
    pub classes: Vec<ClassLayout>,
}

/// Number of pieces a strip of depth `strip_depth` is cut into.
pub fn piece_count(strip_depth: f64, d_max: f64, raw_depth: f64) -> usize {
    let k = ((strip_depth - d_max) / raw_depth).ceil();
    if k.is_finite() && k > 1.0 {
        k as usize
    } else {
        1
    }
}

/// Packs boxes given in packing orientation (`h` along z, `w` along x, `d`
/// along y).
pub fn slab_layout(dims: &[Dims3], params: SlabParams) -> Result<SlabLayout> {
    params.validate()?;
    if dims.is_empty() {
        return Err(Error::EmptyInstance);
    }
    let h_max = dims.iter().map(|b| b.h).fold(0.0, f64::max);
    let w_max = dims.iter().map(|b| b.w).fold(0.0, f64::max);
    let d_max = dims.iter().map(|b| b.d).fold(0.0, f64::max);
    let raw_depth = (params.c - 1.0) * d_max;

    let mut by_class: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, b) in dims.iter().enumerate() {
        by_class.entry(height_class(b.h, h_max, params.eps)).or_default().push(i);
    }
    let classes: Vec<(u32, Vec<usize>)> = by_class.into_iter().collect();
    let strips = classes
        .par_iter()
        .map(|(_, members)| {
            let rects: Vec<RectItem> =
                members.iter().map(|&i| RectItem { id: ItemId(i as u64), w: dims[i].w, h: dims[i].d }).collect();
            pack_strip_2d(&rects, w_max)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut corners = vec![[0.0; 3]; dims.len()];
    let mut layouts = Vec::with_capacity(classes.len());
    let mut z = 0.0;
    for ((class, members), strip) in classes.into_iter().zip(strips) {
        let nominal_height = class_height(h_max, params.eps, class);
        let pieces = piece_count(strip.height, d_max, raw_depth);
        for rect in &strip.placements {
            // Fronts on a cut line stay in the earlier piece.
            let piece = ((rect.y / raw_depth).ceil() - 1.0).clamp(0.0, (pieces - 1) as f64) as usize;
            let i = rect.id.0 as usize;
            corners[i] = [rect.x, rect.y - piece as f64 * raw_depth, z + piece as f64 * nominal_height];
        }
        z += pieces as f64 * nominal_height;
        layouts.push(ClassLayout { class, nominal_height, strip_depth: strip.height, pieces, items: members });
    }
    Ok(SlabLayout {
        container: Container { height: z, width: w_max, depth: params.c * d_max },
        corners,
        classes: layouts,
    })
}

fn certify(
    variant: Variant,
    method: Method,
    container: Container,
    placements: Vec<Placement>,
    instance: &Instance,
    claimed_ratio: f64,
) -> Result<PackingResult> {
    let lb = lower_bound(instance, variant)?;
    let volume = container.volume();
    Ok(PackingResult {
        variant,
        method,
        container,
        placements,
        volume,
        lower_bound: lb,
        claimed_ratio,
        certificate: Certificate::new(volume, lb.lower_bound, claimed_ratio),
        audit: Vec::new(),
    })
}

pub fn pack_boxes_translation(boxes: &[BoxItem], params: SlabParams) -> Result<PackingResult> {
    for b in boxes {
        b.check_positive()?;
    }
    let dims: Vec<Dims3> = boxes.iter().map(|b| Dims3 { h: b.h, w: b.w, d: b.d }).collect();
    let layout = slab_layout(&dims, params)?;
    let placements = boxes
        .iter()
        .zip(&layout.corners)
        .map(|(b, c)| Placement::translation_only(b.id, Vector3::from(*c)))
        .collect();
    let variant = Variant::Translation;
    let ratio = RatioParamsSpec::for_variant(variant).ratio(params);
    certify(variant, Method::Slab(params), layout.container, placements, &Instance::Boxes(boxes.to_vec()), ratio)
}

pub fn pack_boxes_rigid(boxes: &[BoxItem], params: SlabParams) -> Result<PackingResult> {
    pack_boxes_rigid_as(boxes, params, Variant::RigidBoxes)
}

fn pack_boxes_rigid_as(boxes: &[BoxItem], params: SlabParams, variant: Variant) -> Result<PackingResult> {
    let canon = boxes.iter().map(|b| canonicalize_box(b.id, [b.h, b.w, b.d])).collect::<Result<Vec<_>>>()?;
    let dims: Vec<Dims3> = canon.iter().map(|c| c.dims).collect();
    let layout = slab_layout(&dims, params)?;
    let placements = boxes
        .iter()
        .zip(&canon)
        .zip(&layout.corners)
        .map(|((b, cb), corner)| {
            let rotated_min = b.local_corners().iter().map(|p| cb.rotation * p.coords).fold(
                Vector3::repeat(f64::INFINITY),
                |m, q| m.inf(&q),
            );
            Placement { id: b.id, rotation: cb.rotation, translation: Vector3::from(*corner) - rotated_min }
        })
        .collect();
    let ratio = RatioParamsSpec::for_variant(variant).ratio(params);
    certify(variant, Method::Slab(params), layout.container, placements, &Instance::Boxes(boxes.to_vec()), ratio)
}

/// A polyhedron reduced to its canonical enclosing box.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedPolyhedron {
    pub hull: ConvexPolyhedron,
    pub obb: OrientedBox,
    pub dims: Dims3,
    /// Takes `p - obb.center` into the canonical box frame.
    pub rotation: Matrix3<f64>,
}

pub fn prepare_polyhedron(item: &PolyItem) -> Result<PreparedPolyhedron> {
    let hull = convex_hull(&item.vertices)?;
    let obb = lemma3_bounding_box(&hull)?;
    let (dims, rotation) = obb.canonical_frame();
    Ok(PreparedPolyhedron { hull, obb, dims, rotation })
}

pub fn pack_polyhedra_rigid(polys: &[PolyItem], params: SlabParams) -> Result<PackingResult> {
    pack_polyhedra_as(polys, params, Variant::RigidPolyhedra)
}

fn pack_polyhedra_as(polys: &[PolyItem], params: SlabParams, variant: Variant) -> Result<PackingResult> {
    let prepared = polys.par_iter().map(prepare_polyhedron).collect::<Result<Vec<_>>>()?;
    let dims: Vec<Dims3> = prepared.iter().map(|p| p.dims).collect();
    let layout = slab_layout(&dims, params)?;
    let placements = polys
        .iter()
        .zip(&prepared)
        .zip(&layout.corners)
        .map(|((item, prep), corner)| {
            let target = Vector3::new(
                corner[0] + prep.dims.w / 2.0,
                corner[1] + prep.dims.d / 2.0,
                corner[2] + prep.dims.h / 2.0,
            );
            Placement {
                id: item.id,
                rotation: prep.rotation,
                translation: target - prep.rotation * prep.obb.center.coords,
            }
        })
        .collect();
    let ratio = RatioParamsSpec::for_variant(variant).ratio(params);
    certify(variant, Method::Slab(params), layout.container, placements, &Instance::Polyhedra(polys.to_vec()), ratio)
}

/// Re-certifies a rigid-motion result against the convex-container lower
/// bound, claiming the published convex-container constant.
pub fn convex_container_certificate(result: &PackingResult, instance: &Instance) -> Result<PackingResult> {
    let variant = result.variant.convex_counterpart().ok_or_else(|| {
        Error::VariantMismatch(format!("no convex-container analysis for {} results", result.variant))
    })?;
    if !matches!(result.method, Method::Slab(_)) {
        return Err(Error::VariantMismatch("convex certificates apply to slab results".into()));
    }
    certify(
        variant,
        result.method,
        result.container,
        result.placements.clone(),
        instance,
        variant.published_ratio(),
    )
}

/// Packs `instance` with the slab algorithm for `variant`; `params` default
/// to the tuned values for that variant.
pub fn pack(instance: &Instance, variant: Variant, params: Option<SlabParams>) -> Result<PackingResult> {
    let params = params.unwrap_or_else(|| SlabParams::tuned(variant));
    match (instance, variant) {
        (Instance::Boxes(b), Variant::Translation) => pack_boxes_translation(b, params),
        (Instance::Boxes(b), Variant::RigidBoxes | Variant::ConvexBoxes) => pack_boxes_rigid_as(b, params, variant),
        (Instance::Polyhedra(p), Variant::RigidPolyhedra | Variant::ConvexPolyhedra) => {
            pack_polyhedra_as(p, params, variant)
        }
        (inst, v) => Err(Error::VariantMismatch(format!(
            "{} instance cannot be packed as {v}",
            if matches!(inst, Instance::Boxes(_)) { "box" } else { "polyhedra" }
        ))),
    }
}
