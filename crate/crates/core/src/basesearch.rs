//! Container search over a logarithmic grid of base areas.
//!
//! Widths `W_sum (1-eps')^i` above `w_max`, plus `w_max` itself, are crossed
//! with the analogous depths; a 3D strip packer is run on every base and the
//! smallest resulting container wins.

use rayon::prelude::*;

use crate::geom3::Dims3;
use crate::model::{BoxItem, Container, Instance, ItemId, Method, PackingResult, Placement, Variant};
use crate::slab::{class_height, height_class, piece_count, tune_params, RatioParamsSpec};
use crate::strip2d::{pack_strip_2d, PlacedRect, RectItem};
use crate::verify::{lower_bound, Certificate};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub eps: f64,
    /// Approximation ratio assumed for the strip packer.
    pub alpha: f64,
}

impl GridSpec {
    pub fn new(eps: f64, alpha: f64) -> Result<Self> {
        let s = Self { eps, alpha };
        s.validate()?;
        Ok(s)
    }

    /// Grid for the default packer: `alpha` is that packer's analytic ratio.
    pub fn with_default_alpha(eps: f64) -> Result<Self> {
        Self::new(eps, default_alpha())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::InvalidParameter(format!("grid eps must be positive, got {}", self.eps)));
        }
        if !(self.alpha >= 1.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("alpha must be at least 1, got {}", self.alpha)));
        }
        Ok(())
    }

    /// Grid ratio `eps' = eps / (2 (eps + alpha))`.
    pub fn eps_prime(&self) -> f64 {
        self.eps / (2.0 * (self.eps + self.alpha))
    }

    /// Ratio guaranteed when the strip packer is an `alpha`-approximation.
    pub fn claimed_ratio(&self) -> f64 {
        self.alpha + self.eps
    }
}

/// Analytic ratio of [`DefaultStripPacker::default`].
pub fn default_alpha() -> f64 {
    tune_params(RatioParamsSpec::for_variant(Variant::Translation)).ratio
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateBase {
    pub width: f64,
    pub depth: f64,
}

/// `start (1-eps')^i` for every `i` keeping the value above `floor`, then
/// `floor` itself.
fn geometric_levels(start: f64, floor: f64, eps_prime: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut v = start;
    while v > floor {
        out.push(v);
        v *= 1.0 - eps_prime;
    }
    out.push(floor);
    out
}

pub fn candidate_set(boxes: &[BoxItem], spec: &GridSpec) -> Result<Vec<CandidateBase>> {
    spec.validate()?;
    if boxes.is_empty() {
        return Err(Error::EmptyInstance);
    }
    let ep = spec.eps_prime();
    let w_sum: f64 = boxes.iter().map(|b| b.w).sum();
    let d_sum: f64 = boxes.iter().map(|b| b.d).sum();
    let w_max = boxes.iter().map(|b| b.w).fold(0.0, f64::max);
    let d_max = boxes.iter().map(|b| b.d).fold(0.0, f64::max);
    let widths = geometric_levels(w_sum, w_max, ep);
    let depths = geometric_levels(d_sum, d_max, ep);
    Ok(widths
        .iter()
        .flat_map(|&width| depths.iter().map(move |&depth| CandidateBase { width, depth }))
        .collect())
}

/// Output of a 3D strip packer: minimum corners in input order and the used
/// height.
#[derive(Debug, Clone, PartialEq)]
pub struct StripPacking3D {
    pub corners: Vec<[f64; 3]>,
    pub height: f64,
}

/// Packs boxes under translation into a strip with a fixed `width x depth`
/// base, minimizing height.
pub trait StripPacker3D: Sync {
    fn pack(&self, boxes: &[BoxItem], width: f64, depth: f64) -> Result<StripPacking3D>;
}

/// Height-class slab construction on a fixed base: each class is packed as
/// footprints into a strip of the base width, cut into raw pieces of depth
/// `D - d_max`, each widened back to `D`, and the pieces are stacked.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DefaultStripPacker {
    pub eps: f64,
}

impl Default for DefaultStripPacker {
    fn default() -> Self {
        Self { eps: tune_params(RatioParamsSpec::for_variant(Variant::Translation)).eps }
    }
}

impl StripPacker3D for DefaultStripPacker {
    fn pack(&self, boxes: &[BoxItem], width: f64, depth: f64) -> Result<StripPacking3D> {
        default_strip_packer(boxes, width, depth, self.eps)
    }
}

pub fn default_strip_packer(boxes: &[BoxItem], width: f64, depth: f64, eps: f64) -> Result<StripPacking3D> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0, 1), got {eps}")));
    }
    for b in boxes {
        b.check_positive()?;
        if b.w > width || b.d > depth {
            return Err(Error::BoxExceedsBase { id: b.id, width, depth });
        }
    }
    if boxes.is_empty() {
        return Ok(StripPacking3D { corners: Vec::new(), height: 0.0 });
    }
    let dims: Vec<Dims3> = boxes.iter().map(|b| Dims3 { h: b.h, w: b.w, d: b.d }).collect();
    let h_max = dims.iter().map(|b| b.h).fold(0.0, f64::max);
    let d_max = dims.iter().map(|b| b.d).fold(0.0, f64::max);
    let raw_depth = depth - d_max;
    let tight = raw_depth <= 1e-12 * depth;

    let mut classes: std::collections::BTreeMap<u32, Vec<usize>> = Default::default();
    for (i, b) in dims.iter().enumerate() {
        classes.entry(height_class(b.h, h_max, eps)).or_default().push(i);
    }
    let mut corners = vec![[0.0; 3]; boxes.len()];
    let mut z = 0.0;
    for (class, members) in classes {
        let nominal = class_height(h_max, eps, class);
        let rects: Vec<RectItem> =
            members.iter().map(|&i| RectItem { id: ItemId(i as u64), w: dims[i].w, h: dims[i].d }).collect();
        let strip = pack_strip_2d(&rects, width)?;
        let (pieces, cuts) = if tight {
            window_pieces(&strip.placements, depth)
        } else {
            let pieces = piece_count(strip.height, d_max, raw_depth);
            let cuts = strip
                .placements
                .iter()
                .map(|r| {
                    let piece = ((r.y / raw_depth).ceil() - 1.0).clamp(0.0, (pieces - 1) as f64) as usize;
                    (piece, piece as f64 * raw_depth)
                })
                .collect();
            (pieces, cuts)
        };
        for (r, &(piece, start)) in strip.placements.iter().zip(&cuts) {
            corners[r.id.0 as usize] = [r.x, r.y - start, z + piece as f64 * nominal];
        }
        z += pieces as f64 * nominal;
    }
    Ok(StripPacking3D { corners, height: z })
}

/// Greedy cut for a base with no slack: a new piece starts at the front of
/// the first footprint that would stick out of the current one. Returns the
/// piece count and `(piece, piece start)` per rectangle.
fn window_pieces(rects: &[PlacedRect], depth: f64) -> (usize, Vec<(usize, f64)>) {
    let mut order: Vec<usize> = (0..rects.len()).collect();
    order.sort_by(|&a, &b| rects[a].y.total_cmp(&rects[b].y).then(rects[a].id.cmp(&rects[b].id)));
    let mut cuts = vec![(0, 0.0); rects.len()];
    let mut piece = 0usize;
    let mut start = order.first().map_or(0.0, |&i| rects[i].y);
    for i in order {
        let r = &rects[i];
        if r.y + r.h > start + depth * (1.0 + 1e-12) {
            piece += 1;
            start = r.y;
        }
        cuts[i] = (piece, start);
    }
    (piece + 1, cuts)
}

#[derive(Debug, Clone, PartialEq)]
pub enum CandidateOutcome {
    Packed { height: f64, volume: f64 },
    Failed(String),
}

/// One row of the base-search audit log.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateAudit {
    pub base: CandidateBase,
    pub outcome: CandidateOutcome,
}

impl CandidateAudit {
    pub fn volume(&self) -> Option<f64> {
        match self.outcome {
            CandidateOutcome::Packed { volume, .. } => Some(volume),
            CandidateOutcome::Failed(_) => None,
        }
    }
}

/// Runs `packer` on every candidate base and keeps the smallest container;
/// ties go to the lexicographically smaller `(W, D)`.
pub fn omcop_translation(boxes: &[BoxItem], spec: &GridSpec, packer: &dyn StripPacker3D) -> Result<PackingResult> {
    for b in boxes {
        b.check_positive()?;
    }
    let candidates = candidate_set(boxes, spec)?;
    let runs: Vec<(CandidateAudit, Option<StripPacking3D>)> = candidates
        .par_iter()
        .map(|&base| match packer.pack(boxes, base.width, base.depth) {
            Ok(p) => {
                let volume = p.height * base.width * base.depth;
                (CandidateAudit { base, outcome: CandidateOutcome::Packed { height: p.height, volume } }, Some(p))
            }
            Err(e) => (CandidateAudit { base, outcome: CandidateOutcome::Failed(e.to_string()) }, None),
        })
        .collect();

    let best = runs
        .iter()
        .enumerate()
        .filter_map(|(i, (audit, _))| audit.volume().map(|v| (i, v, audit.base)))
        .min_by(|a, b| {
            a.1.total_cmp(&b.1).then(a.2.width.total_cmp(&b.2.width)).then(a.2.depth.total_cmp(&b.2.depth))
        })
        .map(|(i, ..)| i)
        .ok_or(Error::NoFeasibleCandidate)?;

    let base = runs[best].0.base;
    let packing = runs[best].1.clone().expect("best candidate packed");
    let container = Container { height: packing.height, width: base.width, depth: base.depth };
    let placements = boxes
        .iter()
        .zip(&packing.corners)
        .map(|(b, c)| Placement::translation_only(b.id, nalgebra::Vector3::from(*c)))
        .collect();
    let lb = lower_bound(&Instance::Boxes(boxes.to_vec()), Variant::Translation)?;
    let volume = container.volume();
    let claimed_ratio = spec.claimed_ratio();
    Ok(PackingResult {
        variant: Variant::Translation,
        method: Method::BaseSearch(*spec),
        container,
        placements,
        volume,
        lower_bound: lb,
        claimed_ratio,
        certificate: Certificate::new(volume, lb.lower_bound, claimed_ratio),
        audit: runs.into_iter().map(|(a, _)| a).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_grid() {
        // W_sum = 8, w_max = 2, eps' = 1/2.
        let levels = geometric_levels(8.0, 2.0, 0.5);
        assert_eq!(levels, vec![8.0, 4.0, 2.0]);
    }

    #[test]
    fn single_box_has_one_candidate() {
        let spec = GridSpec::with_default_alpha(0.5).unwrap();
        let c = candidate_set(&[BoxItem::new(0, 1.0, 2.0, 3.0)], &spec).unwrap();
        assert_eq!(c, vec![CandidateBase { width: 2.0, depth: 3.0 }]);
    }

    #[test]
    fn default_packer_basics() {
        let p = DefaultStripPacker::default();
        let one = p.pack(&[BoxItem::new(0, 4.0, 1.0, 2.0)], 1.0, 2.0).unwrap();
        assert_eq!(one.height, 4.0);
        let cubes: Vec<BoxItem> = (0..5).map(|i| BoxItem::new(i, 1.0, 1.0, 1.0)).collect();
        assert_eq!(p.pack(&cubes, 1.0, 1.0).unwrap().height, 5.0);
        assert!(matches!(p.pack(&cubes, 0.5, 1.0), Err(Error::BoxExceedsBase { .. })));
    }

    #[test]
    fn grid_spec_validation() {
        assert!(GridSpec::new(0.0, 2.0).is_err());
        assert!(GridSpec::new(0.5, 0.5).is_err());
        let s = GridSpec::new(1.0, 1.0).unwrap();
        assert_eq!(s.eps_prime(), 0.25);
    }
}
