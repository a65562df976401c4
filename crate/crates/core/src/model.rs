//! Shared data model: items, placements, containers and packing results.
//!
//! Axis convention used throughout: `x` is width, `y` is depth, `z` is height.
//! A box item `(h, w, d)` occupies `[0, w] x [0, d] x [0, h]` in its own
//! frame; a placement maps that frame into the container.

use std::fmt;

use nalgebra::{Matrix3, Point3, Vector3};

use crate::basesearch::{CandidateAudit, GridSpec};
use crate::slab::SlabParams;
use crate::verify::{Certificate, LowerBoundReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ItemId(pub u64);

impl fmt::Display for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxItem {
    pub id: ItemId,
    pub h: f64,
    pub w: f64,
    pub d: f64,
}

impl BoxItem {
    pub fn new(id: u64, h: f64, w: f64, d: f64) -> Self {
        Self { id: ItemId(id), h, w, d }
    }

    pub fn volume(&self) -> f64 {
        self.h * self.w * self.d
    }

    /// Corners of the box in its own frame.
    pub fn local_corners(&self) -> [Point3<f64>; 8] {
        corners([0.0, 0.0, 0.0], [self.w, self.d, self.h])
    }

    pub(crate) fn check_positive(&self) -> crate::Result<()> {
        for value in [self.h, self.w, self.d] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(crate::Error::NonPositiveDimension { id: self.id, value });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolyItem {
    pub id: ItemId,
    pub vertices: Vec<Point3<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Boxes(Vec<BoxItem>),
    Polyhedra(Vec<PolyItem>),
}

impl Instance {
    pub fn len(&self) -> usize {
        match self {
            Instance::Boxes(b) => b.len(),
            Instance::Polyhedra(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn ids(&self) -> Vec<ItemId> {
        match self {
            Instance::Boxes(b) => b.iter().map(|b| b.id).collect(),
            Instance::Polyhedra(p) => p.iter().map(|p| p.id).collect(),
        }
    }
}

/// Which motions are allowed and which container the guarantee refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Axis-parallel boxes under translation, axis-parallel container.
    Translation,
    /// Boxes under rigid motions, axis-parallel container.
    RigidBoxes,
    /// Boxes under rigid motions, arbitrary convex container.
    ConvexBoxes,
    /// Convex polyhedra under rigid motions, axis-parallel container.
    RigidPolyhedra,
    /// Convex polyhedra under rigid motions, arbitrary convex container.
    ConvexPolyhedra,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::Translation,
        Variant::RigidBoxes,
        Variant::ConvexBoxes,
        Variant::RigidPolyhedra,
        Variant::ConvexPolyhedra,
    ];

    /// Divisor `K` with `h_max * w_max * d_max <= K * V_opt`.
    pub fn extent_divisor(self) -> f64 {
        match self {
            Variant::Translation => 1.0,
            Variant::RigidBoxes => 6f64.sqrt(),
            Variant::ConvexBoxes => 6.0,
            Variant::RigidPolyhedra => 24.0 * 10f64.sqrt(),
            Variant::ConvexPolyhedra => 24.0 * 60f64.sqrt(),
        }
    }

    /// Factor between the volume of an item's packing box and the item itself.
    pub fn volume_factor(self) -> f64 {
        if self.is_polyhedra() {
            6.0
        } else {
            1.0
        }
    }

    /// Published approximation constant for this variant.
    pub fn published_ratio(self) -> f64 {
        match self {
            Variant::Translation => 11.542,
            Variant::RigidBoxes => 17.738,
            Variant::ConvexBoxes => 29.135,
            Variant::RigidPolyhedra => 277.59,
            Variant::ConvexPolyhedra => 511.37,
        }
    }

    pub fn is_polyhedra(self) -> bool {
        matches!(self, Variant::RigidPolyhedra | Variant::ConvexPolyhedra)
    }

    pub fn is_rigid(self) -> bool {
        self != Variant::Translation
    }

    /// The convex-container counterpart of a rigid variant.
    pub fn convex_counterpart(self) -> Option<Variant> {
        match self {
            Variant::RigidBoxes | Variant::ConvexBoxes => Some(Variant::ConvexBoxes),
            Variant::RigidPolyhedra | Variant::ConvexPolyhedra => Some(Variant::ConvexPolyhedra),
            Variant::Translation => None,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Variant::Translation => "translation",
            Variant::RigidBoxes => "rigid-boxes",
            Variant::ConvexBoxes => "convex-boxes",
            Variant::RigidPolyhedra => "rigid-polyhedra",
            Variant::ConvexPolyhedra => "convex-polyhedra",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Variant> {
        Variant::ALL.into_iter().find(|v| v.tag() == tag)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Rigid motion `p -> rotation * p + translation` positioning one item.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Placement {
    pub id: ItemId,
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

impl Placement {
    pub fn translation_only(id: ItemId, translation: Vector3<f64>) -> Self {
        Self { id, rotation: Matrix3::identity(), translation }
    }

    pub fn apply(&self, p: &Point3<f64>) -> Point3<f64> {
        Point3::from(self.rotation * p.coords + self.translation)
    }
}

/// Axis-parallel container anchored at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Container {
    pub height: f64,
    pub width: f64,
    pub depth: f64,
}

impl Container {
    pub fn volume(&self) -> f64 {
        self.height * self.width * self.depth
    }

    /// Extents along `(x, y, z)`.
    pub fn extents(&self) -> [f64; 3] {
        [self.width, self.depth, self.height]
    }

    pub fn corners(&self) -> [Point3<f64>; 8] {
        corners([0.0; 3], self.extents())
    }
}

/// How a result was produced; needed to recompute its claimed ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Slab(SlabParams),
    BaseSearch(GridSpec),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PackingResult {
    pub variant: Variant,
    pub method: Method,
    pub container: Container,
    pub placements: Vec<Placement>,
    pub volume: f64,
    pub lower_bound: LowerBoundReport,
    pub claimed_ratio: f64,
    pub certificate: Certificate,
    /// Per-candidate outcomes; empty unless produced by the base search.
    pub audit: Vec<CandidateAudit>,
}

pub(crate) fn corners(min: [f64; 3], max: [f64; 3]) -> [Point3<f64>; 8] {
    let mut out = [Point3::origin(); 8];
    for (i, c) in out.iter_mut().enumerate() {
        *c = Point3::new(
            if i & 1 == 0 { min[0] } else { max[0] },
            if i & 2 == 0 { min[1] } else { max[1] },
            if i & 4 == 0 { min[2] } else { max[2] },
        );
    }
    out
}
