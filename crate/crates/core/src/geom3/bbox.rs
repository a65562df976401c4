use nalgebra::Matrix3;

use super::{min_area_rect, project_onto_plane, ConvexPolyhedron, Point3, Vector3};
use crate::{Error, ItemId, Result};

/// Box dimensions; canonical when `h >= w >= d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dims3 {
    pub h: f64,
    pub w: f64,
    pub d: f64,
}

impl Dims3 {
    pub fn volume(&self) -> f64 {
        self.h * self.w * self.d
    }
}

/// Box with arbitrary orientation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedBox {
    pub center: Point3,
    pub axes: [Vector3; 3],
    pub half_extents: [f64; 3],
}

impl OrientedBox {
    pub fn volume(&self) -> f64 {
        8.0 * self.half_extents.iter().product::<f64>()
    }

    pub fn corners(&self) -> [Point3; 8] {
        let mut out = [self.center; 8];
        for (i, c) in out.iter_mut().enumerate() {
            for k in 0..3 {
                let s = if i >> k & 1 == 0 { -1.0 } else { 1.0 };
                *c += self.axes[k] * (s * self.half_extents[k]);
            }
        }
        out
    }

    pub fn contains(&self, p: &Point3, tol: f64) -> bool {
        let r = p - self.center;
        (0..3).all(|k| r.dot(&self.axes[k]).abs() <= self.half_extents[k] + tol)
    }

    /// Sorted dimensions and the proper rotation taking the box axes to the
    /// world axes: the longest side to `z`, the middle one to `x`, the
    /// shortest to `y`. Applied to `p - center`.
    pub fn canonical_frame(&self) -> (Dims3, Matrix3<f64>) {
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| self.half_extents[b].total_cmp(&self.half_extents[a]));
        let [ih, iw, id] = order;
        let mut rows = [self.axes[iw], self.axes[id], self.axes[ih]];
        let mut r = Matrix3::from_rows(&[rows[0].transpose(), rows[1].transpose(), rows[2].transpose()]);
        if r.determinant() < 0.0 {
            rows[1] = -rows[1];
            r = Matrix3::from_rows(&[rows[0].transpose(), rows[1].transpose(), rows[2].transpose()]);
        }
        let dims = Dims3 {
            h: 2.0 * self.half_extents[ih],
            w: 2.0 * self.half_extents[iw],
            d: 2.0 * self.half_extents[id],
        };
        (dims, r)
    }
}

/// Enclosing box with volume at most `3! * volume(p)`.
///
/// The first axis runs along a diameter `PQ` with length `|PQ|`; the cross
/// section is the minimum-area rectangle around the projection of `p` onto
/// the plane orthogonal to `PQ`.
pub fn lemma3_bounding_box(p: &ConvexPolyhedron) -> Result<OrientedBox> {
    let (a, b) = p.diameter_pair();
    let axis = (b - a).normalize();
    let shadow = project_onto_plane(p, &axis)?;
    let rect = min_area_rect(&shadow)?;
    let frame = shadow.frame().expect("projection records its frame");

    let (lo, hi) = p.vertices().iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        let t = axis.dot(&v.coords);
        (lo.min(t), hi.max(t))
    });
    let center = frame.lift(&rect.center, (lo + hi) / 2.0);
    let half_extents = [(hi - lo) / 2.0, rect.half_extents[0], rect.half_extents[1]];
    if half_extents.iter().any(|&h| !(h > 0.0)) {
        return Err(Error::DegenerateHull("bounding box has a zero side"));
    }
    Ok(OrientedBox {
        center,
        axes: [axis, frame.lift_dir(&rect.axis), frame.lift_dir(&rect.normal())],
        half_extents,
    })
}

/// Result of reorienting a box so that `h >= w >= d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalBox {
    pub dims: Dims3,
    /// `perm[k]` is the input index (0 = h, 1 = w, 2 = d) that became
    /// output dimension `k`.
    pub perm: [usize; 3],
    /// Proper rotation taking the box's own frame to the canonical one.
    pub rotation: Matrix3<f64>,
}

/// World axis carrying each of `(h, w, d)`.
const AXIS_OF: [usize; 3] = [2, 0, 1];

/// Sorts `(h, w, d)` into non-increasing order and realizes the sort as a
/// rotation; an odd permutation is fixed up by mirroring the depth axis,
/// which a box absorbs by symmetry.
pub fn canonicalize_box(id: ItemId, dims: [f64; 3]) -> Result<CanonicalBox> {
    for &value in &dims {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::NonPositiveDimension { id, value });
        }
    }
    let mut perm = [0usize, 1, 2];
    perm.sort_by(|&a, &b| dims[b].total_cmp(&dims[a]));
    let mut rotation = Matrix3::zeros();
    for k in 0..3 {
        rotation[(AXIS_OF[k], AXIS_OF[perm[k]])] = 1.0;
    }
    if rotation.determinant() < 0.0 {
        rotation.row_mut(AXIS_OF[2]).neg_mut();
    }
    Ok(CanonicalBox {
        dims: Dims3 { h: dims[perm[0]], w: dims[perm[1]], d: dims[perm[2]] },
        perm,
        rotation,
    })
}
