//! Convex-geometry kernel: 3D hulls and volumes, planar projections,
//! minimum-area enclosing rectangles and the recursive bounding box used to
//! reduce polyhedra to boxes.

mod bbox;
mod hull;
mod planar;

pub use bbox::{canonicalize_box, lemma3_bounding_box, CanonicalBox, Dims3, OrientedBox};
pub use hull::{convex_hull, diameter_pair_of, ConvexPolyhedron};
pub use planar::{min_area_rect, project_onto_plane, ConvexPolygon2, PlaneFrame, Rect2};

pub type Point3 = nalgebra::Point3<f64>;
pub type Vector3 = nalgebra::Vector3<f64>;
pub type Point2 = nalgebra::Point2<f64>;
pub type Vector2 = nalgebra::Vector2<f64>;

/// Relative tolerance for volume and containment checks.
pub const REL_TOL: f64 = 1e-9;
/// Tolerance for orthonormality of frames.
pub const ORTHO_TOL: f64 = 1e-12;

/// Orthonormal pair `(u, v)` spanning the plane orthogonal to `normal`.
pub(crate) fn orthonormal_complement(normal: &Vector3) -> (Vector3, Vector3) {
    let n = normal.normalize();
    // Pick the coordinate axis least aligned with n.
    let abs = n.abs();
    let seed = if abs.x <= abs.y && abs.x <= abs.z {
        Vector3::x()
    } else if abs.y <= abs.z {
        Vector3::y()
    } else {
        Vector3::z()
    };
    let u = (seed - n * n.dot(&seed)).normalize();
    let v = n.cross(&u);
    (u, v)
}
