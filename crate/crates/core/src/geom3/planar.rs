use super::{orthonormal_complement, ConvexPolyhedron, Point2, Point3, Vector2, Vector3, REL_TOL};
use crate::{Error, Result};

/// Orthonormal in-plane frame `(u, v)` of a plane with unit `normal`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneFrame {
    pub normal: Vector3,
    pub u: Vector3,
    pub v: Vector3,
}

impl PlaneFrame {
    pub fn new(normal: &Vector3) -> Result<Self> {
        let len = normal.norm();
        if !(len > 0.0) || !len.is_finite() {
            return Err(Error::InvalidParameter("projection normal must be nonzero".into()));
        }
        let normal = normal / len;
        let (u, v) = orthonormal_complement(&normal);
        Ok(Self { normal, u, v })
    }

    pub fn project(&self, p: &Point3) -> Point2 {
        Point2::new(self.u.dot(&p.coords), self.v.dot(&p.coords))
    }

    /// Point of 3-space with in-plane coordinates `q` at signed `height`
    /// along the normal.
    pub fn lift(&self, q: &Point2, height: f64) -> Point3 {
        Point3::from(self.u * q.x + self.v * q.y + self.normal * height)
    }

    pub fn lift_dir(&self, d: &Vector2) -> Vector3 {
        self.u * d.x + self.v * d.y
    }
}

/// Strictly convex polygon, counterclockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon2 {
    vertices: Vec<Point2>,
    frame: Option<PlaneFrame>,
}

impl ConvexPolygon2 {
    /// Convex hull of planar points (monotone chain).
    pub fn hull_of(points: &[Point2]) -> Result<Self> {
        let mut pts: Vec<Point2> = points.to_vec();
        pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        pts.dedup();
        if pts.len() < 3 {
            return Err(Error::DegenerateHull("projection is a point or segment"));
        }
        let scale = pts.iter().fold(0.0f64, |m, p| m.max(p.x.abs()).max(p.y.abs())).max(f64::MIN_POSITIVE);
        let eps = 1e-12 * scale * scale;
        let cross = |o: &Point2, a: &Point2, b: &Point2| (a - o).perp(&(b - o));

        let mut hull: Vec<Point2> = Vec::with_capacity(2 * pts.len());
        for pass in 0..2 {
            let start = hull.len();
            let iter: Box<dyn Iterator<Item = &Point2>> =
                if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
            for p in iter {
                while hull.len() >= start + 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= eps {
                    hull.pop();
                }
                hull.push(*p);
            }
            hull.pop();
        }
        let poly = Self { vertices: hull, frame: None };
        if poly.vertices.len() < 3 || poly.area() <= 1e-12 * scale * scale {
            return Err(Error::DegenerateHull("projection is a point or segment"));
        }
        Ok(poly)
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    /// In-plane frame when the polygon is a projection of a 3D body.
    pub fn frame(&self) -> Option<&PlaneFrame> {
        self.frame.as_ref()
    }

    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        let o = self.vertices[0];
        (1..n - 1).map(|i| (self.vertices[i] - o).perp(&(self.vertices[i + 1] - o))).sum::<f64>() / 2.0
    }
}

/// Orthogonal projection of a polyhedron onto the plane through the origin
/// with the given normal.
pub fn project_onto_plane(p: &ConvexPolyhedron, normal: &Vector3) -> Result<ConvexPolygon2> {
    let frame = PlaneFrame::new(normal)?;
    let pts: Vec<Point2> = p.vertices().iter().map(|v| frame.project(v)).collect();
    let mut poly = ConvexPolygon2::hull_of(&pts)?;
    poly.frame = Some(frame);
    Ok(poly)
}

/// Rectangle in the plane; `axis` is the unit direction of its first side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect2 {
    pub center: Point2,
    pub axis: Vector2,
    pub half_extents: [f64; 2],
}

impl Rect2 {
    pub fn width(&self) -> f64 {
        2.0 * self.half_extents[0]
    }

    pub fn height(&self) -> f64 {
        2.0 * self.half_extents[1]
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn normal(&self) -> Vector2 {
        Vector2::new(-self.axis.y, self.axis.x)
    }

    pub fn contains(&self, p: &Point2, tol: f64) -> bool {
        let r = p - self.center;
        r.dot(&self.axis).abs() <= self.half_extents[0] + tol
            && r.dot(&self.normal()).abs() <= self.half_extents[1] + tol
    }

    /// Bounding rectangle of `points` with first side along `axis`.
    pub fn bounding(points: &[Point2], axis: Vector2) -> Rect2 {
        let normal = Vector2::new(-axis.y, axis.x);
        let (mut a0, mut a1, mut b0, mut b1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for p in points {
            let (a, b) = (axis.dot(&p.coords), normal.dot(&p.coords));
            a0 = a0.min(a);
            a1 = a1.max(a);
            b0 = b0.min(b);
            b1 = b1.max(b);
        }
        let center = Point2::from(axis * (a0 + a1) / 2.0 + normal * (b0 + b1) / 2.0);
        Rect2 { center, axis, half_extents: [(a1 - a0) / 2.0, (b1 - b0) / 2.0] }
    }
}

/// Minimum-area enclosing rectangle. One side is collinear with a polygon
/// edge. Areas within a relative `REL_TOL` count as equal; among those the
/// rectangle with the longer long side wins, so the choice does not depend on
/// how the polygon is rotated or where its vertex list starts.
pub fn min_area_rect(poly: &ConvexPolygon2) -> Result<Rect2> {
    let vs = poly.vertices();
    if vs.len() < 3 {
        return Err(Error::DegenerateHull("polygon has fewer than three vertices"));
    }
    let rects: Vec<Rect2> = (0..vs.len())
        .filter_map(|i| {
            let edge = vs[(i + 1) % vs.len()] - vs[i];
            let len = edge.norm();
            (len > 0.0).then(|| Rect2::bounding(vs, edge / len))
        })
        .collect();
    let min_area = rects.iter().map(Rect2::area).fold(f64::INFINITY, f64::min);
    let long_side = |r: &Rect2| r.width().max(r.height());
    rects
        .into_iter()
        .filter(|r| r.area() <= min_area * (1.0 + REL_TOL))
        .reduce(|best, r| if long_side(&r) > long_side(&best) { r } else { best })
        .ok_or(Error::DegenerateHull("polygon has no edges"))
}
