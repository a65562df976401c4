use std::collections::HashMap;

use super::{Point3, Vector3};
use crate::{Error, Result};

/// Solid convex polyhedron stored as its hull vertices (sorted
/// lexicographically) and outward-oriented triangular facets.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolyhedron {
    vertices: Vec<Point3>,
    faces: Vec<[usize; 3]>,
}

impl ConvexPolyhedron {
    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    /// Volume by signed tetrahedra against the first vertex.
    pub fn volume(&self) -> f64 {
        let o = self.vertices[0];
        let six_v: f64 = self
            .faces
            .iter()
            .map(|&[a, b, c]| {
                let (a, b, c) = (self.vertices[a] - o, self.vertices[b] - o, self.vertices[c] - o);
                a.dot(&b.cross(&c))
            })
            .sum();
        six_v / 6.0
    }

    /// Largest coordinate extent of the vertex set.
    pub fn scale(&self) -> f64 {
        scale_of(&self.vertices)
    }

    /// Outward unit normal and offset of each facet.
    pub fn face_planes(&self) -> impl Iterator<Item = (Vector3, f64)> + '_ {
        self.faces.iter().filter_map(|&[a, b, c]| {
            let n = (self.vertices[b] - self.vertices[a]).cross(&(self.vertices[c] - self.vertices[a]));
            let len = n.norm();
            (len > 0.0).then(|| {
                let n = n / len;
                (n, n.dot(&self.vertices[a].coords))
            })
        })
    }

    /// True if `p` lies inside or within `tol` of every facet plane.
    pub fn contains(&self, p: &Point3, tol: f64) -> bool {
        self.face_planes().all(|(n, off)| n.dot(&p.coords) - off <= tol)
    }

    /// Vertex pair of maximal distance.
    pub fn diameter_pair(&self) -> (Point3, Point3) {
        let (i, j) = diameter_pair_of(&self.vertices).expect("polyhedron has at least 4 vertices");
        (self.vertices[i], self.vertices[j])
    }

    /// Length of the projection onto the line spanned by `dir`.
    pub fn support_width(&self, dir: &Vector3) -> f64 {
        let dir = dir.normalize();
        let (lo, hi) = self.vertices.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            let t = dir.dot(&v.coords);
            (lo.min(t), hi.max(t))
        });
        hi - lo
    }

    /// Applies `p -> rotation * p + translation` to every vertex.
    pub fn transformed(&self, rotation: &nalgebra::Matrix3<f64>, translation: &Vector3) -> Result<Self> {
        let pts: Vec<Point3> =
            self.vertices.iter().map(|v| Point3::from(rotation * v.coords + translation)).collect();
        convex_hull(&pts)
    }
}

/// Indices `(i, j)`, `i != j`, of a pair of points at maximal distance.
///
/// Ties go to the lexicographically smallest pair of points, comparing the
/// pair by its smaller point first.
pub fn diameter_pair_of(points: &[Point3]) -> Option<(usize, usize)> {
    let mut best: Option<(f64, usize, usize)> = None;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d2 = (points[i] - points[j]).norm_squared();
            let (a, b) = if lex_cmp(&points[i], &points[j]).is_le() { (i, j) } else { (j, i) };
            let better = match best {
                None => true,
                Some((bd, bi, bj)) => {
                    d2 > bd
                        || (d2 == bd
                            && lex_cmp(&points[a], &points[bi])
                                .then_with(|| lex_cmp(&points[b], &points[bj]))
                                .is_lt())
                }
            };
            if better {
                best = Some((d2, a, b));
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

fn lex_cmp(a: &Point3, b: &Point3) -> std::cmp::Ordering {
    a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)).then(a.z.total_cmp(&b.z))
}

fn scale_of(points: &[Point3]) -> f64 {
    let mut lo = points[0];
    let mut hi = points[0];
    for p in points {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    (hi - lo).amax()
}

/// Convex hull of a point cloud.
///
/// The result keeps only true corners of the hull, sorted lexicographically;
/// points on edges or inside facets are dropped.
pub fn convex_hull(points: &[Point3]) -> Result<ConvexPolyhedron> {
    if points.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
        return Err(Error::DegenerateHull("non-finite coordinate"));
    }
    let mut pts: Vec<Point3> = points.to_vec();
    pts.sort_by(lex_cmp);
    pts.dedup();
    if pts.len() < 4 {
        return Err(Error::DegenerateHull("fewer than four distinct points"));
    }
    let scale = scale_of(&pts);
    let eps = 1e-10 * scale;
    loop {
        let faces = triangulated_hull(&pts, eps)?;
        let corners = corner_vertices(&pts, &faces);
        let used_all = corners.len() == pts.len();
        if used_all {
            let poly = ConvexPolyhedron { vertices: pts, faces };
            if poly.volume() <= 1e-12 * scale.powi(3) {
                return Err(Error::DegenerateHull("zero volume"));
            }
            return Ok(poly);
        }
        // Rebuild from corners only; the hull is unchanged but every
        // remaining vertex is then extreme.
        pts = corners.into_iter().map(|i| pts[i]).collect();
        if pts.len() < 4 {
            return Err(Error::DegenerateHull("fewer than four corners"));
        }
    }
}

fn face_normal(pts: &[Point3], f: &[usize; 3]) -> Vector3 {
    (pts[f[1]] - pts[f[0]]).cross(&(pts[f[2]] - pts[f[0]]))
}

fn signed_distance(pts: &[Point3], f: &[usize; 3], p: &Point3) -> f64 {
    let n = face_normal(pts, f);
    let len = n.norm();
    if len == 0.0 {
        return 0.0;
    }
    n.dot(&(p - pts[f[0]])) / len
}

/// Incremental hull. Returns outward triangles indexing into `pts`.
fn triangulated_hull(pts: &[Point3], eps: f64) -> Result<Vec<[usize; 3]>> {
    let i0 = 0;
    let i1 = (0..pts.len())
        .max_by(|&a, &b| (pts[a] - pts[i0]).norm().total_cmp(&(pts[b] - pts[i0]).norm()))
        .unwrap();
    if (pts[i1] - pts[i0]).norm() <= eps {
        return Err(Error::DegenerateHull("coincident points"));
    }
    let axis = (pts[i1] - pts[i0]).normalize();
    let line_dist = |p: &Point3| {
        let r = p - pts[i0];
        (r - axis * axis.dot(&r)).norm()
    };
    let i2 = (0..pts.len()).max_by(|&a, &b| line_dist(&pts[a]).total_cmp(&line_dist(&pts[b]))).unwrap();
    if line_dist(&pts[i2]) <= eps {
        return Err(Error::DegenerateHull("collinear points"));
    }
    let base = [i0, i1, i2];
    let i3 = (0..pts.len())
        .max_by(|&a, &b| {
            signed_distance(pts, &base, &pts[a]).abs().total_cmp(&signed_distance(pts, &base, &pts[b]).abs())
        })
        .unwrap();
    if signed_distance(pts, &base, &pts[i3]).abs() <= eps {
        return Err(Error::DegenerateHull("coplanar points"));
    }

    let tet = [i0, i1, i2, i3];
    let mut faces: Vec<[usize; 3]> = Vec::new();
    for skip in 0..4 {
        let mut f = [0usize; 3];
        let mut k = 0;
        for (idx, &v) in tet.iter().enumerate() {
            if idx != skip {
                f[k] = v;
                k += 1;
            }
        }
        if signed_distance(pts, &f, &pts[tet[skip]]) > 0.0 {
            f.swap(1, 2);
        }
        faces.push(f);
    }

    let centroid = Point3::from(tet.iter().map(|&i| pts[i].coords).sum::<Vector3>() / 4.0);
    let mut order: Vec<usize> = (0..pts.len()).filter(|i| !tet.contains(i)).collect();
    order.sort_by(|&a, &b| (pts[b] - centroid).norm().total_cmp(&(pts[a] - centroid).norm()).then(a.cmp(&b)));

    for p in order {
        let visible: Vec<bool> = faces.iter().map(|f| signed_distance(pts, f, &pts[p]) > eps).collect();
        if !visible.iter().any(|&v| v) {
            continue;
        }
        let mut owner: HashMap<(usize, usize), usize> = HashMap::with_capacity(faces.len() * 3);
        for (fi, f) in faces.iter().enumerate() {
            for k in 0..3 {
                owner.insert((f[k], f[(k + 1) % 3]), fi);
            }
        }
        let mut next = Vec::with_capacity(faces.len() + 4);
        for (fi, f) in faces.iter().enumerate() {
            if !visible[fi] {
                next.push(*f);
                continue;
            }
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                match owner.get(&(b, a)) {
                    Some(&twin) if !visible[twin] => next.push([a, b, p]),
                    _ => {}
                }
            }
        }
        faces = next;
    }
    Ok(faces)
}

/// Indices of vertices whose incident facet normals span 3-space.
fn corner_vertices(pts: &[Point3], faces: &[[usize; 3]]) -> Vec<usize> {
    let mut normals: Vec<Vec<Vector3>> = vec![Vec::new(); pts.len()];
    for f in faces {
        let n = face_normal(pts, f);
        let len = n.norm();
        if len == 0.0 {
            continue;
        }
        for &v in f {
            normals[v].push(n / len);
        }
    }
    let mut out = Vec::new();
    for (v, ns) in normals.iter().enumerate() {
        if ns.is_empty() {
            continue;
        }
        let a = ns[0];
        let b = ns.iter().max_by(|x, y| a.cross(x).norm().total_cmp(&a.cross(y).norm())).unwrap();
        let ab = a.cross(b);
        if ab.norm() <= 1e-9 {
            continue;
        }
        let spread = ns.iter().map(|c| ab.dot(c).abs()).fold(0.0, f64::max);
        if spread > 1e-9 {
            out.push(v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube() -> Vec<Point3> {
        let mut v = Vec::new();
        for i in 0..8 {
            v.push(Point3::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64));
        }
        v
    }

    #[test]
    fn unit_cube() {
        let h = convex_hull(&cube()).unwrap();
        assert_eq!(h.vertices().len(), 8);
        assert!((h.volume() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn standard_simplex() {
        let pts = [
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
            Point3::new(0.0, 0.0, 1.0),
        ];
        let h = convex_hull(&pts).unwrap();
        assert_eq!(h.vertices().len(), 4);
        assert!((h.volume() - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn drops_edge_and_face_points() {
        let mut pts = cube();
        pts.push(Point3::new(0.5, 0.0, 0.0));
        pts.push(Point3::new(0.5, 0.5, 1.0));
        pts.push(Point3::new(0.5, 0.5, 0.5));
        pts.push(Point3::new(1.0, 1.0, 0.25));
        let h = convex_hull(&pts).unwrap();
        assert_eq!(h.vertices().len(), 8);
        assert!((h.volume() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        let flat: Vec<Point3> =
            (0..10).map(|i| Point3::new(i as f64, (i * i % 7) as f64, 0.0)).collect();
        assert!(matches!(convex_hull(&flat), Err(Error::DegenerateHull(_))));
        let line: Vec<Point3> = (0..5).map(|i| Point3::new(i as f64, 2.0 * i as f64, 0.0)).collect();
        assert!(matches!(convex_hull(&line), Err(Error::DegenerateHull(_))));
        let same = vec![Point3::new(1.0, 1.0, 1.0); 6];
        assert!(matches!(convex_hull(&same), Err(Error::DegenerateHull(_))));
        assert!(convex_hull(&cube()[..3]).is_err());
    }

    #[test]
    fn faces_are_outward() {
        let h = convex_hull(&cube()).unwrap();
        let c = Point3::new(0.5, 0.5, 0.5);
        for (n, off) in h.face_planes() {
            assert!(n.dot(&c.coords) - off < 0.0);
        }
    }

    #[test]
    fn cube_diameter_is_main_diagonal() {
        let h = convex_hull(&cube()).unwrap();
        let (p, q) = h.diameter_pair();
        assert!(((p - q).norm() - 3f64.sqrt()).abs() < 1e-15);
        // Lexicographically smallest pair among the four diagonals.
        assert_eq!(p, Point3::new(0.0, 0.0, 0.0));
        assert_eq!(q, Point3::new(1.0, 1.0, 1.0));
    }

    #[test]
    fn collinear_diameter_picks_extremes() {
        let pts = vec![
            Point3::new(2.0, 0.0, 0.0),
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(4.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(4.0, 0.0, 0.0),
        ];
        let (i, j) = diameter_pair_of(&pts).unwrap();
        assert_eq!(pts[i], Point3::new(0.0, 0.0, 0.0));
        assert_eq!(pts[j], Point3::new(4.0, 0.0, 0.0));
    }
}
