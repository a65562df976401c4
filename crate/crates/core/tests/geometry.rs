use std::f64::consts::PI;

use boxpress::gen::random_hulls;
use boxpress::geom3::{
    convex_hull, lemma3_bounding_box, min_area_rect, project_onto_plane, ConvexPolyhedron, Point3, Rect2, Vector2,
    Vector3,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn hulls(n: usize, seed: u64) -> Vec<(Vec<Point3>, ConvexPolyhedron)> {
    random_hulls(n, seed, 0.2, 2.0, 20)
        .unwrap()
        .into_iter()
        .map(|p| {
            let h = convex_hull(&p.vertices).unwrap();
            (p.vertices, h)
        })
        .collect()
}

fn unit_cube() -> ConvexPolyhedron {
    let v: Vec<Point3> =
        (0..8).map(|i| Point3::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64)).collect();
    convex_hull(&v).unwrap()
}

#[test]
fn hull_volume_matches_monte_carlo() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (_, hull) in hulls(3, 21) {
        let (mut lo, mut hi) = (Vector3::repeat(f64::INFINITY), Vector3::repeat(f64::NEG_INFINITY));
        for v in hull.vertices() {
            lo = lo.inf(&v.coords);
            hi = hi.sup(&v.coords);
        }
        let samples = 1_000_000;
        let inside = (0..samples)
            .filter(|_| {
                let p = Point3::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y), rng.gen_range(lo.z..hi.z));
                hull.contains(&p, 0.0)
            })
            .count();
        let estimate = inside as f64 / samples as f64 * (hi - lo).product();
        let rel = (estimate - hull.volume()).abs() / hull.volume();
        assert!(rel < 0.01, "monte carlo {estimate} vs {} ({rel})", hull.volume());
    }
}

#[test]
fn hull_contains_sampled_ball_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut pts = Vec::new();
    while pts.len() < 100 {
        let p = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if p.norm() <= 1.0 {
            pts.push(Point3::from(p * 3.0 + Vector3::new(1.0, -2.0, 0.5)));
        }
    }
    let hull = convex_hull(&pts).unwrap();
    assert!(pts.iter().all(|p| hull.contains(p, 1e-9)));
    assert!(hull.vertices().len() < pts.len());
    assert!(hull.volume() > 0.0 && hull.volume() < 4.0 / 3.0 * PI * 27.0);
}

#[test]
fn hull_keeps_every_input_point() {
    for (pts, hull) in hulls(40, 5) {
        let tol = 1e-9 * hull.scale();
        assert!(pts.iter().all(|p| hull.contains(p, tol)));
    }
}

#[test]
fn cube_projection_areas() {
    let cube = unit_cube();
    let axis = project_onto_plane(&cube, &Vector3::z()).unwrap();
    assert!((axis.area() - 1.0).abs() < 1e-12);
    // Shadow of the unit cube along a body diagonal is a regular hexagon.
    let diag = project_onto_plane(&cube, &Vector3::new(1.0, 1.0, 1.0)).unwrap();
    assert_eq!(diag.vertices().len(), 6);
    assert!((diag.area() - 3f64.sqrt()).abs() < 1e-12);
}

#[test]
fn projection_area_matches_facet_sum() {
    // Area of a shadow is half the sum of |n . a| over facets with area vector a.
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for (_, hull) in hulls(20, 6) {
        let dir = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)).normalize();
        let vs = hull.vertices();
        let facet_sum: f64 = hull
            .faces()
            .iter()
            .map(|&[a, b, c]| 0.5 * dir.dot(&(vs[b] - vs[a]).cross(&(vs[c] - vs[a]))).abs())
            .sum();
        let area = project_onto_plane(&hull, &dir).unwrap().area();
        assert!((area - facet_sum / 2.0).abs() <= 1e-9 * area.max(1.0), "{area} vs {}", facet_sum / 2.0);
    }
}

#[test]
fn min_area_rect_beats_orientation_sweep() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (_, hull) in hulls(30, 7) {
        let dir = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let poly = project_onto_plane(&hull, &dir).unwrap();
        let rect = min_area_rect(&poly).unwrap();
        let sweep = (0..360)
            .map(|k| {
                let t = PI * k as f64 / 360.0;
                Rect2::bounding(poly.vertices(), Vector2::new(t.cos(), t.sin())).area()
            })
            .fold(f64::INFINITY, f64::min);
        assert!(rect.area() <= sweep * (1.0 + 1e-12));
        assert!(sweep <= rect.area() * 1.02);
        let tol = 1e-9 * rect.width().max(rect.height());
        assert!(poly.vertices().iter().all(|p| rect.contains(p, tol)));
    }
}

#[test]
fn diameter_matches_all_pairs() {
    for (pts, hull) in hulls(30, 8) {
        let brute = pts
            .iter()
            .flat_map(|a| pts.iter().map(move |b| (a - b).norm()))
            .fold(0.0f64, f64::max);
        let (a, b) = hull.diameter_pair();
        assert!(((a - b).norm() - brute).abs() <= 1e-12 * brute);
    }
}

#[test]
fn lemma3_box_is_orthonormal_and_encloses() {
    for (pts, hull) in hulls(50, 9) {
        let obb = lemma3_bounding_box(&hull).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((obb.axes[i].dot(&obb.axes[j]) - expect).abs() < 1e-12);
            }
        }
        let tol = 1e-9 * hull.scale();
        assert!(pts.iter().all(|p| obb.contains(p, tol)));
        assert!(obb.volume() <= 6.0 * hull.volume() * (1.0 + 1e-9));
        // The first axis spans the diameter.
        let (a, b) = hull.diameter_pair();
        assert!(((2.0 * obb.half_extents[0]) - (a - b).norm()).abs() <= 1e-9 * hull.scale());
    }
}
