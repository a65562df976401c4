//! Seeded instance generators. Output depends only on the arguments.

use nalgebra::{Quaternion, UnitQuaternion, Vector3};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geom3::{convex_hull, Point3};
use crate::model::{BoxItem, ItemId, PolyItem};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenKind {
    UniformBoxes,
    SkewedBoxes,
    RandomHulls,
}

impl GenKind {
    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "uniform-boxes" => Some(Self::UniformBoxes),
            "skewed-boxes" => Some(Self::SkewedBoxes),
            "random-hulls" => Some(Self::RandomHulls),
            _ => None,
        }
    }
}

fn check_range(n: usize, lo: f64, hi: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::BadRange("need at least one item".into()));
    }
    if !(lo > 0.0 && lo.is_finite() && hi.is_finite() && hi >= lo) {
        return Err(Error::BadRange(format!("dimension range [{lo}, {hi}]")));
    }
    Ok(())
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        rng.gen_range(lo..=hi)
    } else {
        lo
    }
}

/// Boxes with every side uniform in `[lo, hi]`.
pub fn uniform_boxes(n: usize, seed: u64, lo: f64, hi: f64) -> Result<Vec<BoxItem>> {
    check_range(n, lo, hi)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n as u64)
        .map(|id| {
            let h = uniform(&mut rng, lo, hi);
            let w = uniform(&mut rng, lo, hi);
            let d = uniform(&mut rng, lo, hi);
            BoxItem::new(id, h, w, d)
        })
        .collect())
}

/// Boxes whose longest side is uniform in `[lo, hi]` and whose other sides
/// are shorter by log-uniform factors up to `max_aspect`, in random axis
/// order.
pub fn skewed_boxes(n: usize, seed: u64, lo: f64, hi: f64, max_aspect: f64) -> Result<Vec<BoxItem>> {
    check_range(n, lo, hi)?;
    if !(max_aspect >= 1.0 && max_aspect.is_finite()) {
        return Err(Error::BadRange(format!("aspect {max_aspect} must be at least 1")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n as u64)
        .map(|id| {
            let long = uniform(&mut rng, lo, hi);
            let mut dims = [long, 0.0, 0.0];
            for d in &mut dims[1..] {
                *d = long / max_aspect.powf(rng.gen_range(0.0..=1.0));
            }
            dims.shuffle(&mut rng);
            BoxItem::new(id, dims[0], dims[1], dims[2])
        })
        .collect())
}

fn random_rotation(rng: &mut ChaCha8Rng) -> UnitQuaternion<f64> {
    loop {
        let q = Quaternion::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n = q.norm();
        if n > 1e-3 && n <= 1.0 {
            return UnitQuaternion::from_quaternion(q);
        }
    }
}

/// Uniform random rigid rotation, exposed for invariance tests.
pub fn random_rotation_from_seed(seed: u64) -> UnitQuaternion<f64> {
    random_rotation(&mut ChaCha8Rng::seed_from_u64(seed))
}

/// Convex hulls of `points` samples from randomly oriented ellipsoids with
/// semi-axes in `[lo, hi]`. Flat samples are redrawn.
pub fn random_hulls(n: usize, seed: u64, lo: f64, hi: f64, points: usize) -> Result<Vec<PolyItem>> {
    check_range(n, lo, hi)?;
    if points < 4 {
        return Err(Error::BadRange(format!("need at least 4 points per hull, got {points}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let axes = Vector3::new(uniform(&mut rng, lo, hi), uniform(&mut rng, lo, hi), uniform(&mut rng, lo, hi));
        let rot = random_rotation(&mut rng);
        let center = Vector3::new(
            rng.gen_range(-5.0..5.0) * hi,
            rng.gen_range(-5.0..5.0) * hi,
            rng.gen_range(-5.0..5.0) * hi,
        );
        let mut verts = Vec::with_capacity(points);
        while verts.len() < points {
            let u = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if u.norm_squared() <= 1.0 {
                verts.push(Point3::from(rot * u.component_mul(&axes) + center));
            }
        }
        let Ok(hull) = convex_hull(&verts) else { continue };
        // Reject slivers: volume tiny relative to the sampled ellipsoid.
        let ellipsoid = 4.0 / 3.0 * std::f64::consts::PI * axes.product();
        if hull.volume() < 1e-3 * ellipsoid {
            continue;
        }
        out.push(PolyItem { id: ItemId(out.len() as u64), vertices: hull.vertices().to_vec() });
    }
    Ok(out)
}
