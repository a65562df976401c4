//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::time::{Duration, Instant};

use boxpress::basesearch::{candidate_set, omcop_translation, DefaultStripPacker, GridSpec};
use boxpress::gen::{random_hulls, random_rotation_from_seed, skewed_boxes, uniform_boxes};
use boxpress::geom3::{convex_hull, lemma3_bounding_box, Point3, Vector3};
use boxpress::slab::{self, tune_params, RatioParamsSpec};
use boxpress::strip2d::{pack_strip_2d, RectItem};
use boxpress::verify::{brute_force_optimal_translation, lower_bound, segment_bound_checks, validate_packing};
use boxpress::{BoxItem, Instance, ItemId, PolyItem, Variant};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn box_instance(seed: u64, n: usize) -> Vec<BoxItem> {
    if seed % 2 == 0 {
        uniform_boxes(n, seed, 0.1, 3.0).unwrap()
    } else {
        skewed_boxes(n, seed, 0.05, 5.0, 100.0).unwrap()
    }
}

fn strip_area_guarantee() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = f64::INFINITY;
    let mut failures = 0;
    let mut elapsed = Duration::ZERO;
    for _ in 0..500 {
        let n = rng.gen_range(1..=10_000);
        let width = rng.gen_range(0.5..50.0);
        let items: Vec<RectItem> = (0..n as u64)
            .map(|id| RectItem { id: ItemId(id), w: width * rng.gen_range(1e-3..=1.0), h: rng.gen_range(0.01..10.0) })
            .collect();
        let start = Instant::now();
        let packing = pack_strip_2d(&items, width).unwrap();
        elapsed += start.elapsed();
        let h_max = items.iter().map(|r| r.h).fold(0.0, f64::max);
        let area: f64 = items.iter().map(|r| r.w * r.h).sum();
        let slack = area - (packing.height - h_max) * width / 2.0;
        worst = worst.min(slack);
        if slack < -1e-9 {
            failures += 1;
        }
    }
    let fast = elapsed < Duration::from_secs(5);
    outcome(
        failures == 0 && fast,
        format!("500 instances, {failures} violations, min slack {worst:.3e}, packing time {elapsed:.2?} (limit 5s)"),
    )
}

fn validity_suite() -> Outcome {
    let mut failures = Vec::new();
    let mut runs = 0;
    for seed in 0..500u64 {
        let mut results = Vec::new();
        let instance;
        if seed % 5 == 4 {
            let n = 1 + (seed as usize % 40);
            instance = Instance::Polyhedra(random_hulls(n, seed, 0.1, 2.0, 12).unwrap());
            for v in [Variant::RigidPolyhedra, Variant::ConvexPolyhedra] {
                results.push(slab::pack(&instance, v, None).unwrap());
            }
        } else {
            let n = 1 + (seed as usize * 37 % 300);
            let boxes = box_instance(seed, n);
            if n <= 12 {
                let spec = GridSpec::with_default_alpha(1.0).unwrap();
                results.push(omcop_translation(&boxes, &spec, &DefaultStripPacker::default()).unwrap());
            }
            instance = Instance::Boxes(boxes);
            for v in [Variant::Translation, Variant::RigidBoxes, Variant::ConvexBoxes] {
                results.push(slab::pack(&instance, v, None).unwrap());
            }
        }
        for r in &results {
            runs += 1;
            let report = validate_packing(r, &instance).unwrap();
            if let Some(v) = report.first_violation {
                failures.push(format!("seed {seed} {}: {v}", r.variant.tag()));
            }
        }
    }
    outcome(failures.is_empty(), format!("{runs} packings on 500 instances, {} invalid {:?}", failures.len(), failures.first()))
}

fn constant_reproduction() -> Outcome {
    let published = [
        (Variant::Translation, 11.542),
        (Variant::RigidBoxes, 17.738),
        (Variant::ConvexBoxes, 29.135),
        (Variant::RigidPolyhedra, 277.59),
        (Variant::ConvexPolyhedra, 511.37),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (v, expected) in published {
        let r = tune_params(RatioParamsSpec::for_variant(v)).ratio;
        pass &= (r - expected).abs() <= 5e-3;
        parts.push(format!("{}={r:.4}", v.tag()));
    }
    let unit = tune_params(RatioParamsSpec { f: 1.0, g: 1.0 });
    let c = 2f64.cbrt() + 1.0;
    let eps = (4f64.cbrt() - 2f64.cbrt() + 1.0) / 3.0;
    let (dc, de) = ((unit.c - c).abs(), (unit.eps - eps).abs());
    pass &= dc <= 1e-9 && de <= 1e-9;
    outcome(pass, format!("{} (tol 5e-3); F=G=1 closed form |dc|={dc:.1e} |deps|={de:.1e} (tol 1e-9)", parts.join(" ")))
}

fn certificate_suite() -> Outcome {
    let mut failures = Vec::new();
    let mut worst: Vec<(Variant, f64)> = Variant::ALL.iter().map(|&v| (v, 0.0)).collect();
    let mut record = |v: Variant, volume: f64, lb: f64, tag: String| {
        let ratio = volume / lb;
        let slot = worst.iter_mut().find(|(w, _)| *w == v).unwrap();
        slot.1 = f64::max(slot.1, ratio);
        if volume > v.published_ratio() * lb * (1.0 + 1e-9) {
            failures.push(tag);
        }
    };
    for seed in 0..200u64 {
        let n = 1 + (seed as usize * 53 % 500);
        let boxes = Instance::Boxes(box_instance(seed, n));
        for v in [Variant::Translation, Variant::RigidBoxes, Variant::ConvexBoxes] {
            let r = slab::pack(&boxes, v, None).unwrap();
            let lb = lower_bound(&boxes, v).unwrap().lower_bound;
            record(v, r.volume, lb, format!("{} seed {seed}", v.tag()));
        }
        let rigid = slab::pack(&boxes, Variant::RigidBoxes, None).unwrap();
        let convex = slab::convex_container_certificate(&rigid, &boxes).unwrap();
        record(Variant::ConvexBoxes, convex.volume, convex.lower_bound.lower_bound, format!("convex cert seed {seed}"));

        let polys = Instance::Polyhedra(random_hulls(1 + seed as usize % 60, seed, 0.1, 2.0, 10).unwrap());
        for v in [Variant::RigidPolyhedra, Variant::ConvexPolyhedra] {
            let r = slab::pack(&polys, v, None).unwrap();
            let lb = lower_bound(&polys, v).unwrap().lower_bound;
            record(v, r.volume, lb, format!("{} seed {seed}", v.tag()));
        }
        let rigid = slab::pack(&polys, Variant::RigidPolyhedra, None).unwrap();
        let convex = slab::convex_container_certificate(&rigid, &polys).unwrap();
        record(Variant::ConvexPolyhedra, convex.volume, convex.lower_bound.lower_bound, format!("convex cert seed {seed}"));
    }
    let summary: Vec<String> = worst.iter().map(|(v, r)| format!("{}<={:.3}/{}", v.tag(), r, v.published_ratio())).collect();
    outcome(
        failures.is_empty(),
        format!("200 instances per variant, {} failures {:?}; max V/LB {}", failures.len(), failures.first(), summary.join(" ")),
    )
}

fn exact_optimum_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let params = slab::SlabParams::tuned(Variant::Translation);
    let mut worst = 0.0f64;
    let mut failures = 0;
    for _ in 0..200 {
        let n = rng.gen_range(1..=3);
        let boxes: Vec<BoxItem> = (0..n)
            .map(|id| BoxItem::new(id, rng.gen_range(0.1..4.0), rng.gen_range(0.1..4.0), rng.gen_range(0.1..4.0)))
            .collect();
        let packed = slab::pack_boxes_translation(&boxes, params).unwrap().volume;
        let opt = brute_force_optimal_translation(&boxes).unwrap();
        worst = worst.max(packed / opt);
        if packed > 11.5416 * opt {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("200 instances with n<=3, {failures} above 11.5416 x optimum, max ratio {worst:.4}"))
}

fn lemma3_factor() -> Outcome {
    let mut worst = 0.0f64;
    let mut failures = 0;
    let hulls = random_hulls(200, 6, 0.05, 3.0, 24).unwrap();
    for item in &hulls {
        let hull = convex_hull(&item.vertices).unwrap();
        let obb = lemma3_bounding_box(&hull).unwrap();
        let ratio = obb.volume() / hull.volume();
        worst = worst.max(ratio);
        let tol = 1e-9 * hull.scale().max(1.0);
        let contained = hull.vertices().iter().all(|p| obb.contains(p, tol));
        if ratio > 6.0 * (1.0 + 1e-9) || !contained {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("200 hulls, {failures} failures, max box/hull volume {worst:.4} (limit 6)"))
}

fn segment_bounds() -> Outcome {
    let hulls = random_hulls(50, 7, 0.05, 3.0, 16).unwrap();
    let (mut seg, mut width) = (0, 0);
    let (mut min_seg, mut min_width) = (f64::INFINITY, f64::INFINITY);
    for (k, item) in hulls.iter().enumerate() {
        let hull = convex_hull(&item.vertices).unwrap();
        let r = segment_bound_checks(&hull, 100, 1000 + k as u64).unwrap();
        seg += r.segment_violations;
        width += r.width_violations;
        min_seg = min_seg.min(r.min_segment_ratio);
        min_width = min_width.min(r.min_width_ratio);
    }
    outcome(
        seg == 0 && width == 0,
        format!(
            "50 hulls x 100 directions, segment violations {seg} (min ratio {min_seg:.3}), width violations {width} (min ratio {min_width:.3})"
        ),
    )
}

/// Number of grid levels per axis in units where the largest side is 1:
/// `ceil(log_b(sum / max)) + 1` with `b = 1 / (1 - eps')`.
fn level_count(sum: f64, max: f64, eps_prime: f64) -> usize {
    let b = 1.0 / (1.0 - eps_prime);
    ((sum / max).ln() / b.ln()).ceil() as usize + 1
}

fn grid_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut count_failures = Vec::new();
    let mut min_failures = 0;
    let mut runs = 0;
    for setting in 0..50u64 {
        let eps = [1.0, 0.5, 0.25][setting as usize % 3];
        let n = rng.gen_range(1..=8);
        let boxes = box_instance(100 + setting, n);
        let spec = GridSpec::with_default_alpha(eps).unwrap();
        let ep = spec.eps_prime();
        let w_sum: f64 = boxes.iter().map(|b| b.w).sum();
        let d_sum: f64 = boxes.iter().map(|b| b.d).sum();
        let w_max = boxes.iter().map(|b| b.w).fold(0.0, f64::max);
        let d_max = boxes.iter().map(|b| b.d).fold(0.0, f64::max);
        let expected = level_count(w_sum, w_max, ep) * level_count(d_sum, d_max, ep);
        let actual = candidate_set(&boxes, &spec).unwrap().len();
        if actual != expected {
            count_failures.push((setting, actual, expected));
        }

        let result = omcop_translation(&boxes, &spec, &DefaultStripPacker::default()).unwrap();
        runs += 1;
        let best = result.audit.iter().filter_map(|a| a.volume()).fold(f64::INFINITY, f64::min);
        let all_logged = result.audit.len() == actual;
        if result.volume != best || !all_logged {
            min_failures += 1;
        }
    }
    outcome(
        count_failures.is_empty() && min_failures == 0,
        format!(
            "50 settings, {} count mismatches {:?}; {runs} basesearch runs, {min_failures} not minimal over audit log",
            count_failures.len(),
            count_failures.first()
        ),
    )
}

fn rigid_motion_invariance() -> Outcome {
    let mut worst = 0.0f64;
    let mut failures = 0;
    for seed in 0..50u64 {
        let polys = random_hulls(1 + seed as usize % 30, 900 + seed, 0.1, 2.0, 14).unwrap();
        let rot = random_rotation_from_seed(seed).to_rotation_matrix().into_inner();
        let shift = Vector3::new(seed as f64 * 1.7 - 20.0, 3.5, -(seed as f64) * 0.4);
        let moved: Vec<PolyItem> = polys
            .iter()
            .map(|p| PolyItem { id: p.id, vertices: p.vertices.iter().map(|v| Point3::from(rot * v.coords + shift)).collect() })
            .collect();
        let a = slab::pack(&Instance::Polyhedra(polys), Variant::RigidPolyhedra, None).unwrap().volume;
        let b = slab::pack(&Instance::Polyhedra(moved), Variant::RigidPolyhedra, None).unwrap().volume;
        let rel = (a - b).abs() / a;
        worst = worst.max(rel);
        if rel > 1e-6 {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("50 instances, {failures} above 1e-6, max relative change {worst:.2e}"))
}

fn median_pack_time(boxes: &[BoxItem]) -> Duration {
    let params = slab::SlabParams::tuned(Variant::Translation);
    let mut times: Vec<Duration> = (0..7)
        .map(|_| {
            let start = Instant::now();
            std::hint::black_box(slab::pack_boxes_translation(boxes, params).unwrap());
            start.elapsed()
        })
        .collect();
    times.sort();
    times[times.len() / 2]
}

fn scaling_sanity() -> Outcome {
    let small = uniform_boxes(10_000, 10, 0.1, 3.0).unwrap();
    let large = uniform_boxes(20_000, 11, 0.1, 3.0).unwrap();
    median_pack_time(&small);
    let (t1, t2) = (median_pack_time(&small), median_pack_time(&large));
    let ratio = t2.as_secs_f64() / t1.as_secs_f64();
    outcome(ratio <= 2.5, format!("n=1e4 {t1:.2?}, n=2e4 {t2:.2?}, ratio {ratio:.2} (limit 2.5)"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("strip packing area guarantee", strip_area_guarantee),
        ("validity of all packings", validity_suite),
        ("ratio constants", constant_reproduction),
        ("volume certificates", certificate_suite),
        ("small instances against exact optimum", exact_optimum_check),
        ("bounding box factor 6", lemma3_factor),
        ("chord and width bounds", segment_bounds),
        ("candidate grid and minimum selection", grid_correctness),
        ("rigid-motion invariance", rigid_motion_invariance),
        ("slab packer scaling", scaling_sanity),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {status}: {name} ({}) [{:.1?}]", k + 1, o.detail, start.elapsed());
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
