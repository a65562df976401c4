use boxpress::geom3::canonicalize_box;
use boxpress::slab::{self, class_height, height_class, SlabParams};
use boxpress::strip2d::{occupied_area_bound_check, pack_strip_2d, substrip_width, width_class, RectItem};
use boxpress::verify::{lower_bound, validate_packing};
use boxpress::{BoxItem, Instance, ItemId, Variant};
use nalgebra::Matrix3;
use proptest::prelude::*;

fn rects(max_len: usize) -> impl Strategy<Value = (f64, Vec<RectItem>)> {
    (0.5f64..40.0).prop_flat_map(move |width| {
        let item = (1e-3f64..=1.0, 1e-2f64..10.0);
        proptest::collection::vec(item, 1..max_len).prop_map(move |v| {
            let items = v
                .into_iter()
                .enumerate()
                .map(|(i, (fw, h))| RectItem { id: ItemId(i as u64), w: fw * width, h })
                .collect();
            (width, items)
        })
    })
}

fn boxes(max_len: usize) -> impl Strategy<Value = Vec<BoxItem>> {
    proptest::collection::vec((0.01f64..5.0, 0.01f64..5.0, 0.01f64..5.0), 1..max_len).prop_map(|v| {
        v.into_iter().enumerate().map(|(i, (h, w, d))| BoxItem::new(i as u64, h, w, d)).collect()
    })
}

proptest! {
    #[test]
    fn strip_packing_is_disjoint_and_inside((width, items) in rects(80)) {
        let p = pack_strip_2d(&items, width).unwrap();
        let tol = 1e-9 * width.max(p.height);
        prop_assert_eq!(p.placements.len(), items.len());
        for r in &p.placements {
            prop_assert!(r.x >= -tol && r.x + r.w <= width + tol);
            prop_assert!(r.y >= -tol && r.y + r.h <= p.height + tol);
        }
        for (i, a) in p.placements.iter().enumerate() {
            for b in &p.placements[i + 1..] {
                let ox = a.x.max(b.x) < (a.x + a.w).min(b.x + b.w) - tol;
                let oy = a.y.max(b.y) < (a.y + a.h).min(b.y + b.h) - tol;
                prop_assert!(!(ox && oy), "{:?} overlaps {:?}", a, b);
            }
        }
        let h_max = items.iter().map(|r| r.h).fold(0.0, f64::max);
        prop_assert!(occupied_area_bound_check(&p, h_max));
    }

    #[test]
    fn items_fit_their_substrip(w in 1e-6f64..=1.0, width in 0.1f64..100.0) {
        let w = w * width;
        let j = width_class(w, width);
        prop_assert!(w <= substrip_width(width, j) * (1.0 + 1e-12));
        prop_assert!(w > substrip_width(width, j + 1) * (1.0 - 1e-12));
    }

    #[test]
    fn height_class_brackets_height(frac in 1e-6f64..=1.0, eps in 0.05f64..0.95) {
        let j = height_class(frac, 1.0, eps);
        prop_assert!(frac <= class_height(1.0, eps, j) * (1.0 + 1e-12));
        prop_assert!(frac > class_height(1.0, eps, j + 1) * (1.0 - 1e-12));
    }

    #[test]
    fn canonical_box_sorts_with_a_proper_rotation(h in 0.01f64..10.0, w in 0.01f64..10.0, d in 0.01f64..10.0) {
        let c = canonicalize_box(ItemId(0), [h, w, d]).unwrap();
        prop_assert!(c.dims.h >= c.dims.w && c.dims.w >= c.dims.d);
        let r: Matrix3<f64> = c.rotation;
        prop_assert!((r.transpose() * r - Matrix3::identity()).norm() < 1e-12);
        prop_assert!((r.determinant() - 1.0).abs() < 1e-12);
        // Extents of the rotated box [0,w]x[0,d]x[0,h] along x, y, z.
        let ext = r.abs() * nalgebra::Vector3::new(w, d, h);
        prop_assert!((ext - nalgebra::Vector3::new(c.dims.w, c.dims.d, c.dims.h)).norm() < 1e-12);
    }

    #[test]
    fn lower_bound_never_decreases_when_adding_items(items in boxes(20), extra in (0.01f64..5.0, 0.01f64..5.0, 0.01f64..5.0)) {
        let mut more = items.clone();
        more.push(BoxItem::new(items.len() as u64, extra.0, extra.1, extra.2));
        for v in [Variant::Translation, Variant::RigidBoxes, Variant::ConvexBoxes] {
            let a = lower_bound(&Instance::Boxes(items.clone()), v).unwrap().lower_bound;
            let b = lower_bound(&Instance::Boxes(more.clone()), v).unwrap().lower_bound;
            prop_assert!(b >= a);
        }
    }

    #[test]
    fn slab_packings_validate_and_certify(items in boxes(60), c in 1.1f64..4.0, eps in 0.1f64..0.9) {
        let inst = Instance::Boxes(items);
        let params = SlabParams::new(c, eps).unwrap();
        for v in [Variant::Translation, Variant::RigidBoxes] {
            let r = slab::pack(&inst, v, Some(params)).unwrap();
            prop_assert!(validate_packing(&r, &inst).unwrap().passed());
            prop_assert!(r.certificate.pass, "{:?}", r.certificate);
        }
    }
}
