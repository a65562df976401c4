//! Packing rectangles into a strip of fixed width by width classes.
//!
//! Rectangles are split into classes `S_j = { r : W/2^(j-1) >= w > W/2^j }`.
//! Class 1 is stacked in the full strip; before each later class every
//! substrip is halved, and each rectangle goes to the lowest substrip of its
//! class (leftmost on ties). Substrips are only materialized when used: the
//! pool stores maximal runs of equal-height substrips keyed by `(top, x)`.

use std::collections::BTreeMap;

use ordered_float::OrderedFloat;

use crate::{Error, ItemId, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectItem {
    pub id: ItemId,
    pub w: f64,
    pub h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlacedRect {
    pub id: ItemId,
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StripPacking2D {
    pub width: f64,
    pub placements: Vec<PlacedRect>,
    pub height: f64,
}

impl StripPacking2D {
    pub fn occupied_area(&self) -> f64 {
        self.placements.iter().map(|p| p.w * p.h).sum()
    }
}

/// Width class of `w` in a strip of width `strip`, starting at 1.
pub fn width_class(w: f64, strip: f64) -> u32 {
    let substrip = |j: u32| substrip_width(strip, j);
    let mut j = (1.0 + (strip / w).log2().floor()).max(1.0) as u32;
    while j > 1 && w > substrip(j) {
        j -= 1;
    }
    while w <= substrip(j + 1) {
        j += 1;
    }
    j
}

/// Width `strip / 2^(class-1)` of the substrips serving a class; exact in
/// binary floating point.
pub fn substrip_width(strip: f64, class: u32) -> f64 {
    strip / 2f64.powi(class as i32 - 1)
}

pub fn pack_strip_2d(items: &[RectItem], strip_width: f64) -> Result<StripPacking2D> {
    if !(strip_width > 0.0 && strip_width.is_finite()) {
        return Err(Error::InvalidParameter(format!("strip width {strip_width}")));
    }
    for it in items {
        for value in [it.w, it.h] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::NonPositiveDimension { id: it.id, value });
            }
        }
        if it.w > strip_width {
            return Err(Error::ItemTooWide { id: it.id, width: it.w, strip: strip_width });
        }
    }

    let mut order: Vec<(u32, &RectItem)> = items.iter().map(|it| (width_class(it.w, strip_width), it)).collect();
    order.sort_by(|(_, a), (_, b)| b.w.total_cmp(&a.w).then(b.h.total_cmp(&a.h)).then(a.id.cmp(&b.id)));

    // (top, x) -> width of a run of equal-height substrips starting at x.
    let mut pool: BTreeMap<(OrderedFloat<f64>, OrderedFloat<f64>), f64> = BTreeMap::new();
    pool.insert((OrderedFloat(0.0), OrderedFloat(0.0)), strip_width);

    let mut placements = Vec::with_capacity(items.len());
    let mut height = 0.0f64;
    for (class, it) in order {
        let substrip = substrip_width(strip_width, class);
        let ((top, x), run) = pool.pop_first().expect("pool always covers the strip");
        if run - substrip > 0.5 * substrip {
            pool.insert((top, OrderedFloat(x.0 + substrip)), run - substrip);
        }
        let new_top = top.0 + it.h;
        pool.insert((OrderedFloat(new_top), x), substrip);
        placements.push(PlacedRect { id: it.id, x: x.0, y: top.0, w: it.w, h: it.h });
        height = height.max(new_top);
    }
    Ok(StripPacking2D { width: strip_width, placements, height })
}

/// True iff the packing fills at least half of the strip below
/// `height - h_max`, where `h_max` bounds the tallest rectangle.
pub fn occupied_area_bound_check(result: &StripPacking2D, h_max: f64) -> bool {
    let tol = 1e-9 * (result.width * result.height).max(1.0);
    result.occupied_area() >= (result.height - h_max) * result.width / 2.0 - tol
}
