//! Medium rectangles: the height band goes to a full-width shelf box, the
//! rest to a narrow transposed shelf box.

use crate::classify::ClassParams;
use crate::error::Result;
use crate::ratio::{big, cmp_int, floor_to_i64};
use crate::shelf::{nfdh_strip, ShelfLayout};
use crate::geometry::Rect;

/// Layouts for the two medium boxes. Coordinates are box-relative.
#[derive(Debug, Clone)]
pub struct MediumPacking {
    /// Height-band mediums, shelves over the full strip width.
    pub hor_layout: ShelfLayout,
    pub hor_rects: Vec<Rect>,
    /// Achieved height of the horizontal medium box.
    pub hor_height: i64,
    /// Target height `3 * eps * OPT` (exceeding it is reported upstream).
    pub hor_target: i64,
    /// Remaining mediums, stacked in columns (transposed shelves).
    pub ver_layout: ShelfLayout,
    pub ver_rects: Vec<Rect>,
    /// Achieved width of the vertical medium box.
    pub ver_width: i64,
    /// Target width `gamma * W / 3`.
    pub ver_target: i64,
}

impl MediumPacking {
    pub fn shelf_counts(&self) -> (usize, usize) {
        (self.hor_layout.shelves.len(), self.ver_layout.shelves.len())
    }

    pub fn is_empty(&self) -> bool {
        self.hor_rects.is_empty() && self.ver_rects.is_empty()
    }
}

/// Packs the medium rectangles into the two auxiliary boxes: height-band
/// mediums via shelves across the strip, the rest via transposed shelves in
/// a narrow column.
pub fn pack_medium(mediums: &[Rect], width: i64, params: &ClassParams) -> Result<MediumPacking> {
    let mu_h_opt = params.threshold_mu_h_opt();
    let delta_h_opt = params.threshold_delta_h_opt();
    let in_height_band = |r: &Rect| {
        cmp_int(r.h, &mu_h_opt) == std::cmp::Ordering::Greater
            && cmp_int(r.h, &delta_h_opt) == std::cmp::Ordering::Less
    };
    let (hor_rects, ver_rects): (Vec<Rect>, Vec<Rect>) =
        mediums.iter().partition(|r| in_height_band(r));

    let (_, hor_layout) = nfdh_strip(&hor_rects, width)?;
    let hor_height = hor_layout.used_extent();
    let hor_target = crate::ratio::ceil_to_i64(&(big(3) * &params.eps * big(params.opt)));

    // transpose: pack the remaining mediums into columns over a virtual
    // strip of extent alpha*OPT
    let alpha_opt = floor_to_i64(&params.threshold_alpha_opt());
    let swapped: Vec<Rect> = ver_rects
        .iter()
        .map(|r| Rect {
            id: r.id,
            w: r.h,
            h: r.w,
        })
        .collect();
    let (_, v) = nfdh_strip(&swapped, alpha_opt.max(1))?;
    let ver_layout = ShelfLayout {
        shelves: v
            .shelves
            .into_iter()
            .map(|s| crate::shelf::Shelf {
                base: s.base,
                thickness: s.thickness,
                members: s
                    .members
                    .into_iter()
                    .map(|p| crate::geometry::Placement::new(p.rect_id, p.y, p.x))
                    .collect(),
            })
            .collect(),
        leftover: Vec::new(),
        transposed: true,
    };
    let ver_width = ver_layout.used_extent();
    let ver_target = floor_to_i64(&(&params.gamma * big(width) / big(3)));

    Ok(MediumPacking {
        hor_layout,
        hor_rects,
        hor_height,
        hor_target,
        ver_layout,
        ver_rects,
        ver_width,
        ver_target,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{verify_packing, Instance, Packing};
    use crate::ratio::rat;

    fn params(opt: i64) -> ClassParams {
        ClassParams::new(rat(1, 4), rat(1, 3), 2, rat(1, 4), rat(1, 16), opt, 1).unwrap()
    }

    #[test]
    fn empty_medium_set_is_a_noop() {
        let m = pack_medium(&[], 100, &params(96)).unwrap();
        assert!(m.is_empty());
        assert_eq!(m.hor_height, 0);
        assert_eq!(m.ver_width, 0);
    }

    #[test]
    fn height_band_mediums_fit_the_horizontal_target() {
        let p = params(96);
        // band is (6, 24); a light load stays under 3*eps*OPT = 72
        let rects: Vec<Rect> = (0..6).map(|i| Rect::new(i, 20, 10 + i as i64)).collect();
        let m = pack_medium(&rects, 100, &p).unwrap();
        assert!(m.ver_rects.is_empty());
        assert_eq!(m.hor_rects.len(), 6);
        assert!(m.hor_height <= m.hor_target, "{} > {}", m.hor_height, m.hor_target);
        // shelf count <= 3*eps/mu_h = 12
        assert!(m.hor_layout.shelves.len() <= 12);
    }

    #[test]
    fn width_band_mediums_stack_in_columns() {
        let p = params(96);
        // w in (mu_w*W, delta_w*W) with W = 1536: (2, 8); h <= alpha*OPT = 32
        let rects: Vec<Rect> = (0..8).map(|i| Rect::new(i, 3 + (i as i64 % 4), 30)).collect();
        let m = pack_medium(&rects, 1536, &p).unwrap();
        assert!(m.hor_rects.is_empty());
        assert_eq!(m.ver_rects.len(), 8);
        // feasibility of the transposed layout inside its box
        let inst = Instance::new(m.ver_width.max(1), rects, false).unwrap();
        let packing = Packing::new(m.ver_layout.placements());
        let rep = verify_packing(&inst, &packing);
        assert!(rep.ok(), "{:?}", rep.violations);
        assert!(rep.height <= 32);
    }
}
