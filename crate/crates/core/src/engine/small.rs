//! Small rectangles: fill the grid of free cells left by the containers,
//! overflow into one extra full-width box.

use crate::classify::ClassParams;
use crate::error::Result;
use crate::geometry::{Container, Placement, Rect};
use crate::instances::Region;
use crate::ratio::cmp_int;
use crate::shelf::{nfdh_into_box, nfdh_strip, ShelfLayout};

/// Where the small rectangles ended up.
#[derive(Debug, Clone)]
pub struct SmallPacking {
    /// Placements inside the free grid cells (absolute coordinates).
    pub grid_placements: Vec<Placement>,
    /// The grid cells that were considered usable.
    pub usable_regions: Vec<Region>,
    /// Total number of grid cells the container sides induced.
    pub region_count: usize,
    /// Overflow layout for the extra box (box-relative coordinates).
    pub overflow_layout: ShelfLayout,
    pub overflow_rects: Vec<Rect>,
    /// Height the extra box needs.
    pub overflow_height: i64,
}

/// Extends the sides of the containers inside `[0, width] x [0, opt_prime]`
/// into a grid, fills every free cell that is at least `mu_w*W` wide and
/// `mu_h*OPT` high with shelves of small rectangles, and piles the
/// remainder into the extra box.
pub fn pack_small(
    smalls: &[Rect],
    containers: &[Container],
    width: i64,
    opt_prime: i64,
    params: &ClassParams,
) -> Result<SmallPacking> {
    let mut xs: Vec<i64> = vec![0, width];
    let mut ys: Vec<i64> = vec![0, opt_prime];
    for c in containers {
        xs.extend([c.x, c.x + c.w]);
        ys.extend([c.y, c.y + c.h]);
    }
    xs.sort_unstable();
    xs.dedup();
    xs.retain(|&x| (0..=width).contains(&x));
    ys.sort_unstable();
    ys.dedup();
    ys.retain(|&y| (0..=opt_prime).contains(&y));

    let covered = |x: i64, y: i64| {
        containers
            .iter()
            .any(|c| x >= c.x && x < c.x + c.w && y >= c.y && y < c.y + c.h)
    };

    let mu_w_w = params.threshold_mu_w(width);
    let mu_h_opt = params.threshold_mu_h_opt();
    let mut region_count = 0;
    let mut usable: Vec<Region> = Vec::new();
    for wy in ys.windows(2) {
        for wx in xs.windows(2) {
            let (x, y, w, h) = (wx[0], wy[0], wx[1] - wx[0], wy[1] - wy[0]);
            if w <= 0 || h <= 0 || covered(x, y) {
                continue;
            }
            region_count += 1;
            let wide_enough = cmp_int(w, &mu_w_w) != std::cmp::Ordering::Less;
            let high_enough = cmp_int(h, &mu_h_opt) != std::cmp::Ordering::Less;
            if wide_enough && high_enough {
                usable.push(Region::new(x, y, w, h));
            }
        }
    }
    usable.sort_by_key(|r| (r.y, r.x));

    let mut pool: Vec<Rect> = smalls.to_vec();
    let mut grid_placements = Vec::new();
    for cell in &usable {
        if pool.is_empty() {
            break;
        }
        let (candidates, rest): (Vec<Rect>, Vec<Rect>) = pool
            .into_iter()
            .partition(|r| r.w <= cell.w && r.h <= cell.h);
        let layout = nfdh_into_box(&candidates, cell.w, cell.h)?;
        for shelf in &layout.shelves {
            for p in &shelf.members {
                grid_placements.push(Placement::new(p.rect_id, cell.x + p.x, cell.y + p.y));
            }
        }
        pool = layout.leftover;
        pool.extend(rest);
    }

    let overflow_rects = pool;
    let (_, overflow_layout) = nfdh_strip(&overflow_rects, width)?;
    let overflow_height = overflow_layout.used_extent();

    Ok(SmallPacking {
        grid_placements,
        usable_regions: usable,
        region_count,
        overflow_layout,
        overflow_rects,
        overflow_height,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Orientation;
    use crate::ratio::rat;

    fn params(opt: i64) -> ClassParams {
        // generous mu thresholds so desk-scale cells qualify
        ClassParams::new(rat(1, 4), rat(1, 3), 2, rat(1, 4), rat(3, 16), opt, 1).unwrap()
    }

    #[test]
    fn no_smalls_is_a_noop() {
        let p = params(96);
        let out = pack_small(&[], &[], 100, 120, &p).unwrap();
        assert!(out.grid_placements.is_empty());
        assert_eq!(out.overflow_height, 0);
        assert_eq!(out.region_count, 1);
    }

    #[test]
    fn grid_cells_absorb_smalls_when_area_allows() {
        let p = params(96);
        // one container covering the left half; free cell 60x120 remains
        let containers = vec![Container::new(0, 0, 60, 120, Orientation::Vertical)];
        let smalls: Vec<Rect> = (0..40).map(|i| Rect::new(i, 3, 2)).collect();
        let out = pack_small(&smalls, &containers, 120, 120, &p).unwrap();
        assert_eq!(out.region_count, 1);
        assert_eq!(out.grid_placements.len(), 40);
        assert!(out.overflow_rects.is_empty());
        // all placements inside the free cell
        for pl in &out.grid_placements {
            assert!(pl.x >= 60 && pl.x + 3 <= 120);
            assert!(pl.y >= 0 && pl.y + 2 <= 120);
        }
    }

    #[test]
    fn overflow_goes_to_the_extra_box() {
        let p = params(96);
        // free cells too small to take anything: container leaves a sliver
        let containers = vec![Container::new(0, 0, 119, 120, Orientation::Vertical)];
        let smalls: Vec<Rect> = (0..5).map(|i| Rect::new(i, 3, 2)).collect();
        let out = pack_small(&smalls, &containers, 120, 120, &p).unwrap();
        assert!(out.grid_placements.is_empty());
        assert_eq!(out.overflow_rects.len(), 5);
        assert!(out.overflow_height > 0);
    }
}
