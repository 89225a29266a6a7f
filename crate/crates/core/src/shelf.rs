//! NFDH and FFDH shelf packers, as strip packers and as into-box packers.
//!
//! Sorting ties (equal heights) are broken by descending width, then
//! ascending id, so every layout is deterministic.

use crate::error::{Error, Result};
use crate::geometry::{Container, Orientation, Packing, Placement, Rect};

/// One shelf: a band `[base, base + thickness)` along the stacking axis.
#[derive(Debug, Clone)]
pub struct Shelf {
    pub base: i64,
    pub thickness: i64,
    pub members: Vec<Placement>,
}

/// Shelves plus whatever did not fit (into-box mode only).
#[derive(Debug, Clone)]
pub struct ShelfLayout {
    pub shelves: Vec<Shelf>,
    pub leftover: Vec<Rect>,
    /// Shelves stack horizontally (columns) instead of vertically.
    pub transposed: bool,
}

impl ShelfLayout {
    pub fn placements(&self) -> Vec<Placement> {
        self.shelves
            .iter()
            .flat_map(|s| s.members.iter().copied())
            .collect()
    }

    pub fn packed_area(&self, rects: &[Rect]) -> i64 {
        self.shelves
            .iter()
            .flat_map(|s| &s.members)
            .map(|p| rects[p.rect_id].area())
            .sum()
    }

    /// Total extent along the stacking axis (packing height, or width when
    /// transposed).
    pub fn used_extent(&self) -> i64 {
        self.shelves
            .last()
            .map(|s| s.base + s.thickness)
            .unwrap_or(0)
    }

    /// Each shelf as a container over the given cross extent. Normal shelves
    /// are vertical containers, transposed shelves horizontal ones.
    pub fn shelf_containers(&self, cross_extent: i64) -> Vec<Container> {
        self.shelves
            .iter()
            .map(|s| {
                if self.transposed {
                    Container::new(s.base, 0, s.thickness, cross_extent, Orientation::Horizontal)
                } else {
                    Container::new(0, s.base, cross_extent, s.thickness, Orientation::Vertical)
                }
            })
            .collect()
    }
}

fn nfdh_order(rects: &[Rect]) -> Vec<Rect> {
    let mut sorted = rects.to_vec();
    sorted.sort_by(|a, b| {
        b.h.cmp(&a.h)
            .then_with(|| b.w.cmp(&a.w))
            .then_with(|| a.id.cmp(&b.id))
    });
    sorted
}

/// Next-Fit-Decreasing-Height on an unbounded strip of the given width.
///
/// The achieved height is at most `h_max + 2 * area / width`.
pub fn nfdh_strip(rects: &[Rect], width: i64) -> Result<(Packing, ShelfLayout)> {
    for r in rects {
        if r.w > width {
            return Err(Error::RectTooWide {
                id: r.id,
                w: r.w,
                strip: width,
            });
        }
    }
    let sorted = nfdh_order(rects);
    let mut shelves: Vec<Shelf> = Vec::new();
    let mut y = 0;
    let mut cursor = width; // force a first shelf
    for r in &sorted {
        if cursor + r.w > width {
            if let Some(last) = shelves.last() {
                y = last.base + last.thickness;
            }
            shelves.push(Shelf {
                base: y,
                thickness: r.h,
                members: Vec::new(),
            });
            cursor = 0;
        }
        let shelf = shelves.last_mut().unwrap();
        shelf.members.push(Placement::new(r.id, cursor, shelf.base));
        cursor += r.w;
    }
    let layout = ShelfLayout {
        shelves,
        leftover: Vec::new(),
        transposed: false,
    };
    Ok((Packing::new(layout.placements()), layout))
}

/// NFDH into a fixed box: packs a prefix in NFDH order and stops at the
/// first shelf that would overflow the box height. When the leftover is
/// non-empty the packed area is at least `(box_w - w_max) * (box_h - h_max)`.
pub fn nfdh_into_box(rects: &[Rect], box_w: i64, box_h: i64) -> Result<ShelfLayout> {
    for r in rects {
        if r.w > box_w || r.h > box_h {
            return Err(Error::Precondition(format!(
                "rect {} ({}x{}) exceeds the {}x{} box",
                r.id, r.w, r.h, box_w, box_h
            )));
        }
    }
    let sorted = nfdh_order(rects);
    let mut shelves: Vec<Shelf> = Vec::new();
    let mut leftover = Vec::new();
    let mut y = 0;
    let mut cursor = box_w; // force a first shelf
    let mut stopped = false;
    for r in &sorted {
        if stopped {
            leftover.push(*r);
            continue;
        }
        if cursor + r.w > box_w {
            if let Some(last) = shelves.last() {
                y = last.base + last.thickness;
            }
            if y + r.h > box_h {
                stopped = true;
                leftover.push(*r);
                continue;
            }
            shelves.push(Shelf {
                base: y,
                thickness: r.h,
                members: Vec::new(),
            });
            cursor = 0;
        }
        let shelf = shelves.last_mut().unwrap();
        shelf.members.push(Placement::new(r.id, cursor, shelf.base));
        cursor += r.w;
    }
    Ok(ShelfLayout {
        shelves,
        leftover,
        transposed: false,
    })
}

/// NFDH into a box rotated by 90 degrees: shelves become columns stacked
/// left to right and members pile bottom to top inside each column. Rect
/// data is never mutated; only the packing plane is transposed.
pub fn nfdh_into_box_transposed(rects: &[Rect], box_w: i64, box_h: i64) -> Result<ShelfLayout> {
    let swapped: Vec<Rect> = rects
        .iter()
        .map(|r| Rect {
            id: r.id,
            w: r.h,
            h: r.w,
        })
        .collect();
    let layout = nfdh_into_box(&swapped, box_h, box_w)?;
    let shelves = layout
        .shelves
        .into_iter()
        .map(|s| Shelf {
            base: s.base,
            thickness: s.thickness,
            members: s
                .members
                .into_iter()
                .map(|p| Placement::new(p.rect_id, p.y, p.x))
                .collect(),
        })
        .collect();
    let leftover = layout
        .leftover
        .into_iter()
        .map(|r| Rect {
            id: r.id,
            w: r.h,
            h: r.w,
        })
        .collect();
    Ok(ShelfLayout {
        shelves,
        leftover,
        transposed: true,
    })
}

/// First-Fit-Decreasing-Height: like NFDH but each rectangle goes on the
/// first open shelf with enough residual width.
pub fn ffdh_strip(rects: &[Rect], width: i64) -> Result<Packing> {
    for r in rects {
        if r.w > width {
            return Err(Error::RectTooWide {
                id: r.id,
                w: r.w,
                strip: width,
            });
        }
    }
    let sorted = nfdh_order(rects);
    // (base, thickness, cursor)
    let mut shelves: Vec<(i64, i64, i64)> = Vec::new();
    let mut placements = Vec::new();
    for r in &sorted {
        match shelves.iter_mut().find(|(_, _, cursor)| cursor + r.w <= width) {
            Some((base, _, cursor)) => {
                placements.push(Placement::new(r.id, *cursor, *base));
                *cursor += r.w;
            }
            None => {
                let y = shelves.last().map(|(b, t, _)| b + t).unwrap_or(0);
                shelves.push((y, r.h, r.w));
                placements.push(Placement::new(r.id, 0, y));
            }
        }
    }
    Ok(Packing::new(placements))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{verify_container_discipline, verify_packing, Instance};

    fn rects(dims: &[(i64, i64)]) -> Vec<Rect> {
        dims.iter()
            .enumerate()
            .map(|(i, &(w, h))| Rect::new(i, w, h))
            .collect()
    }

    #[test]
    fn nfdh_hand_simulated_layout() {
        let rs = rects(&[(6, 5), (5, 4), (4, 4), (7, 3)]);
        let (packing, layout) = nfdh_strip(&rs, 10).unwrap();
        let inst = Instance::new(10, rs, false).unwrap();
        let rep = verify_packing(&inst, &packing);
        assert!(rep.ok());
        assert_eq!(rep.height, 12);
        let bases: Vec<(i64, i64)> = layout
            .shelves
            .iter()
            .map(|s| (s.base, s.thickness))
            .collect();
        assert_eq!(bases, vec![(0, 5), (5, 4), (9, 3)]);
        assert_eq!(layout.shelves[1].members.len(), 2);
        // every shelf is a vertical container
        for (shelf, c) in layout.shelves.iter().zip(layout.shelf_containers(10)) {
            let members: Vec<_> = shelf.members.iter().map(|p| p.rect_id).collect();
            assert!(verify_container_discipline(&inst, &packing, &c, &members).is_ok());
        }
    }

    #[test]
    fn nfdh_single_rect_hits_h_max() {
        let rs = rects(&[(3, 7)]);
        let (packing, _) = nfdh_strip(&rs, 10).unwrap();
        let inst = Instance::new(10, rs, false).unwrap();
        assert_eq!(packing.height(&inst), 7);
    }

    #[test]
    fn nfdh_width_saturated_one_per_shelf() {
        let rs = rects(&[(10, 1); 6]);
        let (packing, layout) = nfdh_strip(&rs, 10).unwrap();
        let inst = Instance::new(10, rs, false).unwrap();
        assert_eq!(packing.height(&inst), 6);
        assert_eq!(layout.shelves.len(), 6);
    }

    #[test]
    fn nfdh_rejects_overwide_rect() {
        let rs = rects(&[(11, 1)]);
        assert!(matches!(
            nfdh_strip(&rs, 10),
            Err(Error::RectTooWide { id: 0, .. })
        ));
    }

    #[test]
    fn into_box_unit_squares() {
        let rs = rects(&[(1, 1); 100]);
        let layout = nfdh_into_box(&rs, 5, 5).unwrap();
        let packed: usize = layout.shelves.iter().map(|s| s.members.len()).sum();
        assert_eq!(packed, 25);
        assert_eq!(layout.leftover.len(), 75);
        assert!(layout.packed_area(&rs) >= (5 - 1) * (5 - 1));
    }

    #[test]
    fn into_box_exact_fit_has_no_leftover() {
        let rs = rects(&[(5, 5)]);
        let layout = nfdh_into_box(&rs, 5, 5).unwrap();
        assert!(layout.leftover.is_empty());
        assert_eq!(layout.shelves.len(), 1);
    }

    #[test]
    fn into_box_two_by_two_squares() {
        // width 5 holds two 2x2 per shelf and two shelves of height 2
        let rs = rects(&[(2, 2); 9]);
        let layout = nfdh_into_box(&rs, 5, 5).unwrap();
        let packed: usize = layout.shelves.iter().map(|s| s.members.len()).sum();
        assert_eq!(packed, 4);
        assert_eq!(layout.leftover.len(), 5);
        assert!(layout.packed_area(&rs) >= (5 - 2) * (5 - 2));
    }

    #[test]
    fn into_box_rejects_oversized_rect() {
        let rs = rects(&[(6, 1)]);
        assert!(nfdh_into_box(&rs, 5, 5).is_err());
    }

    #[test]
    fn transposed_box_stacks_columns() {
        let rs = rects(&[(2, 3), (2, 3), (2, 2)]);
        let layout = nfdh_into_box_transposed(&rs, 7, 8).unwrap();
        assert!(layout.leftover.is_empty());
        assert!(layout.transposed);
        // all placements stay inside the box with original dimensions
        for shelf in &layout.shelves {
            for p in &shelf.members {
                let r = rs[p.rect_id];
                assert!(p.x >= 0 && p.x + r.w <= 7);
                assert!(p.y >= 0 && p.y + r.h <= 8);
            }
        }
        // columns are horizontal containers
        let inst = Instance::new(7, rs, false).unwrap();
        let packing = Packing::new(layout.placements());
        assert!(verify_packing(&inst, &packing).ok());
        for (shelf, c) in layout.shelves.iter().zip(layout.shelf_containers(8)) {
            let members: Vec<_> = shelf.members.iter().map(|p| p.rect_id).collect();
            assert!(verify_container_discipline(&inst, &packing, &c, &members).is_ok());
        }
    }

    #[test]
    fn ffdh_matches_nfdh_on_the_hand_example() {
        let rs = rects(&[(6, 5), (5, 4), (4, 4), (7, 3)]);
        let inst = Instance::new(10, rs.clone(), false).unwrap();
        let ffdh = ffdh_strip(&rs, 10).unwrap();
        let (nfdh, _) = nfdh_strip(&rs, 10).unwrap();
        assert!(verify_packing(&inst, &ffdh).ok());
        assert!(ffdh.height(&inst) <= nfdh.height(&inst));
    }

    #[test]
    fn ffdh_equal_squares() {
        let rs = rects(&[(2, 2); 12]);
        let inst = Instance::new(10, rs.clone(), false).unwrap();
        let ffdh = ffdh_strip(&rs, 10).unwrap();
        let (nfdh, _) = nfdh_strip(&rs, 10).unwrap();
        assert_eq!(ffdh.height(&inst), 6);
        assert_eq!(nfdh.height(&inst), 6);
    }

    #[test]
    fn ffdh_reuses_earlier_shelves() {
        // the 4x4 returns to shelf one under FFDH
        let rs = rects(&[(6, 5), (5, 4), (4, 4), (7, 3)]);
        let ffdh = ffdh_strip(&rs, 10).unwrap();
        let p44 = ffdh.placements.iter().find(|p| p.rect_id == 2).unwrap();
        assert_eq!((p44.x, p44.y), (6, 0));
    }
}
