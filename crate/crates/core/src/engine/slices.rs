//! Unit-slice plumbing: slicing vertical rectangles, regrouping slices into
//! containers, and the greedy fractional-to-integral conversion.

use std::collections::BTreeMap;

use crate::engine::UnitSlice;
use crate::error::{Error, Result};
use crate::geometry::{Container, Orientation, Placement, Rect, RectId};
use crate::instances::Region;

/// Cuts each placed rectangle into width-1 slices that keep the parent id
/// and vertical extent. Slice area sums to the original area.
pub fn slice_vertical(members: &[(Rect, Placement)]) -> Vec<UnitSlice> {
    let mut out = Vec::new();
    for (rect, pl) in members {
        debug_assert!(!pl.rotated);
        for col in pl.x..pl.x + rect.w {
            out.push(UnitSlice {
                parent: rect.id,
                x: col,
                y: pl.y,
                h: rect.h,
            });
        }
    }
    out
}

/// Containers produced from a box of unit slices, with the slices moved to
/// their new positions.
#[derive(Debug, Clone)]
pub struct SliceContainers {
    pub containers: Vec<Container>,
    pub slices: Vec<UnitSlice>,
}

impl SliceContainers {
    pub fn container_area(&self) -> i64 {
        self.containers.iter().map(Container::area).sum()
    }

    pub fn slice_area(&self) -> i64 {
        self.slices.iter().map(|s| s.h).sum()
    }
}

/// Regroups the unit slices inside `region` into at most `d * (q+1)^d`
/// vertical containers whose total area equals the slice area.
///
/// Preconditions: every slice height is at least `region.h / d` and there
/// are at most `q` distinct heights. Columns are sorted by their stack
/// profile, so equal stacks sit side by side and each stack level becomes
/// one container.
pub fn rearrange_unit_slices(
    slices: &[UnitSlice],
    region: Region,
    d: i64,
    q: i64,
) -> Result<SliceContainers> {
    let mut heights: Vec<i64> = slices.iter().map(|s| s.h).collect();
    heights.sort_unstable();
    heights.dedup();
    if heights.len() as i64 > q {
        return Err(Error::Precondition(format!(
            "{} distinct slice heights exceed q = {q}",
            heights.len()
        )));
    }
    for s in slices {
        if s.h * d < region.h {
            return Err(Error::Precondition(format!(
                "slice height {} is below region.h/d = {}/{d}",
                s.h, region.h
            )));
        }
        if s.x < region.x || s.x >= region.x + region.w {
            return Err(Error::Precondition("slice outside the region".into()));
        }
    }

    // per-column stacks, sorted tallest-first inside the column
    let mut columns: BTreeMap<i64, Vec<&UnitSlice>> = BTreeMap::new();
    for s in slices {
        columns.entry(s.x).or_default().push(s);
    }
    let mut profiles: Vec<(Vec<i64>, i64, Vec<&UnitSlice>)> = columns
        .into_iter()
        .map(|(x, mut col)| {
            col.sort_by(|a, b| b.h.cmp(&a.h).then(a.parent.cmp(&b.parent)));
            let profile: Vec<i64> = col.iter().map(|s| s.h).collect();
            debug_assert!(profile.iter().sum::<i64>() <= region.h);
            (profile, x, col)
        })
        .collect();
    // group equal profiles next to each other, ties by original column
    profiles.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));

    let mut containers = Vec::new();
    let mut out_slices = Vec::new();
    let mut cursor = region.x;
    let mut i = 0;
    while i < profiles.len() {
        let mut j = i;
        while j < profiles.len() && profiles[j].0 == profiles[i].0 {
            j += 1;
        }
        let group_w = (j - i) as i64;
        let profile = &profiles[i].0;
        let mut y = region.y;
        for (level, &h) in profile.iter().enumerate() {
            containers.push(Container::new(cursor, y, group_w, h, Orientation::Vertical));
            for (offset, (_, _, col)) in profiles[i..j].iter().enumerate() {
                let s = col[level];
                out_slices.push(UnitSlice {
                    parent: s.parent,
                    x: cursor + offset as i64,
                    y,
                    h: s.h,
                });
            }
            y += h;
        }
        cursor += group_w;
        i = j;
    }

    let result = SliceContainers {
        containers,
        slices: out_slices,
    };
    debug_assert_eq!(result.container_area(), result.slice_area());
    Ok(result)
}

/// Assignment of whole rectangles to containers with the per-container
/// discards of the greedy conversion.
#[derive(Debug, Clone)]
pub struct IntegralizeOutcome {
    /// `(rect id, container index)` pairs.
    pub assigned: Vec<(RectId, usize)>,
    pub discarded: Vec<RectId>,
}

/// Greedy fractional-to-integral conversion: rectangles sorted by their
/// cross dimension fill equally sorted containers; each overflow discards
/// one rectangle and closes the container, so at most one discard per
/// container. The discard bound and the dimension-fit guarantee hold when
/// a sliced packing of the rectangles into the containers exists; a
/// cross-dimension misfit proves it did not and is reported as an error.
pub fn integralize(
    rects: &[Rect],
    containers: &[Container],
    orientation: Orientation,
) -> Result<IntegralizeOutcome> {
    if containers
        .iter()
        .any(|c| c.orientation != orientation)
    {
        return Err(Error::Precondition(
            "all containers must share the stacking orientation".into(),
        ));
    }
    // gate = the dimension that must fit, size = the stacked dimension
    let (gate, size): (fn(&Rect) -> i64, fn(&Rect) -> i64) = match orientation {
        Orientation::Horizontal => (|r| r.w, |r| r.h),
        Orientation::Vertical => (|r| r.h, |r| r.w),
    };
    let (cgate, ccap): (fn(&Container) -> i64, fn(&Container) -> i64) = match orientation {
        Orientation::Horizontal => (|c| c.w, |c| c.h),
        Orientation::Vertical => (|c| c.h, |c| c.w),
    };

    let mut order: Vec<usize> = (0..rects.len()).collect();
    order.sort_by(|&a, &b| {
        gate(&rects[b])
            .cmp(&gate(&rects[a]))
            .then(rects[a].id.cmp(&rects[b].id))
    });
    let mut corder: Vec<usize> = (0..containers.len()).collect();
    corder.sort_by(|&a, &b| cgate(&containers[b]).cmp(&cgate(&containers[a])).then(a.cmp(&b)));

    let mut assigned = Vec::new();
    let mut discarded = Vec::new();
    let mut ci = 0;
    let mut fill = 0;
    for &ri in &order {
        let r = &rects[ri];
        loop {
            if ci >= corder.len() {
                discarded.push(r.id);
                break;
            }
            let c = &containers[corder[ci]];
            if fill >= ccap(c) {
                // container exactly full: close it without a victim
                ci += 1;
                fill = 0;
                continue;
            }
            if fill + size(r) > ccap(c) {
                // overflow: discard this rectangle, close the container
                discarded.push(r.id);
                ci += 1;
                fill = 0;
                break;
            }
            if gate(r) > cgate(c) {
                return Err(Error::Precondition(format!(
                    "rect {} does not fit container {}: no sliced packing existed",
                    r.id, corder[ci]
                )));
            }
            assigned.push((r.id, corder[ci]));
            fill += size(r);
            break;
        }
    }
    Ok(IntegralizeOutcome {
        assigned,
        discarded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slicing_keeps_columns_and_area() {
        let members = vec![(Rect::new(0, 3, 5), Placement::new(0, 2, 1))];
        let slices = slice_vertical(&members);
        let cols: Vec<i64> = slices.iter().map(|s| s.x).collect();
        assert_eq!(cols, vec![2, 3, 4]);
        assert!(slices.iter().all(|s| s.h == 5 && s.y == 1));

        let single = slice_vertical(&[(Rect::new(1, 1, 7), Placement::new(1, 4, 0))]);
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].x, 4);
    }

    #[test]
    fn one_height_gives_one_container() {
        let slices: Vec<UnitSlice> = (0..6)
            .map(|x| UnitSlice {
                parent: x as usize,
                x,
                y: 0,
                h: 10,
            })
            .collect();
        let out = rearrange_unit_slices(&slices, Region::new(0, 0, 6, 10), 1, 1).unwrap();
        assert_eq!(out.containers.len(), 1);
        assert_eq!(out.containers[0], Container::new(0, 0, 6, 10, Orientation::Vertical));
    }

    #[test]
    fn hand_built_two_height_box() {
        // 4 columns, heights from {5, 6}, region 4x10, d=2, q=2
        let mut slices = Vec::new();
        let stacks: [&[i64]; 4] = [&[5, 5], &[6], &[5], &[5, 5]];
        for (x, stack) in stacks.iter().enumerate() {
            let mut y = 0;
            for (k, &h) in stack.iter().enumerate() {
                slices.push(UnitSlice {
                    parent: x * 10 + k,
                    x: x as i64,
                    y,
                    h,
                });
                y += h;
            }
        }
        let out = rearrange_unit_slices(&slices, Region::new(0, 0, 4, 10), 2, 2).unwrap();
        // profiles: [5,5] x2 -> 2 containers, [6] -> 1, [5] -> 1
        assert_eq!(out.containers.len(), 4);
        assert!(out.containers.len() as i64 <= 2 * (2 + 1_i64).pow(2));
        assert_eq!(out.container_area(), out.slice_area());
        // grouped columns sit side by side and slices stay width 1
        for c in &out.containers {
            let covered: i64 = out
                .slices
                .iter()
                .filter(|s| s.x >= c.x && s.x < c.x + c.w && s.y == c.y)
                .count() as i64;
            assert_eq!(covered, c.w);
        }
    }

    #[test]
    fn precondition_violations_are_rejected() {
        let slices = vec![UnitSlice {
            parent: 0,
            x: 0,
            y: 0,
            h: 2,
        }];
        // height below region.h / d
        assert!(rearrange_unit_slices(&slices, Region::new(0, 0, 1, 10), 2, 1).is_err());
        // too many distinct heights
        let slices = vec![
            UnitSlice {
                parent: 0,
                x: 0,
                y: 0,
                h: 5,
            },
            UnitSlice {
                parent: 1,
                x: 1,
                y: 0,
                h: 6,
            },
        ];
        assert!(rearrange_unit_slices(&slices, Region::new(0, 0, 2, 10), 2, 1).is_err());
    }

    #[test]
    fn exact_fill_has_no_discards() {
        let rects = vec![Rect::new(0, 4, 4), Rect::new(1, 4, 6), Rect::new(2, 3, 5)];
        let containers = vec![
            Container::new(0, 0, 5, 10, Orientation::Horizontal),
            Container::new(10, 0, 4, 5, Orientation::Horizontal),
        ];
        let out = integralize(&rects, &containers, Orientation::Horizontal).unwrap();
        assert!(out.discarded.is_empty());
        assert_eq!(out.assigned.len(), 3);
    }

    #[test]
    fn single_container_discards_the_overflow() {
        let rects = vec![Rect::new(0, 2, 4), Rect::new(1, 2, 4), Rect::new(2, 2, 4)];
        let containers = vec![Container::new(0, 0, 2, 10, Orientation::Horizontal)];
        let out = integralize(&rects, &containers, Orientation::Horizontal).unwrap();
        assert_eq!(out.assigned.len(), 2);
        assert_eq!(out.discarded.len(), 1);
    }

    #[test]
    fn overfull_input_discards_one_per_container() {
        // no sliced packing exists (18 > 10); the greedy still terminates
        // with one discard per closed container
        let rects = vec![Rect::new(0, 2, 9), Rect::new(1, 2, 9)];
        let containers = vec![Container::new(0, 0, 2, 10, Orientation::Horizontal)];
        let out = integralize(&rects, &containers, Orientation::Horizontal).unwrap();
        assert_eq!(out.assigned.len(), 1);
        assert_eq!(out.discarded.len(), 1);
    }

    #[test]
    fn cross_dimension_misfit_is_detected() {
        let rects = vec![Rect::new(0, 5, 4)];
        let containers = vec![Container::new(0, 0, 2, 10, Orientation::Horizontal)];
        assert!(integralize(&rects, &containers, Orientation::Horizontal).is_err());
    }
}
