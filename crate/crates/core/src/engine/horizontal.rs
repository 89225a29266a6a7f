//! Linear grouping of horizontal rectangles into containers.

use std::collections::BTreeMap;

use crate::classify::ClassParams;
use crate::engine::slices::{integralize, rearrange_unit_slices, IntegralizeOutcome};
use crate::engine::UnitSlice;
use crate::error::{Error, Result};
use crate::geometry::{Container, Orientation, Placement, Rect, RectId};
use crate::instances::Region;
use crate::ratio::{big, ceil_to_i64};

/// Result of grouping the horizontal rectangles.
#[derive(Debug, Clone)]
pub struct HorizontalGrouping {
    /// Horizontal containers placed inside the given boxes.
    pub containers: Vec<Container>,
    /// Witness assignment of most rectangles into those containers.
    pub assigned: Vec<(RectId, usize)>,
    /// The wide prefix plus conversion discards, piled into the rounding box.
    pub round_box: Vec<RectId>,
    /// Width groups formed (0 when grouping was skipped).
    pub group_count: usize,
    /// True when every rectangle became its own container (tiny optimum).
    pub per_rect_mode: bool,
}

impl HorizontalGrouping {
    pub fn container_area(&self) -> i64 {
        self.containers.iter().map(Container::area).sum()
    }
}

/// Groups horizontal rectangles into `O(1)` containers inside the boxes of
/// the current packing.
///
/// Tiny optima get one container per rectangle; a total height at most
/// `ceil(eps*OPT)` is piled into the rounding box outright. Otherwise the
/// widest prefix is set aside, the rest is sliced into unit-height rows,
/// grouped into height-`ceil(eps*OPT)` width classes, shifted one class
/// down into the previous class's rows, regrouped per box into containers,
/// and converted back to whole rectangles greedily; conversion discards
/// join the wide prefix in the rounding box.
pub fn group_horizontal(
    h_rects: &[Rect],
    placements: &[Placement],
    boxes: &[Region],
    params: &ClassParams,
) -> Result<HorizontalGrouping> {
    if h_rects.len() != placements.len() {
        return Err(Error::Precondition(
            "one placement per horizontal rect required".into(),
        ));
    }
    if h_rects.is_empty() {
        return Ok(HorizontalGrouping {
            containers: Vec::new(),
            assigned: Vec::new(),
            round_box: Vec::new(),
            group_count: 0,
            per_rect_mode: false,
        });
    }

    let opt = params.opt;
    // tiny optimum: every rectangle is its own container in place
    if big(opt) <= big(1) / &params.eps {
        let mut containers = Vec::new();
        let mut assigned = Vec::new();
        for (r, p) in h_rects.iter().zip(placements) {
            containers.push(Container::new(p.x, p.y, r.w, r.h, Orientation::Horizontal));
            assigned.push((r.id, containers.len() - 1));
        }
        return Ok(HorizontalGrouping {
            containers,
            assigned,
            round_box: Vec::new(),
            group_count: 0,
            per_rect_mode: true,
        });
    }

    let eps_opt = ceil_to_i64(&(&params.eps * big(opt)));
    let total_h: i64 = h_rects.iter().map(|r| r.h).sum();
    if total_h <= eps_opt {
        return Ok(HorizontalGrouping {
            containers: Vec::new(),
            assigned: Vec::new(),
            round_box: h_rects.iter().map(|r| r.id).collect(),
            group_count: 0,
            per_rect_mode: false,
        });
    }

    // sort by width descending; the widest prefix of height >= eps_opt is
    // set aside for the rounding box
    let mut order: Vec<usize> = (0..h_rects.len()).collect();
    order.sort_by(|&a, &b| {
        h_rects[b]
            .w
            .cmp(&h_rects[a].w)
            .then(h_rects[a].id.cmp(&h_rects[b].id))
    });
    let mut long_prefix: Vec<usize> = Vec::new();
    let mut long_h = 0;
    let mut rest: Vec<usize> = Vec::new();
    for &i in &order {
        if long_h < eps_opt {
            long_prefix.push(i);
            long_h += h_rects[i].h;
        } else {
            rest.push(i);
        }
    }
    if rest.is_empty() {
        return Ok(HorizontalGrouping {
            containers: Vec::new(),
            assigned: Vec::new(),
            round_box: h_rects.iter().map(|r| r.id).collect(),
            group_count: 0,
            per_rect_mode: false,
        });
    }

    // unit-height rows of the remaining rectangles, widest first; row j
    // belongs to width group j / eps_opt, whose width rounds up to the
    // group's first (widest) row
    struct Row {
        rect: usize, // index into h_rects
        slot: (i64, i64, i64), // (x, y, width) of the source row
    }
    let mut rows: Vec<Row> = Vec::new();
    for &i in &rest {
        let p = &placements[i];
        for k in 0..h_rects[i].h {
            rows.push(Row {
                rect: i,
                slot: (p.x, p.y + k, h_rects[i].w),
            });
        }
    }
    // slot rows of the wide prefix host group 1
    let mut slots: Vec<(i64, i64, i64)> = Vec::new();
    for &i in &long_prefix {
        let p = &placements[i];
        for k in 0..h_rects[i].h {
            slots.push((p.x, p.y + k, h_rects[i].w));
        }
    }
    for row in &rows {
        slots.push(row.slot);
    }

    let group_of = |row_idx: usize| row_idx / eps_opt as usize;
    let group_count = group_of(rows.len() - 1) + 1;
    let group_width: Vec<i64> = (0..group_count)
        .map(|g| rows[g * eps_opt as usize].slot.2)
        .collect();

    // shift each group's rows into the previous group's slots; the wide
    // prefix provides at least eps_opt slots for group 0
    let mut relocated: Vec<(usize, i64, i64, i64)> = Vec::new(); // (rect, x, row_y, rounded_w)
    for (j, row) in rows.iter().enumerate() {
        let (sx, sy, sw) = slots[j];
        let g = group_of(j);
        let rounded = group_width[g];
        if rounded > sw {
            return Err(Error::Internal(format!(
                "group width {rounded} exceeds its slot width {sw}"
            )));
        }
        relocated.push((row.rect, sx, sy, rounded));
    }

    // per-box container formation via the transposed unit-slice regrouping
    let box_of = |x: i64, y: i64| -> Option<usize> {
        boxes
            .iter()
            .position(|b| x >= b.x && x < b.x + b.w && y >= b.y && y < b.y + b.h)
    };
    let mut per_box: BTreeMap<usize, Vec<UnitSlice>> = BTreeMap::new();
    for &(_, x, y, w) in &relocated {
        let b = box_of(x, y).ok_or_else(|| {
            Error::Internal(format!("relocated row at ({x},{y}) is outside every box"))
        })?;
        // transpose: rows become unit-width columns
        per_box.entry(b).or_default().push(UnitSlice {
            parent: 0,
            x: y,
            y: x,
            h: w,
        });
    }

    let mut containers: Vec<Container> = Vec::new();
    for (b, slices) in per_box {
        let rgn = boxes[b];
        let transposed = Region::new(rgn.y, rgn.x, rgn.h, rgn.w);
        let min_h = slices.iter().map(|s| s.h).min().unwrap();
        let d = (transposed.h + min_h - 1) / min_h;
        let mut hs: Vec<i64> = slices.iter().map(|s| s.h).collect();
        hs.sort_unstable();
        hs.dedup();
        let q = hs.len() as i64;
        let out = rearrange_unit_slices(&slices, transposed, d, q)?;
        for c in out.containers {
            // transpose back
            containers.push(Container::new(c.y, c.x, c.h, c.w, Orientation::Horizontal));
        }
    }

    let rest_rects: Vec<Rect> = rest.iter().map(|&i| h_rects[i]).collect();
    let IntegralizeOutcome { assigned, discarded } =
        integralize(&rest_rects, &containers, Orientation::Horizontal)?;

    let mut round_box: Vec<RectId> = long_prefix.iter().map(|&i| h_rects[i].id).collect();
    round_box.extend(discarded);

    Ok(HorizontalGrouping {
        containers,
        assigned,
        round_box,
        group_count,
        per_rect_mode: false,
    })
}
