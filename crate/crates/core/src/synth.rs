//! Seeded generators for the certification suites: random vertical-box
//! states, unit-slice boxes, feasible-by-construction conversion inputs,
//! and small knapsack instances for oracle comparison.

use num::rational::BigRational;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::engine::{EngineParams, TallPiece, UnitSlice, VerticalBoxState};
use crate::geometry::{Container, Orientation, Rect};
use crate::instances::Region;
use crate::knapsack::KnapsackInstance;
use crate::ratio::{big, rat};

/// Numeric setup for vertical-box trials at `eps = 1/q`, `alpha = 1/3`,
/// `delta_h = eps`: the optimum `6*q^2` makes the rounding step exactly 3.
pub fn trial_params(q: i64) -> EngineParams {
    let opt = 6 * q * q;
    EngineParams {
        grid_step: 3,
        opt,
        eps: rat(1, q),
        alpha: rat(1, 3),
        gamma: rat(1, 2 * q * q),
    }
}

/// Samples a vertical-box state: tall rectangles floating in runs of
/// columns (at most two per vertical line), optional cut pieces pinned to
/// the box sides, and sliced vertical content in the gaps.
pub fn gen_vertical_box_state(
    rng: &mut ChaCha8Rng,
    q: i64,
    max_width: i64,
    with_cuts: bool,
) -> VerticalBoxState {
    let params = trial_params(q);
    let r = params.grid_step;
    let opt = params.opt;
    let alpha_opt = opt / 3; // exact: opt = 6 q^2
    let tall_min = (alpha_opt / r + 1) * r;
    let h_hi = opt + 6 * q; // (1 + eps) * opt, a multiple of r
    let h_lo = ((2 * tall_min).max(alpha_opt + r) + r - 1) / r * r;
    let box_h = r * rng.gen_range(h_lo / r..=h_hi / r);
    let width = rng.gen_range(4..=max_width.max(4));

    let mut next_id = 0usize;
    let mut id = || {
        let v = next_id;
        next_id += 1;
        v
    };

    let mut tall: Vec<TallPiece> = Vec::new();
    let mut tall_cut: Vec<TallPiece> = Vec::new();
    let mut cut_cols = vec![false; width as usize];

    let tall_height = |rng: &mut ChaCha8Rng, cap: i64| -> Option<i64> {
        let hi = cap.min(opt) / r;
        let lo = tall_min / r;
        (lo <= hi).then(|| r * rng.gen_range(lo..=hi))
    };

    if with_cuts {
        // up to one cut piece per side, grid aligned, flush with a corner
        // often enough to exercise the corner boxes
        for side in [true, false] {
            if !rng.gen_bool(0.6) {
                continue;
            }
            if let Some(h) = tall_height(rng, box_h) {
                let w = rng.gen_range(1..=3.min(width / 2)).max(1);
                let x = if side { 0 } else { width - w };
                let slots = (box_h - h) / r;
                let y = if rng.gen_bool(0.7) {
                    // flush with the bottom or the top
                    if rng.gen_bool(0.5) {
                        0
                    } else {
                        box_h - h
                    }
                } else {
                    r * rng.gen_range(0..=slots)
                };
                tall_cut.push(TallPiece {
                    rect_id: id(),
                    x,
                    y,
                    w,
                    h,
                });
                for c in x..x + w {
                    cut_cols[c as usize] = true;
                }
            }
        }
    }

    // column runs with tall patterns
    let mut x = 0;
    while x < width {
        let max_run = (width - x).min(6);
        let run = rng.gen_range(1..=max_run);
        if (x..x + run).any(|c| cut_cols[c as usize]) {
            x += run;
            continue;
        }
        match rng.gen_range(0..4) {
            0 => {} // empty run: full pseudo columns
            1 => {
                if let Some(h) = tall_height(rng, box_h) {
                    let y = rng.gen_range(0..=box_h - h);
                    tall.push(TallPiece {
                        rect_id: id(),
                        x,
                        y,
                        w: run,
                        h,
                    });
                }
            }
            2 => {
                if let Some(h) = tall_height(rng, box_h) {
                    let y = rng.gen_range(0..=box_h - h);
                    tall.push(TallPiece {
                        rect_id: id(),
                        x,
                        y,
                        w: run,
                        h,
                    });
                }
            }
            _ => {
                if let Some(hb) = tall_height(rng, box_h - tall_min) {
                    if let Some(ht) = tall_height(rng, box_h - hb) {
                        let gap = box_h - hb - ht;
                        let yb = rng.gen_range(0..=gap);
                        let spread = rng.gen_range(0..=gap - yb);
                        tall.push(TallPiece {
                            rect_id: id(),
                            x,
                            y: yb,
                            w: run,
                            h: hb,
                        });
                        tall.push(TallPiece {
                            rect_id: id(),
                            x,
                            y: yb + hb + spread,
                            w: run,
                            h: ht,
                        });
                    }
                }
            }
        }
        x += run;
    }

    // sliced vertical content in the per-column gaps
    let state_wo_slices = VerticalBoxState {
        region: Region::new(0, 0, width, box_h),
        params: params.clone(),
        tall: tall.clone(),
        tall_cut: tall_cut.clone(),
        slices: Vec::new(),
    };
    let slice_min = q * 6; // delta_h * opt
    let slice_max = alpha_opt;
    let mut slices: Vec<UnitSlice> = Vec::new();
    for col in 0..width {
        let mut pieces: Vec<(i64, i64)> = state_wo_slices
            .pieces()
            .filter(|t| t.covers_column(col))
            .map(|t| (t.y, t.h))
            .collect();
        pieces.sort_unstable();
        let mut y = 0;
        let mut gaps: Vec<(i64, i64)> = Vec::new();
        for (py, ph) in pieces {
            if py > y {
                gaps.push((y, py - y));
            }
            y = py + ph;
        }
        if box_h > y {
            gaps.push((y, box_h - y));
        }
        for (gy, gh) in gaps {
            let mut cursor = gy;
            while gh - (cursor - gy) >= slice_min && rng.gen_bool(0.7) {
                let cap = (gh - (cursor - gy)).min(slice_max) / r;
                let h = r * rng.gen_range(slice_min / r..=cap);
                slices.push(UnitSlice {
                    parent: id(),
                    x: col,
                    y: cursor,
                    h,
                });
                cursor += h;
            }
        }
    }

    VerticalBoxState {
        region: Region::new(0, 0, width, box_h),
        params,
        tall,
        tall_cut,
        slices,
    }
}

/// Samples a box of unit slices satisfying the regrouping preconditions:
/// at most `q` distinct heights, all at least `region.h / d`.
pub fn gen_slice_box(
    rng: &mut ChaCha8Rng,
    d: i64,
    q: i64,
    max_width: i64,
) -> (Vec<UnitSlice>, Region, i64, i64) {
    let unit = rng.gen_range(4..=10);
    let box_h = unit * d;
    let min_h = unit; // = box_h / d
    let mut heights: Vec<i64> = Vec::new();
    while (heights.len() as i64) < q {
        let h = rng.gen_range(min_h..=box_h);
        if !heights.contains(&h) {
            heights.push(h);
        }
    }
    let width = rng.gen_range(1..=max_width);
    let mut slices = Vec::new();
    let mut id = 0usize;
    for x in 0..width {
        let mut y = 0;
        while box_h - y >= min_h && rng.gen_bool(0.8) {
            let fitting: Vec<i64> = heights
                .iter()
                .copied()
                .filter(|&h| y + h <= box_h)
                .collect();
            if fitting.is_empty() {
                break;
            }
            let h = fitting[rng.gen_range(0..fitting.len())];
            slices.push(UnitSlice {
                parent: id,
                x,
                y,
                h,
            });
            id += 1;
            y += h;
        }
    }
    (slices, Region::new(0, 0, width, box_h), d, q)
}

/// Builds containers and rectangles that admit a sliced packing by
/// construction: containers are cut left to right into rectangle sizes
/// (widths never increase along the cut order).
pub fn gen_integralize_input(
    rng: &mut ChaCha8Rng,
    orientation: Orientation,
) -> (Vec<Rect>, Vec<Container>) {
    let n_containers = rng.gen_range(1..=5);
    let mut containers: Vec<Container> = Vec::new();
    let mut gates: Vec<i64> = Vec::new();
    for _ in 0..n_containers {
        gates.push(rng.gen_range(2..=30));
    }
    gates.sort_unstable_by(|a, b| b.cmp(a));
    let mut x = 0;
    for &g in &gates {
        let cap = rng.gen_range(4..=40);
        let c = match orientation {
            Orientation::Horizontal => Container::new(x, 0, g, cap, orientation),
            Orientation::Vertical => Container::new(x, 0, cap, g, orientation),
        };
        containers.push(c);
        x += 50;
    }

    // walk the containers in order, emitting rects with non-increasing
    // gate dimension; a rect may continue into the next container
    let mut rects: Vec<Rect> = Vec::new();
    let mut gate_cap = gates[0];
    let mut id = 0;
    let mut ci = 0;
    let mut room: i64 = match orientation {
        Orientation::Horizontal => containers[0].h,
        Orientation::Vertical => containers[0].w,
    };
    while ci < containers.len() {
        if room == 0 || rng.gen_bool(0.1) {
            ci += 1;
            if ci == containers.len() {
                break;
            }
            gate_cap = gate_cap.min(gates[ci]);
            room += match orientation {
                Orientation::Horizontal => containers[ci].h,
                Orientation::Vertical => containers[ci].w,
            };
            continue;
        }
        let size = rng.gen_range(1..=room.min(12));
        let gate = rng.gen_range(1..=gate_cap);
        gate_cap = gate; // keep the slicing order consistent
        let r = match orientation {
            Orientation::Horizontal => Rect::new(id, gate, size),
            Orientation::Vertical => Rect::new(id, size, gate),
        };
        rects.push(r);
        room -= size;
        id += 1;
    }
    (rects, containers)
}

/// Random small multiple-knapsack instances within oracle reach.
pub fn gen_knapsack_instance(rng: &mut ChaCha8Rng) -> KnapsackInstance {
    let k = rng.gen_range(1..=4);
    let n_max = match k {
        1 | 2 | 3 => 12,
        _ => 10,
    };
    let n = rng.gen_range(1..=n_max);
    let capacities: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=20)).collect();
    let sizes = (0..n)
        .map(|_| {
            (0..k)
                .map(|_| rng.gen_bool(0.85).then(|| rng.gen_range(1..=12)))
                .collect()
        })
        .collect();
    KnapsackInstance {
        capacities,
        sizes,
        area_knapsack: None,
    }
}

/// Exact bound check value for the repack trials.
pub fn good_fraction_bound(params: &EngineParams, width: i64) -> BigRational {
    params.good_fraction() * big(width)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn generated_states_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for q in [4, 8, 16] {
            for _ in 0..40 {
                let s = gen_vertical_box_state(&mut rng, q, 60, true);
                s.validate().unwrap();
            }
        }
    }

    #[test]
    fn generated_slice_boxes_meet_preconditions() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let d = rng.gen_range(1..=3);
            let q = rng.gen_range(1..=3);
            let (slices, region, d, q) = gen_slice_box(&mut rng, d, q, 30);
            let mut hs: Vec<i64> = slices.iter().map(|s| s.h).collect();
            hs.sort_unstable();
            hs.dedup();
            assert!(hs.len() as i64 <= q);
            assert!(slices.iter().all(|s| s.h * d >= region.h));
        }
    }
}
