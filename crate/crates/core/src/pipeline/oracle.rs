//! The box-partition oracle: a partition of the lifted strip prefix into
//! large, horizontal and vertical boxes with per-rectangle membership. The
//! partition is accepted as an input (derived here from guillotine cut
//! trees) and its postconditions are verified, never assumed.

use num::rational::BigRational;

use crate::classify::{ClassLabel, ClassParams};
use crate::error::{Error, Result};
use crate::geometry::{BoxKind, BoxRegion, RectId};
use crate::instances::{CutAxis, CutNode, GuillotineWitness, Region};
use crate::pipeline::lift::{lift_cut, LiftedPacking};
use crate::ratio::{big, cmp_int, floor_to_i64};

/// Where a rectangle lives relative to the partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RectStatus {
    /// Fully inside the given box.
    Contained(usize),
    /// Horizontal rectangle cut by some box: moves to the cut strip.
    CutHorizontal,
    /// Tall rectangle nicely cut by the given vertical box: stays in place.
    CutTall(usize),
    /// Vertical rectangle nicely cut by a vertical box: moves to the cut
    /// pile.
    CutVertical,
    /// Medium or small: repacked by a dedicated stage.
    Removed,
}

#[derive(Debug, Clone)]
pub struct BoxPartitionOracle {
    pub boxes: Vec<BoxRegion>,
    /// Status per rect id.
    pub status: Vec<RectStatus>,
}

impl BoxPartitionOracle {
    pub fn vertical_boxes(&self) -> impl Iterator<Item = (usize, &BoxRegion)> {
        self.boxes
            .iter()
            .enumerate()
            .filter(|(_, b)| b.kind == BoxKind::VerticalBox)
    }
}

#[derive(Debug, Clone)]
pub struct ConformanceReport {
    pub box_count: usize,
    pub issues: Vec<String>,
    /// Total area of horizontal cut rectangles and its allowance.
    pub h_cut_area: i64,
    pub h_cut_allowance: BigRational,
}

impl ConformanceReport {
    pub fn ok(&self) -> bool {
        self.issues.is_empty()
    }
}

struct Walker<'a> {
    lifted: &'a LiftedPacking,
    labels: &'a [ClassLabel],
    eps: BigRational,
    grid_step: i64,
    slab_max: i64,
    delta_w_w: BigRational,
    delta_h_opt_prime: BigRational,
}

impl Walker<'_> {
    fn surviving(&self, node: &CutNode, out: &mut Vec<RectId>) {
        match node {
            CutNode::Leaf { rect_id } => {
                if !matches!(self.labels[*rect_id], ClassLabel::Medium | ClassLabel::Small) {
                    out.push(*rect_id);
                }
            }
            CutNode::Split { low, high, .. } => {
                self.surviving(low, out);
                self.surviving(high, out);
            }
        }
    }

    fn lifted_rect(&self, id: RectId) -> Region {
        let p = &self.lifted.placements[id];
        let rr = &self.lifted.rounded[id];
        Region::new(p.x, p.y, rr.w, rr.h)
    }

    /// Splits an empty lifted region into horizontal slabs no higher than
    /// the horizontal-box limit.
    fn emit_filler(&self, rgn: Region, boxes: &mut Vec<BoxRegion>) {
        if rgn.w <= 0 || rgn.h <= 0 {
            return;
        }
        let parts = (rgn.h + self.slab_max - 1) / self.slab_max;
        let base = rgn.h / parts;
        let extra = rgn.h % parts;
        let mut y = rgn.y;
        for i in 0..parts {
            let h = base + if i < extra { 1 } else { 0 };
            boxes.push(BoxRegion::new(rgn.x, y, rgn.w, h, BoxKind::HorizontalBox));
            y += h;
        }
    }

    fn walk(
        &self,
        node: &CutNode,
        orig: Region,
        lifted_rgn: Region,
        boxes: &mut Vec<BoxRegion>,
        status: &mut [RectStatus],
    ) -> Result<()> {
        let mut content = Vec::new();
        self.surviving(node, &mut content);

        if content.is_empty() {
            self.emit_filler(lifted_rgn, boxes);
            return Ok(());
        }

        // a narrow all-tall/vertical region becomes one vertical box,
        // snapped inward to the grid (its content already is)
        let all_tv = content
            .iter()
            .all(|&id| matches!(self.labels[id], ClassLabel::Tall | ClassLabel::Vertical));
        let narrow = cmp_int(lifted_rgn.w, &self.delta_w_w) != std::cmp::Ordering::Greater;
        if all_tv && narrow {
            let r = self.grid_step;
            let y_lo = ((lifted_rgn.y + r - 1) / r) * r;
            let y_hi = ((lifted_rgn.y + lifted_rgn.h) / r) * r;
            let min_y = content
                .iter()
                .map(|&id| self.lifted_rect(id).y)
                .min()
                .unwrap();
            let max_top = content
                .iter()
                .map(|&id| {
                    let rgn = self.lifted_rect(id);
                    rgn.y + rgn.h
                })
                .max()
                .unwrap();
            if y_lo > min_y || y_hi < max_top {
                return Err(Error::OracleRejected(format!(
                    "vertical box at x={} cannot be grid aligned around its content",
                    lifted_rgn.x
                )));
            }
            self.emit_filler(
                Region::new(lifted_rgn.x, lifted_rgn.y, lifted_rgn.w, y_lo - lifted_rgn.y),
                boxes,
            );
            boxes.push(BoxRegion::new(
                lifted_rgn.x,
                y_lo,
                lifted_rgn.w,
                y_hi - y_lo,
                BoxKind::VerticalBox,
            ));
            let bidx = boxes.len() - 1;
            for &id in &content {
                status[id] = RectStatus::Contained(bidx);
            }
            self.emit_filler(
                Region::new(
                    lifted_rgn.x,
                    y_hi,
                    lifted_rgn.w,
                    lifted_rgn.y + lifted_rgn.h - y_hi,
                ),
                boxes,
            );
            return Ok(());
        }

        // a flat all-horizontal region becomes one horizontal box
        let all_h = content
            .iter()
            .all(|&id| self.labels[id] == ClassLabel::Horizontal);
        let flat =
            cmp_int(lifted_rgn.h, &self.delta_h_opt_prime) != std::cmp::Ordering::Greater;
        if all_h && flat {
            boxes.push(BoxRegion::new(
                lifted_rgn.x,
                lifted_rgn.y,
                lifted_rgn.w,
                lifted_rgn.h,
                BoxKind::HorizontalBox,
            ));
            let bidx = boxes.len() - 1;
            for &id in &content {
                status[id] = RectStatus::Contained(bidx);
            }
            return Ok(());
        }

        match node {
            CutNode::Leaf { rect_id } => {
                let id = *rect_id;
                let rgn = self.lifted_rect(id);
                match self.labels[id] {
                    ClassLabel::Large => {
                        self.emit_filler(
                            Region::new(
                                lifted_rgn.x,
                                lifted_rgn.y,
                                lifted_rgn.w,
                                rgn.y - lifted_rgn.y,
                            ),
                            boxes,
                        );
                        boxes.push(BoxRegion::new(rgn.x, rgn.y, rgn.w, rgn.h, BoxKind::Large));
                        status[id] = RectStatus::Contained(boxes.len() - 1);
                        self.emit_filler(
                            Region::new(
                                lifted_rgn.x,
                                rgn.y + rgn.h,
                                lifted_rgn.w,
                                lifted_rgn.y + lifted_rgn.h - rgn.y - rgn.h,
                            ),
                            boxes,
                        );
                        Ok(())
                    }
                    other => Err(Error::OracleRejected(format!(
                        "leaf rect {id} ({other:?}) fits no box kind in a {}x{} region",
                        lifted_rgn.w, lifted_rgn.h
                    ))),
                }
            }
            CutNode::Split {
                axis,
                pos,
                low,
                high,
            } => {
                let (orig_lo, orig_hi) = orig.split(*axis, *pos);
                let (lift_lo, lift_hi) = match axis {
                    CutAxis::Vertical => lifted_rgn.split(CutAxis::Vertical, *pos),
                    CutAxis::Horizontal => {
                        let c = lift_cut(*pos, &self.eps)
                            .clamp(lifted_rgn.y, lifted_rgn.y + lifted_rgn.h);
                        lifted_rgn.split(CutAxis::Horizontal, c)
                    }
                };
                self.walk(low, orig_lo, lift_lo, boxes, status)?;
                self.walk(high, orig_hi, lift_hi, boxes, status)
            }
        }
    }
}

/// Derives a partition from a guillotine witness: the cut tree is lifted
/// and coarsened top-down. A narrow subtree whose surviving content is all
/// tall/vertical becomes one vertical box; flat all-horizontal content
/// becomes a horizontal box; large leaves become exact large boxes; empty
/// space turns into horizontal filler slabs. Nothing is ever cut.
pub fn derive_oracle_from_witness(
    witness: &GuillotineWitness,
    lifted: &LiftedPacking,
    labels: &[ClassLabel],
    params: &ClassParams,
) -> Result<BoxPartitionOracle> {
    let inst = &witness.instance;
    let delta_h_opt_prime = &params.delta_h * big(lifted.opt_prime);
    let slab_max = floor_to_i64(&delta_h_opt_prime).max(0);
    if slab_max < 1 {
        return Err(Error::OracleRejected(format!(
            "delta_h * OPT' = {} is below one cell; empty space cannot be tiled",
            crate::ratio::format_ratio(&delta_h_opt_prime)
        )));
    }

    let walker = Walker {
        lifted,
        labels,
        eps: params.eps.clone(),
        grid_step: lifted.grid_step,
        slab_max,
        delta_w_w: params.threshold_delta_w(inst.width),
        delta_h_opt_prime,
    };

    let mut boxes: Vec<BoxRegion> = Vec::new();
    let mut status: Vec<RectStatus> = labels
        .iter()
        .map(|l| match l {
            ClassLabel::Medium | ClassLabel::Small => RectStatus::Removed,
            _ => RectStatus::Contained(usize::MAX),
        })
        .collect();
    walker.walk(
        &witness.tree,
        Region::new(0, 0, inst.width, witness.h_opt),
        Region::new(0, 0, inst.width, lifted.opt_prime),
        &mut boxes,
        &mut status,
    )?;

    if let Some(id) = status
        .iter()
        .position(|s| matches!(s, RectStatus::Contained(bi) if *bi == usize::MAX))
    {
        return Err(Error::OracleRejected(format!(
            "rect {id} was never assigned to a box"
        )));
    }
    Ok(BoxPartitionOracle { boxes, status })
}

/// Checks the partition postconditions against the lifted packing: exact
/// tiling, box kind limits, grid alignment of vertical boxes, per-rect
/// membership, nicely-cut geometry, and the cut-area allowance.
pub fn verify_oracle(
    oracle: &BoxPartitionOracle,
    lifted: &LiftedPacking,
    labels: &[ClassLabel],
    params: &ClassParams,
    width: i64,
) -> ConformanceReport {
    let mut issues = Vec::new();
    let opt_prime = lifted.opt_prime;

    let mut area = 0;
    for (i, b) in oracle.boxes.iter().enumerate() {
        if b.w < 0 || b.h < 0 || b.x < 0 || b.y < 0 || b.x + b.w > width || b.y + b.h > opt_prime {
            issues.push(format!("box {i} leaves the strip prefix"));
        }
        area += b.area();
        for (j, other) in oracle.boxes.iter().enumerate().skip(i + 1) {
            if crate::geometry::intervals_overlap(b.x, b.w, other.x, other.w)
                && crate::geometry::intervals_overlap(b.y, b.h, other.y, other.h)
            {
                issues.push(format!("boxes {i} and {j} overlap"));
            }
        }
    }
    if area != width * opt_prime {
        issues.push(format!(
            "boxes cover area {area}, prefix needs {}",
            width * opt_prime
        ));
    }

    let delta_h_opt_prime = &params.delta_h * big(opt_prime);
    let delta_w_w = params.threshold_delta_w(width);
    for (i, b) in oracle.boxes.iter().enumerate() {
        match &b.kind {
            BoxKind::Large => {
                let hit = oracle.status.iter().enumerate().any(|(id, s)| {
                    matches!(s, RectStatus::Contained(bi) if *bi == i)
                        && labels[id] == ClassLabel::Large
                        && {
                            let p = &lifted.placements[id];
                            let rr = &lifted.rounded[id];
                            p.x == b.x && p.y == b.y && rr.w == b.w && rr.h == b.h
                        }
                });
                if !hit {
                    issues.push(format!("large box {i} matches no large rect exactly"));
                }
            }
            BoxKind::HorizontalBox => {
                if cmp_int(b.h, &delta_h_opt_prime) == std::cmp::Ordering::Greater {
                    issues.push(format!("horizontal box {i} is too high: {}", b.h));
                }
            }
            BoxKind::VerticalBox => {
                if cmp_int(b.w, &delta_w_w) == std::cmp::Ordering::Greater {
                    issues.push(format!("vertical box {i} is too wide: {}", b.w));
                }
                if b.y % lifted.grid_step != 0 || b.h % lifted.grid_step != 0 {
                    issues.push(format!("vertical box {i} is not grid aligned"));
                }
            }
            BoxKind::Auxiliary(name) => {
                issues.push(format!("auxiliary box {i} ({name}) inside the prefix"));
            }
        }
    }

    let mut h_cut_area = 0;
    for (id, s) in oracle.status.iter().enumerate() {
        let p = &lifted.placements[id];
        let rr = &lifted.rounded[id];
        let label = labels[id];
        match s {
            RectStatus::Removed => {
                if !matches!(label, ClassLabel::Medium | ClassLabel::Small) {
                    issues.push(format!("rect {id} ({label:?}) wrongly marked removed"));
                }
            }
            RectStatus::Contained(bi) => {
                if *bi >= oracle.boxes.len() {
                    issues.push(format!("rect {id} points at a missing box"));
                    continue;
                }
                let b = &oracle.boxes[*bi];
                let inside = p.x >= b.x
                    && p.y >= b.y
                    && p.x + rr.w <= b.x + b.w
                    && p.y + rr.h <= b.y + b.h;
                if !inside {
                    issues.push(format!("rect {id} is not inside its box {bi}"));
                }
                match (label, &b.kind) {
                    (ClassLabel::Large, BoxKind::Large)
                    | (ClassLabel::Horizontal, BoxKind::HorizontalBox)
                    | (ClassLabel::Tall, BoxKind::VerticalBox)
                    | (ClassLabel::Vertical, BoxKind::VerticalBox) => {}
                    (l, k) => issues.push(format!("rect {id} ({l:?}) sits in a {k:?} box")),
                }
            }
            RectStatus::CutHorizontal => {
                if label != ClassLabel::Horizontal {
                    issues.push(format!("rect {id} ({label:?}) cannot be a horizontal cut"));
                }
                h_cut_area += rr.area();
            }
            RectStatus::CutTall(bi) => {
                if label != ClassLabel::Tall {
                    issues.push(format!("rect {id} ({label:?}) cannot be a tall cut"));
                } else if let Some(b) = oracle.boxes.get(*bi) {
                    if b.kind != BoxKind::VerticalBox {
                        issues.push(format!("tall cut {id} names a non-vertical box"));
                    } else {
                        let y_ok = p.y >= b.y && p.y + rr.h <= b.y + b.h;
                        let crosses = (p.x < b.x && p.x + rr.w > b.x)
                            || (p.x < b.x + b.w && p.x + rr.w > b.x + b.w);
                        if !y_ok || !crosses {
                            issues.push(format!("tall cut {id} is not nicely cut by box {bi}"));
                        }
                    }
                } else {
                    issues.push(format!("tall cut {id} names a missing box"));
                }
            }
            RectStatus::CutVertical => {
                if label != ClassLabel::Vertical {
                    issues.push(format!("rect {id} ({label:?}) cannot be a vertical cut"));
                }
            }
        }
    }

    let h_cut_allowance = big(3) * &params.eps * big(opt_prime) * big(width);
    if big(h_cut_area) > h_cut_allowance {
        issues.push(format!(
            "horizontal cut area {h_cut_area} exceeds the allowance"
        ));
    }

    ConformanceReport {
        box_count: oracle.boxes.len(),
        issues,
        h_cut_area,
        h_cut_allowance,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::classify_instance;
    use crate::instances::{witness_from_tree, StructuredConfig};
    use crate::pipeline::lift::lift_packing;
    use crate::ratio::rat;

    fn params_for(opt: i64) -> ClassParams {
        ClassParams::new(rat(1, 4), rat(1, 3), 2, rat(1, 4), rat(1, 16), opt, 1).unwrap()
    }

    #[test]
    fn single_cut_witness_gives_two_large_boxes() {
        let tree = CutNode::Split {
            axis: CutAxis::Vertical,
            pos: 30,
            low: Box::new(CutNode::Leaf { rect_id: 0 }),
            high: Box::new(CutNode::Leaf { rect_id: 1 }),
        };
        let w = witness_from_tree(80, 80, tree).unwrap();
        let params = params_for(80);
        let labels = classify_instance(&w.instance, &params);
        assert!(labels.iter().all(|&l| l == ClassLabel::Large));
        let lifted = lift_packing(&w.instance, &w.packing, &labels, &params).unwrap();
        let oracle = derive_oracle_from_witness(&w, &lifted, &labels, &params).unwrap();
        let large: Vec<_> = oracle
            .boxes
            .iter()
            .filter(|b| b.kind == BoxKind::Large)
            .collect();
        assert_eq!(large.len(), 2);
        let report = verify_oracle(&oracle, &lifted, &labels, &params, 80);
        assert!(report.ok(), "{:?}", report.issues);
    }

    #[test]
    fn structured_witnesses_yield_conformant_oracles() {
        for seed in 0..30 {
            let cfg = StructuredConfig::new(100, 100, seed);
            let w = crate::instances::gen_structured(&cfg).unwrap();
            let params = params_for(w.h_opt);
            let labels = classify_instance(&w.instance, &params);
            let lifted = lift_packing(&w.instance, &w.packing, &labels, &params).unwrap();
            let oracle = derive_oracle_from_witness(&w, &lifted, &labels, &params).unwrap();
            let report = verify_oracle(&oracle, &lifted, &labels, &params, 100);
            assert!(report.ok(), "seed {seed}: {:?}", report.issues);
        }
    }

    #[test]
    fn checker_flags_a_bogus_partition() {
        let tree = CutNode::Leaf { rect_id: 0 };
        let w = witness_from_tree(40, 40, tree).unwrap();
        let params = params_for(40);
        let labels = classify_instance(&w.instance, &params);
        let lifted = lift_packing(&w.instance, &w.packing, &labels, &params).unwrap();
        // a partition that claims the whole prefix is one horizontal box
        let oracle = BoxPartitionOracle {
            boxes: vec![BoxRegion::new(
                0,
                0,
                40,
                lifted.opt_prime,
                BoxKind::HorizontalBox,
            )],
            status: vec![RectStatus::Contained(0)],
        };
        let report = verify_oracle(&oracle, &lifted, &labels, &params, 40);
        assert!(!report.ok());
    }
}
