//! Guided mode: witness packing in, certified final layout out.
//!
//! Stage order: parameter selection, height rounding and lift, box
//! partition (derived or supplied, then verified), cut extraction,
//! per-vertical-box processing, discard-box assembly, horizontal grouping,
//! medium packing, container inventory, exact knapsack assignment, small
//! packing, final assembly with an itemized height certificate.

use num::rational::BigRational;
use num::Zero;

use crate::classify::{
    audit_constraints, classify_instance, select_params, ClassLabel, ClassParams,
};
use crate::engine::horizontal::group_horizontal;
use crate::engine::medium::pack_medium;
use crate::engine::slices::{integralize, rearrange_unit_slices, slice_vertical};
use crate::engine::small::pack_small;
use crate::engine::vertical::process_box;
use crate::engine::{EngineParams, TallPiece, UnitSlice, VerticalBoxState};
use crate::error::{Error, Result};
use crate::geometry::{
    verify_packing, Container, Orientation, Packing, Placement, Rect, RectId,
};
use crate::instances::{GuillotineWitness, Region};
use crate::knapsack::{build_sizes, realize_assignment, solve_assignment};
use crate::pipeline::lift::{lift_packing, verify_lift, LiftedPacking};
use crate::pipeline::oracle::{
    derive_oracle_from_witness, verify_oracle, BoxPartitionOracle, RectStatus,
};
use crate::pipeline::{PipelineConfig, Strictness};
use crate::ratio::{big, ceil_to_i64, floor_to_i64, format_ratio, to_f64};
use crate::shelf::nfdh_strip;

/// Which part of the final layout a container belongs to. Origins are
/// resolved once all strip heights are known.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Home {
    /// Inside the rounded prefix, absolute coordinates.
    Base,
    MediumHor,
    HCut,
    MediumVer,
    VCut,
    VRound,
    Disc,
}

#[derive(Debug, Clone)]
struct TaggedContainer {
    container: Container,
    home: Home,
}

/// Itemized height certificate of a guided run.
#[derive(Debug, Clone)]
pub struct CertReport {
    pub opt: i64,
    pub opt_prime: i64,
    pub eps: BigRational,
    pub alpha: BigRational,
    /// `max(alpha, 1 - 2*alpha)`.
    pub max_term: BigRational,
    /// Itemized auxiliary strips: name and allocated height.
    pub strips: Vec<(String, i64)>,
    pub band_height: i64,
    pub achieved: i64,
    /// Sum of the itemized epsilon terms, exact.
    pub c_itemized: BigRational,
    /// `achieved <= (1 + max_term + c*eps) * opt`, exact.
    pub holds: bool,
    pub warnings: Vec<String>,
}

impl CertReport {
    pub fn c_as_f64(&self) -> f64 {
        to_f64(&self.c_itemized)
    }
}

/// Plain-text run report: `key: value` lines.
#[derive(Debug, Clone, Default)]
pub struct RunSummary {
    pub lines: Vec<(String, String)>,
}

impl RunSummary {
    fn push(&mut self, key: &str, value: impl std::fmt::Display) {
        self.lines.push((key.to_string(), value.to_string()));
    }
}

impl std::fmt::Display for RunSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (k, v) in &self.lines {
            writeln!(f, "{k}: {v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct GuidedRun {
    pub packing: Packing,
    pub cert: CertReport,
    pub summary: RunSummary,
    pub params: ClassParams,
}

fn min_max_heights(slices: &[UnitSlice]) -> Option<(i64, i64)> {
    let min = slices.iter().map(|s| s.h).min()?;
    let max = slices.iter().map(|s| s.h).max()?;
    Some((min, max))
}

/// Containers for the slices inside one region via the unit-slice
/// regrouping, with `d` and `q` taken from the content itself.
fn containerize_region(region: Region, slices: &[UnitSlice]) -> Result<Vec<Container>> {
    if slices.is_empty() {
        return Ok(Vec::new());
    }
    let (min_h, _) = min_max_heights(slices).unwrap();
    let d = (region.h + min_h - 1) / min_h;
    let mut hs: Vec<i64> = slices.iter().map(|s| s.h).collect();
    hs.sort_unstable();
    hs.dedup();
    let out = rearrange_unit_slices(slices, region, d, hs.len() as i64)?;
    Ok(out.containers)
}

/// Everything the per-box engine contributes to the container inventory.
struct EngineYield {
    /// Containers holding whole tall rectangles (the homogeneous runs).
    tall_containers: Vec<Container>,
    /// Containers formed from sliced vertical content; these are the targets
    /// of the fractional-to-integral conversion.
    slice_containers: Vec<Container>,
    /// Residual discard stacks: `(source box x, stacks)`.
    residual: Vec<(i64, Vec<crate::engine::ResidualStack>)>,
    good_counts: Vec<(i64, usize, bool)>, // (width, good, bound ok)
}

fn run_vertical_boxes(
    oracle: &BoxPartitionOracle,
    lifted: &LiftedPacking,
    labels: &[ClassLabel],
    params: &ClassParams,
) -> Result<EngineYield> {
    let engine_params = EngineParams::from_class(params);
    let mut tall_containers = Vec::new();
    let mut slice_containers = Vec::new();
    let mut residual = Vec::new();
    let mut good_counts = Vec::new();

    let mut vboxes: Vec<(usize, Region)> = oracle
        .vertical_boxes()
        .map(|(i, b)| (i, Region::new(b.x, b.y, b.w, b.h)))
        .collect();
    vboxes.sort_by_key(|&(_, r)| (r.y, r.x));

    for (bi, region) in vboxes {
        let mut tall = Vec::new();
        let mut tall_cut = Vec::new();
        let mut members = Vec::new();
        for (id, s) in oracle.status.iter().enumerate() {
            let p = &lifted.placements[id];
            let rr = &lifted.rounded[id];
            match s {
                RectStatus::Contained(b) if *b == bi => match labels[id] {
                    ClassLabel::Tall => tall.push(TallPiece {
                        rect_id: id,
                        x: p.x,
                        y: p.y,
                        w: rr.w,
                        h: rr.h,
                    }),
                    ClassLabel::Vertical => members.push((*rr, *p)),
                    other => {
                        return Err(Error::Internal(format!(
                            "{other:?} rect {id} assigned to vertical box {bi}"
                        )))
                    }
                },
                RectStatus::CutTall(b) if *b == bi => {
                    let x = p.x.max(region.x);
                    let right = (p.x + rr.w).min(region.x + region.w);
                    tall_cut.push(TallPiece {
                        rect_id: id,
                        x,
                        y: p.y,
                        w: right - x,
                        h: rr.h,
                    });
                }
                _ => {}
            }
        }
        let state = VerticalBoxState {
            region,
            params: engine_params.clone(),
            tall,
            tall_cut,
            slices: slice_vertical(&members),
        };
        let (rearranged, outcome) = process_box(&state)?;

        // tall runs are already containers; pseudo/corner regions and the
        // repacked empty sub-boxes regroup their slices
        for sb in &rearranged.subboxes {
            match sb.kind {
                crate::engine::SubBoxKind::TallRun => {
                    tall_containers.push(Container::new(
                        sb.region.x,
                        sb.region.y,
                        sb.region.w,
                        sb.region.h,
                        Orientation::Vertical,
                    ));
                }
                crate::engine::SubBoxKind::PseudoRun | crate::engine::SubBoxKind::Corner => {
                    let inside: Vec<UnitSlice> = rearranged
                        .state
                        .slices
                        .iter()
                        .filter(|s| {
                            s.x >= sb.region.x
                                && s.x < sb.region.x + sb.region.w
                                && s.y >= sb.region.y
                                && s.y + s.h <= sb.region.y + sb.region.h
                        })
                        .copied()
                        .collect();
                    slice_containers.extend(containerize_region(sb.region, &inside)?);
                }
            }
        }
        for (rgn, slices) in &outcome.repacked {
            slice_containers.extend(containerize_region(*rgn, slices)?);
        }

        let bound_ok = outcome.good_bound_holds(&engine_params, region.w);
        good_counts.push((region.w, outcome.good_count, bound_ok));
        if !outcome.residual.is_empty() {
            residual.push((region.x, outcome.residual));
        }
    }

    Ok(EngineYield {
        tall_containers,
        slice_containers,
        residual,
        good_counts,
    })
}

/// Lays the residual stacks into the discard region: each source box maps
/// to a `(1-gamma)`-scaled column slot, stacks pile bottom-up per column.
/// Returns the disc-relative slices and the used width/height.
fn assemble_disc(
    residual: &[(i64, Vec<crate::engine::ResidualStack>)],
    params: &ClassParams,
    warnings: &mut Vec<String>,
    width: i64,
    opt_prime: i64,
) -> (Vec<UnitSlice>, i64, i64) {
    let one_minus_gamma = big(1) - &params.gamma;
    let mut slices: Vec<UnitSlice> = Vec::new();
    let mut fill: std::collections::BTreeMap<i64, i64> = std::collections::BTreeMap::new();
    for (box_x, stacks) in residual {
        let base = ceil_to_i64(&(&one_minus_gamma * big(*box_x)));
        for (k, stack) in stacks.iter().enumerate() {
            let col = base + k as i64;
            let bump = fill.entry(col).or_insert(0);
            for s in &stack.slices {
                slices.push(UnitSlice {
                    parent: s.parent,
                    x: col,
                    y: *bump,
                    h: s.h,
                });
                *bump += s.h;
            }
        }
    }
    let disc_w = fill.keys().max().map(|&c| c + 1).unwrap_or(0);
    let disc_h = fill.values().max().copied().unwrap_or(0);
    let w_target = floor_to_i64(&(&one_minus_gamma * big(width)));
    if disc_w > w_target {
        warnings.push(format!(
            "discard box width {disc_w} exceeds the (1-gamma) share {w_target}"
        ));
    }
    let h_target = ceil_to_i64(
        &((big(1) + &params.eps - big(2) * &params.alpha) * big(opt_prime)),
    );
    if disc_h > h_target {
        warnings.push(format!(
            "discard box height {disc_h} exceeds its target {h_target}"
        ));
    }
    (slices, disc_w, disc_h)
}

/// Runs guided mode on a witness. When `oracle` is `None`, the partition
/// is derived from the witness cut tree. The result contains the final
/// feasible packing of every rectangle and the itemized certificate.
pub fn run_guided(
    witness: &GuillotineWitness,
    oracle: Option<BoxPartitionOracle>,
    cfg: &PipelineConfig,
) -> Result<GuidedRun> {
    witness.validate()?;
    let inst = &witness.instance;
    let width = inst.width;
    let opt = witness.h_opt;
    let mut warnings: Vec<String> = Vec::new();
    let mut summary = RunSummary::default();

    // parameters and classification
    let params = select_params(
        inst,
        opt,
        cfg.eps.clone(),
        cfg.alpha.clone(),
        cfg.k,
        &cfg.f,
        cfg.ladder_cap,
    )?;
    let labels = classify_instance(inst, &params);
    let mut class_counts = [0usize; 6];
    for l in &labels {
        class_counts[match l {
            ClassLabel::Large => 0,
            ClassLabel::Tall => 1,
            ClassLabel::Vertical => 2,
            ClassLabel::Horizontal => 3,
            ClassLabel::Small => 4,
            ClassLabel::Medium => 5,
        }] += 1;
    }
    summary.push("rects", inst.len());
    summary.push("ladder_rung", params.ladder_rung);
    summary.push(
        "classes L/T/V/H/S/M",
        format!(
            "{}/{}/{}/{}/{}/{}",
            class_counts[0],
            class_counts[1],
            class_counts[2],
            class_counts[3],
            class_counts[4],
            class_counts[5]
        ),
    );

    // rounding lift
    let lifted = lift_packing(inst, &witness.packing, &labels, &params)?;
    verify_lift(inst, &lifted)?;
    let opt_prime = lifted.opt_prime;
    summary.push("opt", opt);
    summary.push("opt_prime", opt_prime);
    summary.push("grid_step", lifted.grid_step);

    // box partition, derived or supplied, always verified
    let oracle = match oracle {
        Some(o) => o,
        None => derive_oracle_from_witness(witness, &lifted, &labels, &params)?,
    };
    let conformance = verify_oracle(&oracle, &lifted, &labels, &params, width);
    if !conformance.ok() {
        return Err(Error::OracleRejected(conformance.issues.join("; ")));
    }
    summary.push("boxes", conformance.box_count);

    // cut extraction
    let h_cut_ids: Vec<RectId> = oracle
        .status
        .iter()
        .enumerate()
        .filter(|(_, s)| matches!(s, RectStatus::CutHorizontal))
        .map(|(id, _)| id)
        .collect();
    let h_cut_rects: Vec<Rect> = h_cut_ids.iter().map(|&id| inst.rects[id]).collect();
    let (_, h_cut_layout) = nfdh_strip(&h_cut_rects, width)?;
    let h_cut_height = h_cut_layout.used_extent();

    let v_cut_ids: Vec<RectId> = oracle
        .status
        .iter()
        .enumerate()
        .filter(|(_, s)| matches!(s, RectStatus::CutVertical))
        .map(|(id, _)| id)
        .collect();
    let v_cut_width: i64 = v_cut_ids.iter().map(|&id| lifted.rounded[id].w).sum();
    let v_cut_height: i64 = v_cut_ids
        .iter()
        .map(|&id| lifted.rounded[id].h)
        .max()
        .unwrap_or(0);

    // per-box engine
    let engine = run_vertical_boxes(&oracle, &lifted, &labels, &params)?;
    summary.push("vertical_boxes", engine.good_counts.len());
    if !engine.good_counts.is_empty() {
        let worst = engine
            .good_counts
            .iter()
            .map(|&(w, g, _)| g as f64 / w as f64)
            .fold(f64::INFINITY, f64::min);
        summary.push("min_good_fraction", format!("{worst:.4}"));
        if let Some((w, g, _)) = engine.good_counts.iter().find(|&&(_, _, ok)| !ok) {
            return Err(Error::Internal(format!(
                "repacking bound failed: {g} good of {w} columns"
            )));
        }
    }

    // discard box content
    let (disc_slices, disc_w, disc_h) =
        assemble_disc(&engine.residual, &params, &mut warnings, width, opt_prime);
    let disc_containers = containerize_region(Region::new(0, 0, disc_w, disc_h), &disc_slices)?;

    // medium packing (original dimensions)
    let mediums: Vec<Rect> = labels
        .iter()
        .enumerate()
        .filter(|(_, l)| **l == ClassLabel::Medium)
        .map(|(id, _)| inst.rects[id])
        .collect();
    let medium = pack_medium(&mediums, width, &params)?;
    if medium.hor_height > medium.hor_target {
        warnings.push(format!(
            "medium strip height {} exceeds its target {}",
            medium.hor_height, medium.hor_target
        ));
    }
    if medium.ver_width > medium.ver_target {
        warnings.push(format!(
            "medium column width {} exceeds its target {}",
            medium.ver_width, medium.ver_target
        ));
    }

    // horizontal grouping over the in-prefix boxes plus the cut strip,
    // the latter addressed provisionally just above the prefix
    let h_ids: Vec<RectId> = labels
        .iter()
        .enumerate()
        .filter(|(_, l)| **l == ClassLabel::Horizontal)
        .map(|(id, _)| id)
        .collect();
    let h_rects: Vec<Rect> = h_ids.iter().map(|&id| inst.rects[id]).collect();
    let mut h_placements: Vec<Placement> = Vec::with_capacity(h_ids.len());
    for &id in &h_ids {
        match oracle.status[id] {
            RectStatus::Contained(_) => h_placements.push(lifted.placements[id]),
            RectStatus::CutHorizontal => {
                let p = h_cut_layout
                    .placements()
                    .into_iter()
                    .find(|p| p.rect_id == id)
                    .expect("cut rect placed in the cut strip");
                h_placements.push(Placement::new(id, p.x, p.y + opt_prime));
            }
            _ => unreachable!("horizontal rects are contained or cut"),
        }
    }
    let mut h_boxes: Vec<Region> = oracle
        .boxes
        .iter()
        .filter(|b| b.kind == crate::geometry::BoxKind::HorizontalBox)
        .map(|b| Region::new(b.x, b.y, b.w, b.h))
        .collect();
    if h_cut_height > 0 {
        h_boxes.push(Region::new(0, opt_prime, width, h_cut_height));
    }
    let grouping = group_horizontal(&h_rects, &h_placements, &h_boxes, &params)?;
    summary.push("h_groups", grouping.group_count);
    summary.push("h_round_box", grouping.round_box.len());

    // container inventory
    let mut tagged: Vec<TaggedContainer> = Vec::new();
    let push = |c: Container, home: Home, tagged: &mut Vec<TaggedContainer>| {
        tagged.push(TaggedContainer { container: c, home });
    };

    for (id, s) in oracle.status.iter().enumerate() {
        match s {
            RectStatus::Contained(_) if labels[id] == ClassLabel::Large => {
                let p = &lifted.placements[id];
                let rr = &lifted.rounded[id];
                push(
                    Container::new(p.x, p.y, rr.w, rr.h, Orientation::Vertical),
                    Home::Base,
                    &mut tagged,
                );
            }
            RectStatus::CutTall(_) => {
                let p = &lifted.placements[id];
                let rr = &lifted.rounded[id];
                push(
                    Container::new(p.x, p.y, rr.w, rr.h, Orientation::Vertical),
                    Home::Base,
                    &mut tagged,
                );
            }
            _ => {}
        }
    }
    for c in engine.tall_containers.iter().chain(&engine.slice_containers) {
        push(*c, Home::Base, &mut tagged);
    }
    for c in &disc_containers {
        push(*c, Home::Disc, &mut tagged);
    }
    for c in &grouping.containers {
        if c.y >= opt_prime {
            push(
                Container::new(c.x, c.y - opt_prime, c.w, c.h, c.orientation),
                Home::HCut,
                &mut tagged,
            );
        } else {
            push(*c, Home::Base, &mut tagged);
        }
    }
    for c in medium.hor_layout.shelf_containers(width) {
        push(c, Home::MediumHor, &mut tagged);
    }
    let alpha_opt_floor = floor_to_i64(&params.threshold_alpha_opt()).max(1);
    for c in medium.ver_layout.shelf_containers(alpha_opt_floor) {
        push(c, Home::MediumVer, &mut tagged);
    }
    if v_cut_width > 0 {
        push(
            Container::new(0, 0, v_cut_width, v_cut_height, Orientation::Vertical),
            Home::VCut,
            &mut tagged,
        );
    }

    // structural conversion check for the sliced vertical rectangles,
    // sizing the rounding pile
    let v_ids: Vec<RectId> = oracle
        .status
        .iter()
        .enumerate()
        .filter(|(id, s)| {
            matches!(s, RectStatus::Contained(_)) && labels[*id] == ClassLabel::Vertical
        })
        .map(|(id, _)| id)
        .collect();
    let v_rounded: Vec<Rect> = v_ids.iter().map(|&id| lifted.rounded[id]).collect();
    let v_containers: Vec<Container> = engine
        .slice_containers
        .iter()
        .chain(&disc_containers)
        .copied()
        .collect();
    let (v_round_w, v_round_h) = if v_rounded.is_empty() {
        (0, 0)
    } else {
        let conv = integralize(&v_rounded, &v_containers, Orientation::Vertical)?;
        let w: i64 = conv
            .discarded
            .iter()
            .map(|&id| lifted.rounded[id].w)
            .sum();
        let h = conv
            .discarded
            .iter()
            .map(|&id| lifted.rounded[id].h)
            .max()
            .unwrap_or(0);
        summary.push("v_round_discards", conv.discarded.len());
        (w, h)
    };
    if v_round_w > 0 {
        push(
            Container::new(0, 0, v_round_w, v_round_h, Orientation::Vertical),
            Home::VRound,
            &mut tagged,
        );
    }

    // parameter audit with the realized counts
    let k_b = conformance.box_count as i64;
    let k_f = tagged.iter().filter(|t| t.home == Home::Base).count() as i64;
    let audit = audit_constraints(&params, k_b, k_f);
    if !audit.all_satisfied() {
        match cfg.strictness {
            Strictness::Strict => {
                return Err(Error::StrictConstraint(
                    audit
                        .violations()
                        .iter()
                        .map(|r| r.name.to_string())
                        .collect::<Vec<_>>()
                        .join("; "),
                ))
            }
            Strictness::Relaxed => {
                for v in audit.violations() {
                    warnings.push(format!("parameter constraint outside range: {}", v.name));
                }
            }
        }
    }
    summary.push("containers_in_prefix", k_f);
    summary.push("containers_total", tagged.len());

    // area budget of the in-prefix containers for non-small content
    let base_area: i64 = tagged
        .iter()
        .filter(|t| t.home == Home::Base)
        .map(|t| t.container.area())
        .sum();
    let non_small_area: i64 = inst
        .rects
        .iter()
        .zip(&labels)
        .filter(|(_, l)| **l != ClassLabel::Small)
        .map(|(r, _)| lifted.rounded[r.id].area())
        .sum();
    if base_area > non_small_area {
        warnings.push(format!(
            "prefix containers cover {base_area} > rounded non-small area {non_small_area}"
        ));
    }

    // strip heights (lemma values, widened when content demands it)
    let eps_opt = &params.eps * big(opt);
    let m_hor_alloc = if medium.hor_rects.is_empty() {
        0
    } else {
        let lemma = ceil_to_i64(&(big(3) * &eps_opt));
        if medium.hor_height > lemma {
            medium.hor_height
        } else {
            lemma
        }
    };
    let round_pile_height: i64 = grouping
        .round_box
        .iter()
        .map(|&id| inst.rects[id].h)
        .sum();
    let h_round_alloc = if grouping.round_box.is_empty() {
        0
    } else {
        let lemma = ceil_to_i64(&(big(4) * &eps_opt));
        if round_pile_height > lemma {
            warnings.push(format!(
                "rounding pile {round_pile_height} exceeds its target {lemma}"
            ));
            round_pile_height
        } else {
            lemma
        }
    };
    let h_cut_alloc = h_cut_height;

    // small packing against the in-prefix containers
    let smalls: Vec<Rect> = labels
        .iter()
        .enumerate()
        .filter(|(_, l)| **l == ClassLabel::Small)
        .map(|(id, _)| inst.rects[id])
        .collect();
    let base_containers: Vec<Container> = tagged
        .iter()
        .filter(|t| t.home == Home::Base)
        .map(|t| t.container)
        .collect();
    let small = pack_small(&smalls, &base_containers, width, opt_prime, &params)?;
    summary.push("small_in_grid", small.grid_placements.len());
    summary.push("small_overflow", small.overflow_rects.len());
    let b_s_alloc = if small.overflow_rects.is_empty() {
        0
    } else {
        let lemma = ceil_to_i64(&(&params.eps * big(opt_prime)));
        if small.overflow_height > lemma {
            warnings.push(format!(
                "small overflow {} exceeds its target {lemma}",
                small.overflow_height
            ));
            small.overflow_height
        } else {
            lemma
        }
    };

    // band layout: medium column, cut pile and rounding pile on the left,
    // the discard box right-justified
    let m_ver_w = medium.ver_width;
    let band_left_w = m_ver_w + v_cut_width + v_round_w;
    let gamma_w = &params.gamma * big(width);
    if big(band_left_w) > gamma_w {
        warnings.push(format!(
            "left band group width {band_left_w} exceeds gamma*W = {}",
            format_ratio(&gamma_w)
        ));
    }
    let left_heights = [
        if m_ver_w > 0 { alpha_opt_floor } else { 0 },
        v_cut_height,
        v_round_h,
    ];
    let left_h = left_heights.into_iter().max().unwrap_or(0);
    let disc_fits_beside = band_left_w + disc_w <= width;
    let (disc_dx, disc_dy) = if disc_fits_beside {
        (width - disc_w, 0)
    } else {
        warnings.push("discard box stacked above the left band group".into());
        (0, left_h)
    };
    let band_height = if disc_fits_beside {
        left_h.max(disc_h)
    } else {
        left_h + disc_h
    };

    // resolve home origins
    let y_m_hor = opt_prime;
    let y_h_round = y_m_hor + m_hor_alloc;
    let y_h_cut = y_h_round + h_round_alloc;
    let y_b_s = y_h_cut + h_cut_alloc;
    let y_band = y_b_s + b_s_alloc;
    let origin = |home: Home| -> (i64, i64) {
        match home {
            Home::Base => (0, 0),
            Home::MediumHor => (0, y_m_hor),
            Home::HCut => (0, y_h_cut),
            Home::MediumVer => (0, y_band),
            Home::VCut => (m_ver_w, y_band),
            Home::VRound => (m_ver_w + v_cut_width, y_band),
            Home::Disc => (disc_dx, y_band + disc_dy),
        }
    };

    let mut final_containers: Vec<Container> = Vec::with_capacity(tagged.len() + 1);
    for t in &tagged {
        let (dx, dy) = origin(t.home);
        final_containers.push(Container::new(
            t.container.x + dx,
            t.container.y + dy,
            t.container.w,
            t.container.h,
            t.container.orientation,
        ));
    }
    // the rounding pile is itself a container
    if !grouping.round_box.is_empty() {
        final_containers.push(Container::new(
            0,
            y_h_round,
            width,
            h_round_alloc,
            Orientation::Horizontal,
        ));
    }

    // exact assignment of every non-small rectangle
    let item_ids: Vec<RectId> = labels
        .iter()
        .enumerate()
        .filter(|(_, l)| **l != ClassLabel::Small)
        .map(|(id, _)| id)
        .collect();
    let items: Vec<Rect> = item_ids.iter().map(|&id| lifted.rounded[id]).collect();
    let ki = build_sizes(&items, &final_containers, false, None, width, 0);
    let assignment = solve_assignment(&ki, cfg.state_cap)?
        .ok_or_else(|| Error::Infeasible("guided container inventory rejects its own witness".into()))?;
    let realized = realize_assignment(&ki, &assignment, &items, &final_containers, false);

    // assemble the final packing
    let mut placements = realized.placements;
    placements.extend(small.grid_placements.iter().copied());
    for shelf in &small.overflow_layout.shelves {
        for p in &shelf.members {
            placements.push(Placement::new(p.rect_id, p.x, p.y + y_b_s));
        }
    }
    let packing = Packing::new(placements);
    let report = verify_packing(inst, &packing);
    if !report.ok() {
        return Err(Error::Internal(format!(
            "final packing is infeasible: {}",
            report
                .violations
                .iter()
                .take(5)
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join("; ")
        )));
    }
    if packing.placements.len() != inst.len() {
        return Err(Error::Internal(format!(
            "{} placements for {} rectangles",
            packing.placements.len(),
            inst.len()
        )));
    }
    let achieved = report.height;

    // itemized certificate
    let strips = vec![
        ("medium_strip".to_string(), m_hor_alloc),
        ("rounding_strip".to_string(), h_round_alloc),
        ("cut_strip".to_string(), h_cut_alloc),
        ("small_strip".to_string(), b_s_alloc),
    ];
    let one = big(1);
    let max_term = {
        let other = &one - big(2) * &params.alpha;
        if params.alpha >= other {
            params.alpha.clone()
        } else {
            other
        }
    };
    let strip_sum: i64 = strips.iter().map(|(_, h)| h).sum();
    // an absent band returns its whole allowance to the itemization; a
    // present band only charges what it exceeds
    let band_excess = if band_height == 0 {
        -(&max_term * big(opt))
    } else {
        (big(band_height) - &max_term * big(opt)).max(BigRational::zero())
    };
    let c_itemized =
        (big(opt_prime - opt) + big(strip_sum) + band_excess) / (&params.eps * big(opt));
    let rhs = (&one + &max_term + (&c_itemized * &params.eps)) * big(opt);
    let holds = big(achieved) <= rhs;

    summary.push("achieved_height", achieved);
    summary.push("band_height", band_height);
    summary.push("certificate_c", format!("{:.4}", to_f64(&c_itemized)));
    summary.push("certificate_holds", holds);
    for w in &warnings {
        summary.push("warning", w);
    }

    let cert = CertReport {
        opt,
        opt_prime,
        eps: params.eps.clone(),
        alpha: params.alpha.clone(),
        max_term,
        strips,
        band_height,
        achieved,
        c_itemized,
        holds,
        warnings,
    };

    Ok(GuidedRun {
        packing,
        cert,
        summary,
        params,
    })
}
