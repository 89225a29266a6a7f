//! Exact integer rectangle geometry: instances, packings, containers and the
//! feasibility verifier every other stage's output must pass.
//!
//! All coordinates and side lengths are integers. Overlap is tested on open
//! interiors, so placements sharing only an edge are legal.

use crate::error::{Error, Result};

/// Identifier of an input rectangle. Ids are dense `0..n` within an instance.
pub type RectId = usize;

/// An input rectangle with positive integer sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rect {
    pub id: RectId,
    pub w: i64,
    pub h: i64,
}

impl Rect {
    pub fn new(id: RectId, w: i64, h: i64) -> Rect {
        debug_assert!(w >= 1 && h >= 1);
        Rect { id, w, h }
    }

    pub fn area(&self) -> i64 {
        self.w * self.h
    }
}

/// A strip packing instance: strip width, rectangles, rotation flag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub width: i64,
    pub rects: Vec<Rect>,
    pub allow_rotations: bool,
}

impl Instance {
    /// Validates side positivity, dense ids and the width precondition
    /// (`w <= W`, or `min(w, h) <= W` when rotations are allowed).
    pub fn new(width: i64, rects: Vec<Rect>, allow_rotations: bool) -> Result<Instance> {
        if width < 1 {
            return Err(Error::InvalidInstance(format!(
                "strip width must be >= 1, got {width}"
            )));
        }
        for (i, r) in rects.iter().enumerate() {
            if r.id != i {
                return Err(Error::InvalidInstance(format!(
                    "rect ids must be dense 0..n: position {i} has id {}",
                    r.id
                )));
            }
            if r.w < 1 || r.h < 1 {
                return Err(Error::InvalidInstance(format!(
                    "rect {} has non-positive side {}x{}",
                    r.id, r.w, r.h
                )));
            }
            let fits = if allow_rotations {
                r.w.min(r.h) <= width
            } else {
                r.w <= width
            };
            if !fits {
                return Err(Error::RectTooWide {
                    id: r.id,
                    w: r.w,
                    strip: width,
                });
            }
        }
        Ok(Instance {
            width,
            rects,
            allow_rotations,
        })
    }

    pub fn len(&self) -> usize {
        self.rects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rects.is_empty()
    }

    pub fn rect(&self, id: RectId) -> Option<&Rect> {
        self.rects.get(id)
    }
}

/// One embedded rectangle: bottom-left corner plus rotation flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Placement {
    pub rect_id: RectId,
    pub x: i64,
    pub y: i64,
    pub rotated: bool,
}

impl Placement {
    pub fn new(rect_id: RectId, x: i64, y: i64) -> Placement {
        Placement {
            rect_id,
            x,
            y,
            rotated: false,
        }
    }

    /// Effective width/height after applying the rotation flag.
    pub fn effective_dims(&self, r: &Rect) -> (i64, i64) {
        if self.rotated {
            (r.h, r.w)
        } else {
            (r.w, r.h)
        }
    }
}

/// A (possibly partial) packing of an instance.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Packing {
    pub placements: Vec<Placement>,
}

impl Packing {
    pub fn new(placements: Vec<Placement>) -> Packing {
        Packing { placements }
    }

    pub fn height(&self, inst: &Instance) -> i64 {
        self.placements
            .iter()
            .filter_map(|p| inst.rect(p.rect_id).map(|r| p.y + p.effective_dims(r).1))
            .max()
            .unwrap_or(0)
    }
}

/// Stacking direction contract of a container.
///
/// Contents of a vertical container are stacked left to right, so every
/// vertical line through the interior meets at most one rectangle; a
/// horizontal container is the transpose.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

/// An axis-aligned region with a stacking orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Container {
    pub x: i64,
    pub y: i64,
    pub w: i64,
    pub h: i64,
    pub orientation: Orientation,
}

impl Container {
    pub fn new(x: i64, y: i64, w: i64, h: i64, orientation: Orientation) -> Container {
        Container {
            x,
            y,
            w,
            h,
            orientation,
        }
    }

    pub fn area(&self) -> i64 {
        self.w * self.h
    }

    pub fn contains_region(&self, x: i64, y: i64, w: i64, h: i64) -> bool {
        x >= self.x && y >= self.y && x + w <= self.x + self.w && y + h <= self.y + self.h
    }
}

/// Kind of a region in a box partition of the rounded strip prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoxKind {
    /// Exactly the size of one large rectangle.
    Large,
    /// Height at most `delta_h * OPT'`.
    HorizontalBox,
    /// Width at most `delta_w * W`.
    VerticalBox,
    /// Named auxiliary region (discard box, rounding boxes, ...).
    Auxiliary(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxRegion {
    pub x: i64,
    pub y: i64,
    pub w: i64,
    pub h: i64,
    pub kind: BoxKind,
}

impl BoxRegion {
    pub fn new(x: i64, y: i64, w: i64, h: i64, kind: BoxKind) -> BoxRegion {
        BoxRegion { x, y, w, h, kind }
    }

    pub fn area(&self) -> i64 {
        self.w * self.h
    }
}

/// A single feasibility violation found by [`verify_packing`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    UnknownRect { rect_id: RectId },
    DuplicateRect { rect_id: RectId },
    RotationForbidden { rect_id: RectId },
    OutOfStrip { rect_id: RectId },
    Overlap { a: RectId, b: RectId },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::UnknownRect { rect_id } => write!(f, "unknown rect id {rect_id}"),
            Violation::DuplicateRect { rect_id } => write!(f, "rect {rect_id} placed twice"),
            Violation::RotationForbidden { rect_id } => {
                write!(f, "rect {rect_id} rotated in a rotation-free instance")
            }
            Violation::OutOfStrip { rect_id } => write!(f, "rect {rect_id} out of strip"),
            Violation::Overlap { a, b } => write!(f, "rects {a} and {b} overlap"),
        }
    }
}

/// Result of a full feasibility check. All violations are enumerated, not
/// just the first, so pipeline stages can be debugged from one report.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub violations: Vec<Violation>,
    pub height: i64,
}

impl VerificationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Open-interval overlap test for `[a, a+al)` vs `[b, b+bl)`.
#[inline]
pub fn intervals_overlap(a: i64, al: i64, b: i64, bl: i64) -> bool {
    a < b + bl && b < a + al
}

/// Checks that every placement is in-strip and that placed interiors are
/// pairwise disjoint. Height is the maximum placed top edge (0 if empty).
pub fn verify_packing(inst: &Instance, p: &Packing) -> VerificationReport {
    let mut violations = Vec::new();
    let mut seen = vec![false; inst.len()];
    // Resolved placements that passed the structural checks.
    let mut placed: Vec<(RectId, i64, i64, i64, i64)> = Vec::with_capacity(p.placements.len());
    let mut height = 0;

    for pl in &p.placements {
        let rect = match inst.rect(pl.rect_id) {
            Some(r) => r,
            None => {
                violations.push(Violation::UnknownRect {
                    rect_id: pl.rect_id,
                });
                continue;
            }
        };
        if seen[pl.rect_id] {
            violations.push(Violation::DuplicateRect {
                rect_id: pl.rect_id,
            });
        }
        seen[pl.rect_id] = true;
        if pl.rotated && !inst.allow_rotations {
            violations.push(Violation::RotationForbidden {
                rect_id: pl.rect_id,
            });
        }
        let (we, he) = pl.effective_dims(rect);
        if pl.x < 0 || pl.y < 0 || pl.x + we > inst.width {
            violations.push(Violation::OutOfStrip {
                rect_id: pl.rect_id,
            });
            continue;
        }
        height = height.max(pl.y + he);
        placed.push((pl.rect_id, pl.x, pl.y, we, he));
    }

    // Pairwise interior-disjointness; shared edges are fine.
    for i in 0..placed.len() {
        for j in (i + 1)..placed.len() {
            let (ia, ax, ay, aw, ah) = placed[i];
            let (ib, bx, by, bw, bh) = placed[j];
            if intervals_overlap(ax, aw, bx, bw) && intervals_overlap(ay, ah, by, bh) {
                violations.push(Violation::Overlap { a: ia, b: ib });
            }
        }
    }

    VerificationReport { violations, height }
}

/// Why a container discipline check failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ContainerViolation {
    MemberOutside { rect_id: RectId },
    MemberNotPlaced { rect_id: RectId },
    LineConflict { a: RectId, b: RectId },
}

impl std::fmt::Display for ContainerViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ContainerViolation::MemberOutside { rect_id } => {
                write!(f, "member {rect_id} lies outside the container region")
            }
            ContainerViolation::MemberNotPlaced { rect_id } => {
                write!(f, "member {rect_id} has no placement")
            }
            ContainerViolation::LineConflict { a, b } => write!(
                f,
                "members {a} and {b} share an axis line inside the container"
            ),
        }
    }
}

/// Checks the one-rectangle-per-line property: in a vertical container the
/// members' x-extents must be interior-disjoint (and symmetrically for
/// horizontal containers), with every member inside the region.
pub fn verify_container_discipline(
    inst: &Instance,
    p: &Packing,
    c: &Container,
    members: &[RectId],
) -> std::result::Result<(), ContainerViolation> {
    let mut spans: Vec<(RectId, i64, i64)> = Vec::with_capacity(members.len());
    for &id in members {
        let pl = match p.placements.iter().find(|pl| pl.rect_id == id) {
            Some(pl) => pl,
            None => return Err(ContainerViolation::MemberNotPlaced { rect_id: id }),
        };
        let rect = inst
            .rect(id)
            .ok_or(ContainerViolation::MemberNotPlaced { rect_id: id })?;
        let (we, he) = pl.effective_dims(rect);
        if !c.contains_region(pl.x, pl.y, we, he) {
            return Err(ContainerViolation::MemberOutside { rect_id: id });
        }
        match c.orientation {
            Orientation::Vertical => spans.push((id, pl.x, we)),
            Orientation::Horizontal => spans.push((id, pl.y, he)),
        }
    }
    for i in 0..spans.len() {
        for j in (i + 1)..spans.len() {
            let (ia, a, al) = spans[i];
            let (ib, b, bl) = spans[j];
            if intervals_overlap(a, al, b, bl) {
                return Err(ContainerViolation::LineConflict { a: ia, b: ib });
            }
        }
    }
    Ok(())
}

/// Total area of a set of rectangles.
pub fn area(rects: &[Rect]) -> i64 {
    rects.iter().map(Rect::area).sum()
}

/// Height of a packing (maximum placed top edge, 0 if empty).
pub fn packing_height(inst: &Instance, p: &Packing) -> i64 {
    p.height(inst)
}

/// The two trivial lower bounds: `(h_bound, ceil(total_area / W))`.
///
/// Without rotations `h_bound` is `h_max`. With rotations each rectangle can
/// be placed with height `min(w, h)`, so the sound bound is
/// `max_i min(w_i, h_i)`; the plain `h_max` may exceed the rotated optimum
/// and must not be used there.
pub fn lower_bounds(inst: &Instance) -> (i64, i64) {
    let h_bound = inst
        .rects
        .iter()
        .map(|r| if inst.allow_rotations { r.w.min(r.h) } else { r.h })
        .max()
        .unwrap_or(0);
    let total: i64 = area(&inst.rects);
    let area_bound = (total + inst.width - 1) / inst.width;
    (h_bound, area_bound)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(width: i64, dims: &[(i64, i64)]) -> Instance {
        let rects = dims
            .iter()
            .enumerate()
            .map(|(i, &(w, h))| Rect::new(i, w, h))
            .collect();
        Instance::new(width, rects, false).unwrap()
    }

    #[test]
    fn empty_packing_is_ok_with_height_zero() {
        let i = inst(10, &[]);
        let rep = verify_packing(&i, &Packing::default());
        assert!(rep.ok());
        assert_eq!(rep.height, 0);
    }

    #[test]
    fn interior_overlap_is_reported() {
        let i = inst(10, &[(4, 5), (4, 5)]);
        let p = Packing::new(vec![Placement::new(0, 0, 0), Placement::new(1, 3, 0)]);
        let rep = verify_packing(&i, &p);
        assert!(!rep.ok());
        assert_eq!(rep.violations, vec![Violation::Overlap { a: 0, b: 1 }]);
    }

    #[test]
    fn edge_sharing_placements_verify() {
        let i = inst(10, &[(4, 5), (6, 3)]);
        let p = Packing::new(vec![Placement::new(0, 0, 0), Placement::new(1, 4, 0)]);
        let rep = verify_packing(&i, &p);
        assert!(rep.ok(), "violations: {:?}", rep.violations);
        assert_eq!(rep.height, 5);
    }

    #[test]
    fn unknown_rect_id_is_a_structural_violation() {
        let i = inst(10, &[(4, 5)]);
        let p = Packing::new(vec![Placement::new(7, 0, 0)]);
        let rep = verify_packing(&i, &p);
        assert_eq!(rep.violations, vec![Violation::UnknownRect { rect_id: 7 }]);
    }

    #[test]
    fn out_of_strip_and_rotation_flags() {
        let i = inst(10, &[(8, 2), (3, 3)]);
        let p = Packing::new(vec![
        Placement {
                rect_id: 0,
                x: 5,
                y: 0,
                rotated: false,
            },
            Placement {
                rect_id: 1,
                x: 0,
                y: 0,
                rotated: true,
            },
        ]);
        let rep = verify_packing(&i, &p);
        assert!(rep
            .violations
            .contains(&Violation::OutOfStrip { rect_id: 0 }));
        assert!(rep
            .violations
            .contains(&Violation::RotationForbidden { rect_id: 1 }));
    }

    #[test]
    fn container_discipline_cases() {
        let i = inst(10, &[(4, 5), (4, 5)]);
        let c = Container::new(0, 0, 10, 5, Orientation::Vertical);

        // single rectangle filling the container
        let full = inst(10, &[(10, 5)]);
        let p_full = Packing::new(vec![Placement::new(0, 0, 0)]);
        assert!(verify_container_discipline(&full, &p_full, &c, &[0]).is_ok());

        // two rects side by side at the same y
        let p_side = Packing::new(vec![Placement::new(0, 0, 0), Placement::new(1, 4, 0)]);
        assert!(verify_container_discipline(&i, &p_side, &c, &[0, 1]).is_ok());

        // stacked rects share vertical lines
        let tall = Container::new(0, 0, 10, 10, Orientation::Vertical);
        let p_stack = Packing::new(vec![Placement::new(0, 0, 0), Placement::new(1, 0, 5)]);
        assert_eq!(
            verify_container_discipline(&i, &p_stack, &tall, &[0, 1]),
            Err(ContainerViolation::LineConflict { a: 0, b: 1 })
        );

        // member outside the region
        let small = Container::new(0, 0, 3, 3, Orientation::Vertical);
        assert_eq!(
            verify_container_discipline(&i, &p_side, &small, &[0]),
            Err(ContainerViolation::MemberOutside { rect_id: 0 })
        );
    }

    #[test]
    fn lower_bound_examples() {
        assert_eq!(lower_bounds(&inst(10, &[(3, 7)])), (7, 3));
        assert_eq!(lower_bounds(&inst(10, &[])), (0, 0));
        assert_eq!(lower_bounds(&inst(10, &[(10, 4), (10, 4)])), (4, 8));
    }

    #[test]
    fn rotated_lower_bound_uses_min_side() {
        let rects = vec![Rect::new(0, 3, 9), Rect::new(1, 5, 4)];
        let i = Instance::new(10, rects, true).unwrap();
        // (3,9) can lie down with height 3; (5,4) gives min side 4.
        assert_eq!(lower_bounds(&i), (4, 5));
    }

    #[test]
    fn dense_ids_are_enforced() {
        let r = Instance::new(10, vec![Rect::new(1, 2, 2)], false);
        assert!(r.is_err());
    }
}
