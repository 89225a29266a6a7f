//! The structural machinery: vertical-box processing (tall normalization,
//! stripe profiles, sub-box rearrangement, good-stripe repacking),
//! unit-slice container formation, fractional-to-integral conversion,
//! horizontal linear grouping, and the medium/small packers.

pub mod horizontal;
pub mod medium;
pub mod slices;
pub mod small;
pub mod vertical;

use num::rational::BigRational;

use crate::classify::ClassParams;
use crate::error::{Error, Result};
use crate::geometry::RectId;
use crate::instances::Region;
use crate::ratio::big;

/// Width-1 vertical slice of a rectangle, in absolute coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnitSlice {
    pub parent: RectId,
    pub x: i64,
    pub y: i64,
    pub h: i64,
}

/// A tall rectangle (or the in-box part of a nicely cut one), absolute
/// coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TallPiece {
    pub rect_id: RectId,
    pub x: i64,
    pub y: i64,
    pub w: i64,
    pub h: i64,
}

impl TallPiece {
    pub fn top(&self) -> i64 {
        self.y + self.h
    }

    pub fn right(&self) -> i64 {
        self.x + self.w
    }

    pub fn covers_column(&self, x: i64) -> bool {
        x >= self.x && x < self.right()
    }
}

/// Numeric context for one vertical box run.
#[derive(Debug, Clone)]
pub struct EngineParams {
    pub grid_step: i64,
    pub opt: i64,
    pub eps: BigRational,
    pub alpha: BigRational,
    pub gamma: BigRational,
}

impl EngineParams {
    pub fn from_class(p: &ClassParams) -> EngineParams {
        EngineParams {
            grid_step: crate::classify::rounding_grid(p),
            opt: p.opt,
            eps: p.eps.clone(),
            alpha: p.alpha.clone(),
            gamma: p.gamma.clone(),
        }
    }

    /// The good-column fraction guaranteed by the repacking argument:
    /// `gamma / (1 + eps - 2*alpha + gamma)`.
    pub fn good_fraction(&self) -> BigRational {
        let denom = big(1) + &self.eps - big(2) * &self.alpha + &self.gamma;
        &self.gamma / denom
    }
}

/// One vertical box with its content, before or after normalization.
#[derive(Debug, Clone)]
pub struct VerticalBoxState {
    pub region: Region,
    pub params: EngineParams,
    /// Tall rectangles fully inside the box (movable).
    pub tall: Vec<TallPiece>,
    /// In-box parts of tall rectangles nicely cut by the box sides (fixed).
    pub tall_cut: Vec<TallPiece>,
    /// Sliced vertical content.
    pub slices: Vec<UnitSlice>,
}

impl VerticalBoxState {
    pub fn top(&self) -> i64 {
        self.region.y + self.region.h
    }

    pub fn columns(&self) -> i64 {
        self.region.w
    }

    /// All tall pieces, movable first.
    pub fn pieces(&self) -> impl Iterator<Item = &TallPiece> {
        self.tall.iter().chain(self.tall_cut.iter())
    }

    /// Structural checks: grid alignment, containment, the two-tall-per-line
    /// limit, cut pieces hugging the box sides.
    pub fn validate(&self) -> Result<()> {
        let r = self.params.grid_step;
        if r < 1 {
            return Err(Error::Precondition("grid step must be >= 1".into()));
        }
        if self.region.y % r != 0 || self.region.h % r != 0 {
            return Err(Error::Precondition(format!(
                "box y={} h={} must be multiples of the grid step {r}",
                self.region.y, self.region.h
            )));
        }
        for t in self.pieces() {
            if t.h % r != 0 {
                return Err(Error::Precondition(format!(
                    "tall piece {} height {} not a multiple of {r}",
                    t.rect_id, t.h
                )));
            }
            if t.x < self.region.x
                || t.right() > self.region.x + self.region.w
                || t.y < self.region.y
                || t.top() > self.top()
            {
                return Err(Error::Precondition(format!(
                    "tall piece {} sticks out of the box",
                    t.rect_id
                )));
            }
        }
        for t in &self.tall_cut {
            if t.y % r != 0 {
                return Err(Error::Precondition(format!(
                    "cut piece {} y={} not grid aligned",
                    t.rect_id, t.y
                )));
            }
            if t.x != self.region.x && t.right() != self.region.x + self.region.w {
                return Err(Error::Precondition(format!(
                    "cut piece {} must touch the left or right box side",
                    t.rect_id
                )));
            }
        }
        for col in self.region.x..self.region.x + self.region.w {
            let n = self.pieces().filter(|t| t.covers_column(col)).count();
            if n > 2 {
                return Err(Error::Precondition(format!(
                    "column {col} is crossed by {n} tall pieces (max 2)"
                )));
            }
        }
        for s in &self.slices {
            if s.x < self.region.x
                || s.x >= self.region.x + self.region.w
                || s.y < self.region.y
                || s.y + s.h > self.top()
            {
                return Err(Error::Precondition(format!(
                    "slice of rect {} out of the box",
                    s.parent
                )));
            }
        }
        Ok(())
    }
}

/// Which box edge an item hangs from after normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Anchor {
    Bottom,
    Top,
}

/// A pseudo rectangle: a maximal unit-width stripe touching a box edge,
/// carrying whatever slices lie inside it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PseudoItem {
    /// Absolute column.
    pub col: i64,
    pub y: i64,
    pub h: i64,
    pub anchor: Anchor,
    /// Pinned corner content (never moved by the rearrangement).
    pub corner: bool,
}

/// Stripe decomposition of a normalized box.
#[derive(Debug, Clone)]
pub struct StripeDecomposition {
    /// Free heights per column (0 where degenerate), index = column offset.
    pub f: Vec<i64>,
    /// The free stripe per column, if any: `(y, h)`.
    pub free: Vec<Option<(i64, i64)>>,
    pub pseudo: Vec<PseudoItem>,
    pub corner_boxes: Vec<Region>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubBoxKind {
    TallRun,
    PseudoRun,
    Corner,
}

#[derive(Debug, Clone)]
pub struct SubBox {
    pub region: Region,
    pub kind: SubBoxKind,
}

/// Result of the horizontal rearrangement into homogeneous sub-boxes.
#[derive(Debug, Clone)]
pub struct RearrangedBox {
    pub state: VerticalBoxState,
    pub stripes: StripeDecomposition,
    pub subboxes: Vec<SubBox>,
    /// Sub-box count bound for these parameters, when small enough to
    /// evaluate.
    pub subbox_budget: Option<num::BigInt>,
}

/// One bad column's worth of discarded slices.
#[derive(Debug, Clone)]
pub struct ResidualStack {
    pub src_col: i64,
    pub slices: Vec<UnitSlice>,
    pub total_h: i64,
}

/// Outcome of the good-stripe repacking.
#[derive(Debug, Clone)]
pub struct RepackOutcome {
    pub f: Vec<i64>,
    /// Total newly-free height per column.
    pub g_total: Vec<i64>,
    /// Largest single newly-free interval per column.
    pub g_single: Vec<i64>,
    pub good: Vec<bool>,
    pub good_count: usize,
    /// Slices moved back into the box, grouped by hosting empty sub-box.
    pub repacked: Vec<(Region, Vec<UnitSlice>)>,
    pub residual: Vec<ResidualStack>,
    pub empty_subboxes: Vec<Region>,
}

impl RepackOutcome {
    /// Exact check of the guaranteed good-column fraction.
    pub fn good_bound_holds(&self, params: &EngineParams, width: i64) -> bool {
        big(self.good_count as i64) >= params.good_fraction() * big(width)
    }
}
