//! Lifts a witness packing into the rounded world: heights of large, tall
//! and vertical rectangles round up to the grid step, their y-coordinates
//! move to grid multiples, everything else shifts just enough to stay
//! disjoint. The lifted strip prefix has height `OPT' <= (1+eps)*OPT`
//! plus the grid slack, reported exactly.

use num::rational::BigRational;

use crate::classify::{rounding_grid, ClassLabel, ClassParams};
use crate::error::{Error, Result};
use crate::geometry::{verify_packing, Instance, Packing, Placement, Rect};
use crate::ratio::{big, ceil_rational_to_multiple, ceil_to_i64};

#[derive(Debug, Clone)]
pub struct LiftedPacking {
    /// Rounded copies of all rectangles (only L/T/V heights change).
    pub rounded: Vec<Rect>,
    /// Lifted placements, one per input rectangle, same order.
    pub placements: Vec<Placement>,
    /// Height of the lifted prefix, a multiple of the grid step.
    pub opt_prime: i64,
    pub grid_step: i64,
    /// `opt_prime - (1+eps)*opt`, the slack the integer grid introduced.
    pub slack: BigRational,
}

/// `y * (1 + eps)` as an exact rational.
fn stretch(y: i64, eps: &BigRational) -> BigRational {
    big(y) * (big(1) + eps)
}

/// Applies the rounding lift to a feasible packing. The witness must place
/// every rectangle without rotations.
pub fn lift_packing(
    inst: &Instance,
    packing: &Packing,
    labels: &[ClassLabel],
    params: &ClassParams,
) -> Result<LiftedPacking> {
    let r = rounding_grid(params);
    let rounded = crate::classify::round_heights(&inst.rects, labels, params);

    let mut placements = Vec::with_capacity(packing.placements.len());
    let mut by_rect: Vec<Option<&Placement>> = vec![None; inst.len()];
    for p in &packing.placements {
        if p.rotated {
            return Err(Error::Precondition(
                "witness packings must be rotation-free".into(),
            ));
        }
        by_rect[p.rect_id] = Some(p);
    }
    for (i, rect) in inst.rects.iter().enumerate() {
        let p = by_rect[i].ok_or_else(|| {
            Error::Precondition(format!("witness does not place rect {}", rect.id))
        })?;
        let lifted_y = match labels[i] {
            ClassLabel::Large | ClassLabel::Tall | ClassLabel::Vertical => {
                ceil_rational_to_multiple(&stretch(p.y, &params.eps), r)
            }
            _ => ceil_to_i64(&stretch(p.y, &params.eps)),
        };
        placements.push(Placement::new(rect.id, p.x, lifted_y));
    }

    let opt_prime = ceil_rational_to_multiple(&stretch(params.opt, &params.eps), r);
    let slack = big(opt_prime) - stretch(params.opt, &params.eps);

    let lifted = LiftedPacking {
        rounded,
        placements,
        opt_prime,
        grid_step: r,
        slack,
    };
    debug_assert!(lifted
        .placements
        .iter()
        .all(|p| p.y + lifted.rounded[p.rect_id].h <= opt_prime));
    Ok(lifted)
}

/// Lifts a cut coordinate: the smallest integer at or above the stretched
/// position. Everything below the original cut stays below the lifted one.
pub fn lift_cut(c: i64, eps: &BigRational) -> i64 {
    ceil_to_i64(&stretch(c, eps))
}

/// Verifies the lifted packing against the rounded instance.
pub fn verify_lift(inst: &Instance, lifted: &LiftedPacking) -> Result<()> {
    let rounded_inst = Instance::new(inst.width, lifted.rounded.clone(), false)?;
    let rep = verify_packing(&rounded_inst, &Packing::new(lifted.placements.clone()));
    if !rep.ok() {
        return Err(Error::Internal(format!(
            "lifted packing is infeasible: {}",
            rep.violations
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join("; ")
        )));
    }
    if rep.height > lifted.opt_prime {
        return Err(Error::Internal(format!(
            "lifted packing height {} exceeds the rounded prefix {}",
            rep.height, lifted.opt_prime
        )));
    }
    Ok(())
}
