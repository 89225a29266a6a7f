//! Parameter selection, six-way rectangle classification, height rounding
//! and the parameter-constraint audit.
//!
//! All thresholds are exact rationals compared against integer sides, so
//! boundary cases are decided exactly.

use num::rational::BigRational;
use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::geometry::{Instance, Rect};
use crate::ratio::{big, cmp_int, floor_to_i64, format_ratio, rat};

/// The six classification outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassLabel {
    Large,
    Tall,
    Vertical,
    Horizontal,
    Small,
    Medium,
}

/// The tuple of classification parameters governing every bound downstream.
///
/// Invariants (checked on construction):
/// `eps >= delta_h > mu_h > 0`, `eps >= delta_w > mu_w > 0`,
/// `mu_w = eps*mu_h/12`, `delta_w = eps*delta_h/12`, `gamma = eps*delta_h/2`.
#[derive(Debug, Clone)]
pub struct ClassParams {
    pub eps: BigRational,
    pub alpha: BigRational,
    pub k: u32,
    pub delta_h: BigRational,
    pub delta_w: BigRational,
    pub mu_h: BigRational,
    pub mu_w: BigRational,
    pub gamma: BigRational,
    pub opt: i64,
    /// Which ladder rung produced `delta_h` (1-based), for diagnostics.
    pub ladder_rung: usize,
}

impl ClassParams {
    pub fn new(
        eps: BigRational,
        alpha: BigRational,
        k: u32,
        delta_h: BigRational,
        mu_h: BigRational,
        opt: i64,
        ladder_rung: usize,
    ) -> Result<ClassParams> {
        if eps <= BigRational::zero() || eps >= alpha {
            return Err(Error::Precondition(format!(
                "need 0 < eps < alpha, got eps={}, alpha={}",
                format_ratio(&eps),
                format_ratio(&alpha)
            )));
        }
        if alpha < rat(1, 3) || alpha >= rat(1, 2) {
            return Err(Error::Precondition(format!(
                "alpha must lie in [1/3, 1/2), got {}",
                format_ratio(&alpha)
            )));
        }
        if delta_h > eps || mu_h >= delta_h || mu_h <= BigRational::zero() {
            return Err(Error::Precondition(format!(
                "need eps >= delta_h > mu_h > 0, got delta_h={}, mu_h={}",
                format_ratio(&delta_h),
                format_ratio(&mu_h)
            )));
        }
        if k == 0 {
            return Err(Error::Precondition("k must be positive".into()));
        }
        let twelfth = &eps / big(12);
        let delta_w = &twelfth * &delta_h;
        let mu_w = &twelfth * &mu_h;
        let gamma = &eps * &delta_h / big(2);
        Ok(ClassParams {
            eps,
            alpha,
            k,
            delta_h,
            delta_w,
            mu_h,
            mu_w,
            gamma,
            opt,
            ladder_rung,
        })
    }

    pub fn threshold_alpha_opt(&self) -> BigRational {
        &self.alpha * big(self.opt)
    }

    pub fn threshold_delta_h_opt(&self) -> BigRational {
        &self.delta_h * big(self.opt)
    }

    pub fn threshold_mu_h_opt(&self) -> BigRational {
        &self.mu_h * big(self.opt)
    }

    pub fn threshold_delta_w(&self, width: i64) -> BigRational {
        &self.delta_w * big(width)
    }

    pub fn threshold_mu_w(&self, width: i64) -> BigRational {
        &self.mu_w * big(width)
    }

    /// `gamma * OPT` as an exact rational.
    pub fn gamma_opt(&self) -> BigRational {
        &self.gamma * big(self.opt)
    }
}

/// The pluggable decreasing map used to walk the threshold ladder.
#[derive(Debug, Clone)]
pub enum FMap {
    /// `f(x) = (eps*x)^ceil(C/(eps*x))`: the power-form map with the exponent
    /// rounded up to an integer so the result stays an exact rational.
    Power { c: BigRational },
    /// `f(x) = factor * x` for a fixed `factor` in (0, 1). Gentle ladders for
    /// desk-scale runs where the power map collapses immediately.
    Scale { factor: BigRational },
}

impl FMap {
    pub fn power_default() -> FMap {
        FMap::Power { c: big(5) }
    }

    /// Evaluates the map. Results at or below `clamp` are truncated to
    /// `clamp`, which freezes the ladder (thresholds below one strip cell
    /// cannot separate integer rectangles).
    pub fn eval(&self, eps: &BigRational, x: &BigRational, clamp: &BigRational) -> BigRational {
        debug_assert!(x.is_positive() && *x < BigRational::one());
        let v = match self {
            FMap::Scale { factor } => factor * x,
            FMap::Power { c } => {
                let base = eps * x;
                debug_assert!(base < BigRational::one());
                // exponent rounded up keeps the value rational and <= the
                // real-valued map, which is all the ladder argument needs
                use num::ToPrimitive;
                let expn = (c / &base).ceil().to_integer().to_u64().unwrap_or(u64::MAX);
                let mut acc = base.clone();
                let mut steps = 1u64;
                while steps < expn && acc > *clamp {
                    acc = &acc * &base;
                    steps += 1;
                }
                acc
            }
        };
        if v <= *clamp {
            clamp.clone()
        } else {
            v
        }
    }
}

/// Scans the candidate ladder `y_1 = eps, y_{j+1} = f(y_j)` and returns the
/// first rung whose induced medium class has total area at most
/// `eps^k * OPT * W`. The scan is lazy and stops at `ladder_cap` candidates.
pub fn select_params(
    inst: &Instance,
    opt: i64,
    eps: BigRational,
    alpha: BigRational,
    k: u32,
    f: &FMap,
    ladder_cap: usize,
) -> Result<ClassParams> {
    let h_max = inst.rects.iter().map(|r| r.h).max().unwrap_or(0);
    if opt < h_max {
        return Err(Error::Precondition(format!(
            "opt estimate {opt} is below h_max {h_max}"
        )));
    }
    if opt < 1 {
        return Err(Error::Precondition("opt estimate must be >= 1".into()));
    }
    let budget = num::pow::pow(eps.clone(), k as usize) * big(opt) * big(inst.width);
    let clamp = BigRational::new(1.into(), (inst.width as i128 * opt as i128 * 12).into());

    let mut y = eps.clone();
    let mut best: Option<(i64, BigRational)> = None;
    for rung in 1..=ladder_cap.max(1) {
        let mu = f.eval(&eps, &y, &clamp);
        if mu >= y {
            return Err(Error::Precondition(
                "ladder map must be strictly decreasing".into(),
            ));
        }
        let params = ClassParams::new(
            eps.clone(),
            alpha.clone(),
            k,
            y.clone(),
            mu.clone(),
            opt,
            rung,
        )?;
        let medium_area: i64 = inst
            .rects
            .iter()
            .filter(|r| classify(r, inst.width, &params) == ClassLabel::Medium)
            .map(Rect::area)
            .sum();
        if big(medium_area) <= budget {
            return Ok(params);
        }
        if best.as_ref().map_or(true, |(a, _)| medium_area < *a) {
            best = Some((medium_area, y.clone()));
        }
        if mu <= clamp {
            break; // ladder frozen: thresholds are already sub-cell
        }
        y = mu;
    }
    let (best_area, best_delta) = best.unwrap_or((0, eps));
    Err(Error::ParamSelection {
        cap: ladder_cap,
        best_area,
        best_delta: format_ratio(&best_delta),
    })
}

/// Assigns exactly one of the six labels.
pub fn classify(rect: &Rect, width: i64, p: &ClassParams) -> ClassLabel {
    use std::cmp::Ordering::*;
    let alpha_opt = p.threshold_alpha_opt();
    let delta_h_opt = p.threshold_delta_h_opt();
    let mu_h_opt = p.threshold_mu_h_opt();
    let delta_w_w = p.threshold_delta_w(width);
    let mu_w_w = p.threshold_mu_w(width);

    let h_gt_alpha = cmp_int(rect.h, &alpha_opt) == Greater;
    let h_ge_delta = cmp_int(rect.h, &delta_h_opt) != Less;
    let h_le_mu = cmp_int(rect.h, &mu_h_opt) != Greater;
    let w_ge_delta = cmp_int(rect.w, &delta_w_w) != Less;
    let w_le_mu = cmp_int(rect.w, &mu_w_w) != Greater;

    if h_gt_alpha && !w_ge_delta {
        ClassLabel::Tall
    } else if h_ge_delta && w_ge_delta {
        ClassLabel::Large
    } else if h_ge_delta && !h_gt_alpha && w_le_mu {
        ClassLabel::Vertical
    } else if h_le_mu && w_ge_delta {
        ClassLabel::Horizontal
    } else if h_le_mu && w_le_mu {
        ClassLabel::Small
    } else {
        ClassLabel::Medium
    }
}

/// Labels every rectangle of an instance.
pub fn classify_instance(inst: &Instance, p: &ClassParams) -> Vec<ClassLabel> {
    inst.rects
        .iter()
        .map(|r| classify(r, inst.width, p))
        .collect()
}

/// The integer rounding step: `max(1, floor(gamma * OPT))`.
pub fn rounding_grid(p: &ClassParams) -> i64 {
    floor_to_i64(&p.gamma_opt()).max(1)
}

/// Returns copies of the rectangles with large/tall/vertical heights rounded
/// up to the next multiple of the grid step; other classes are untouched.
pub fn round_heights(rects: &[Rect], labels: &[ClassLabel], p: &ClassParams) -> Vec<Rect> {
    let r = rounding_grid(p);
    rects
        .iter()
        .zip(labels)
        .map(|(rect, label)| match label {
            ClassLabel::Large | ClassLabel::Tall | ClassLabel::Vertical => Rect {
                h: crate::ratio::ceil_to_multiple(rect.h, r),
                ..*rect
            },
            _ => *rect,
        })
        .collect()
}

/// One row of the parameter-constraint table.
#[derive(Debug, Clone)]
pub struct ConstraintRow {
    pub name: &'static str,
    pub lhs: BigRational,
    pub rhs: BigRational,
    pub satisfied: bool,
}

#[derive(Debug, Clone)]
pub struct ConstraintReport {
    pub rows: Vec<ConstraintRow>,
}

impl ConstraintReport {
    pub fn all_satisfied(&self) -> bool {
        self.rows.iter().all(|r| r.satisfied)
    }

    pub fn violations(&self) -> Vec<&ConstraintRow> {
        self.rows.iter().filter(|r| !r.satisfied).collect()
    }
}

impl std::fmt::Display for ConstraintReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for row in &self.rows {
            writeln!(
                f,
                "{}: {} <= {} .. {}",
                row.name,
                format_ratio(&row.lhs),
                format_ratio(&row.rhs),
                if row.satisfied { "ok" } else { "VIOLATED" }
            )?;
        }
        Ok(())
    }
}

/// Evaluates the six inequality constraints tying the classification
/// parameters to the box/container counts `k_b` and `k_f`.
pub fn audit_constraints(p: &ClassParams, k_b: i64, k_f: i64) -> ConstraintReport {
    let k_b = big(k_b.max(1));
    let k_f = big(k_f.max(1));
    let one = BigRational::one();
    let mut rows = Vec::new();
    let mut push = |name: &'static str, lhs: BigRational, rhs: BigRational| {
        let satisfied = lhs <= rhs;
        rows.push(ConstraintRow {
            name,
            lhs,
            rhs,
            satisfied,
        });
    };

    push(
        "medium packer: 6*eps^k <= gamma/6",
        big(6) * num::pow::pow(p.eps.clone(), p.k as usize),
        &p.gamma / big(6),
    );
    push(
        "box partition: mu_h <= eps*delta_w/K_B",
        p.mu_h.clone(),
        &p.eps * &p.delta_w / &k_b,
    );
    push(
        "cut extraction: mu_w <= gamma*delta_h/(6*K_B*(1+eps))",
        p.mu_w.clone(),
        &p.gamma * &p.delta_h / (big(6) * &k_b * (&one + &p.eps)),
    );
    push(
        "container area: mu_w <= gamma/(3*K_F)",
        p.mu_w.clone(),
        &p.gamma / (big(3) * &k_f),
    );
    push(
        "container count: mu_h <= eps/K_F",
        p.mu_h.clone(),
        &p.eps / &k_f,
    );
    push(
        "small packer: mu_h <= 1/(31*K_F^2)",
        p.mu_h.clone(),
        one / (big(31) * &k_f * &k_f),
    );

    ConstraintReport { rows }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Rect;
    use crate::ratio::rat;

    fn params(eps: (i64, i64), delta_h: (i64, i64), mu_h: (i64, i64), opt: i64) -> ClassParams {
        ClassParams::new(
            rat(eps.0, eps.1),
            rat(1, 3),
            2,
            rat(delta_h.0, delta_h.1),
            rat(mu_h.0, mu_h.1),
            opt,
            1,
        )
        .unwrap()
    }

    #[test]
    fn derived_parameters_follow_the_definitions() {
        let p = params((1, 4), (1, 4), (1, 16), 128);
        assert_eq!(p.delta_w, rat(1, 192));
        assert_eq!(p.mu_w, rat(1, 768));
        assert_eq!(p.gamma, rat(1, 32));
        assert_eq!(rounding_grid(&p), 4);
    }

    #[test]
    fn narrow_high_rect_on_the_subcell_width_boundary_is_large() {
        // delta_w*W < 1, so every rect satisfies w >= delta_w*W and nothing
        // can be tall or vertical.
        let p = ClassParams::new(rat(1, 5), rat(1, 3), 2, rat(1, 10), rat(1, 100), 100, 1).unwrap();
        let r = Rect::new(0, 1, 50);
        assert_eq!(classify(&r, 100, &p), ClassLabel::Large);
    }

    #[test]
    fn band_membership_examples() {
        let p = params((1, 4), (1, 4), (1, 16), 96);
        let w = 96 * 16; // mu_w*W = 2, delta_w*W = 8
        assert_eq!(classify(&Rect::new(0, 2, 6), w, &p), ClassLabel::Small);
        assert_eq!(classify(&Rect::new(0, 2, 12), w, &p), ClassLabel::Medium);
        assert_eq!(classify(&Rect::new(0, 100, 12), w, &p), ClassLabel::Medium);
        assert_eq!(classify(&Rect::new(0, 2, 30), w, &p), ClassLabel::Vertical);
        assert_eq!(classify(&Rect::new(0, 2, 40), w, &p), ClassLabel::Tall);
        assert_eq!(classify(&Rect::new(0, 100, 40), w, &p), ClassLabel::Large);
        assert_eq!(classify(&Rect::new(0, 100, 6), w, &p), ClassLabel::Horizontal);
        // width band with h <= alpha*OPT is medium regardless of height band
        assert_eq!(classify(&Rect::new(0, 4, 30), w, &p), ClassLabel::Medium);
    }

    #[test]
    fn classification_is_total_and_exclusive_on_a_grid() {
        let opt = 48;
        let width = 48 * 16;
        let p = params((1, 4), (1, 4), (1, 16), opt);
        let alpha_opt = p.threshold_alpha_opt();
        let delta_h_opt = p.threshold_delta_h_opt();
        let mu_h_opt = p.threshold_mu_h_opt();
        let delta_w_w = p.threshold_delta_w(width);
        let mu_w_w = p.threshold_mu_w(width);
        for w in 1..=width {
            for h in 1..=opt {
                let r = Rect::new(0, w, h);
                let got = classify(&r, width, &p);
                // the six raw predicates, straight from the definitions
                let large = cmp_int(h, &delta_h_opt) != std::cmp::Ordering::Less
                    && cmp_int(w, &delta_w_w) != std::cmp::Ordering::Less;
                let tall = cmp_int(h, &alpha_opt) == std::cmp::Ordering::Greater
                    && cmp_int(w, &delta_w_w) == std::cmp::Ordering::Less;
                let vertical = cmp_int(h, &delta_h_opt) != std::cmp::Ordering::Less
                    && cmp_int(h, &alpha_opt) != std::cmp::Ordering::Greater
                    && cmp_int(w, &mu_w_w) != std::cmp::Ordering::Greater;
                let horizontal = cmp_int(h, &mu_h_opt) != std::cmp::Ordering::Greater
                    && cmp_int(w, &delta_w_w) != std::cmp::Ordering::Less;
                let small = cmp_int(h, &mu_h_opt) != std::cmp::Ordering::Greater
                    && cmp_int(w, &mu_w_w) != std::cmp::Ordering::Greater;
                let in_h_band = cmp_int(h, &mu_h_opt) == std::cmp::Ordering::Greater
                    && cmp_int(h, &delta_h_opt) == std::cmp::Ordering::Less;
                let in_w_band = cmp_int(w, &mu_w_w) == std::cmp::Ordering::Greater
                    && cmp_int(w, &delta_w_w) == std::cmp::Ordering::Less
                    && cmp_int(h, &alpha_opt) != std::cmp::Ordering::Greater;
                let medium = in_h_band || in_w_band;
                let fired = [large, tall, vertical, horizontal, small, medium]
                    .iter()
                    .filter(|&&b| b)
                    .count();
                assert_eq!(fired, 1, "({w},{h}) fires {fired} predicates");
                let expect = if large {
                    ClassLabel::Large
                } else if tall {
                    ClassLabel::Tall
                } else if vertical {
                    ClassLabel::Vertical
                } else if horizontal {
                    ClassLabel::Horizontal
                } else if small {
                    ClassLabel::Small
                } else {
                    ClassLabel::Medium
                };
                assert_eq!(got, expect, "({w},{h})");
            }
        }
    }

    #[test]
    fn uniform_instance_selects_the_first_rung() {
        let rects = (0..4).map(|i| Rect::new(i, 100, 100)).collect();
        let inst = Instance::new(100, rects, false).unwrap();
        let p = select_params(
            &inst,
            400,
            rat(1, 4),
            rat(1, 3),
            2,
            &FMap::power_default(),
            64,
        )
        .unwrap();
        assert_eq!(p.ladder_rung, 1);
        let m: i64 = inst
            .rects
            .iter()
            .filter(|r| classify(r, inst.width, &p) == ClassLabel::Medium)
            .map(Rect::area)
            .sum();
        assert_eq!(m, 0);
    }

    #[test]
    fn spread_instance_walks_deeper_and_bound_holds() {
        // widths/heights hitting every band of the first rung force a deeper
        // choice; re-verify the selected bound by independent summation
        let mut rects = Vec::new();
        let mut id = 0;
        for (w, h, copies) in [(40, 20, 30), (3, 3, 40), (10, 90, 6), (2, 60, 8)] {
            for _ in 0..copies {
                rects.push(Rect::new(id, w, h));
                id += 1;
            }
        }
        let inst = Instance::new(100, rects, false).unwrap();
        let f = FMap::Scale { factor: rat(1, 4) };
        let p = select_params(&inst, 100, rat(1, 4), rat(1, 3), 2, &f, 64).unwrap();
        let medium_area: i64 = inst
            .rects
            .iter()
            .filter(|r| classify(r, inst.width, &p) == ClassLabel::Medium)
            .map(Rect::area)
            .sum();
        let budget = num::pow::pow(p.eps.clone(), p.k as usize) * big(p.opt) * big(inst.width);
        assert!(big(medium_area) <= budget);
        assert!(p.ladder_rung > 1);
    }

    #[test]
    fn power_map_ladder_matches_direct_evaluation() {
        // eps = 1/2, C = 1: y1 = 1/2, y2 = (1/4)^4 = 1/256
        let f = FMap::Power { c: big(1) };
        let clamp = rat(1, 1_000_000_000);
        let y2 = f.eval(&rat(1, 2), &rat(1, 2), &clamp);
        assert_eq!(y2, rat(1, 256));
    }

    #[test]
    fn rounding_examples() {
        // gamma*OPT = 4
        let p = params((1, 4), (1, 4), (1, 16), 128);
        let labels = [ClassLabel::Tall, ClassLabel::Large, ClassLabel::Medium];
        let rects = [
            Rect::new(0, 2, 7),
            Rect::new(1, 9, 8),
            Rect::new(2, 9, 7),
        ];
        let rounded = round_heights(&rects, &labels, &p);
        assert_eq!(rounded[0].h, 8);
        assert_eq!(rounded[1].h, 8); // already a multiple
        assert_eq!(rounded[2].h, 7); // medium untouched

        // gamma*OPT = 2.5 floors to r = 2
        let p = params((1, 4), (1, 4), (1, 16), 80);
        assert_eq!(rounding_grid(&p), 2);
        let rounded = round_heights(&[Rect::new(0, 2, 5)], &[ClassLabel::Vertical], &p);
        assert_eq!(rounded[0].h, 6);
    }

    #[test]
    fn audit_reports_each_row() {
        let p = params((1, 4), (1, 4), (1, 16), 128);
        let rep = audit_constraints(&p, 10, 10);
        assert_eq!(rep.rows.len(), 6);
        // desk-scale parameters violate several rows
        assert!(!rep.all_satisfied());

        let tiny = ClassParams::new(
            rat(1, 4),
            rat(1, 3),
            8,
            rat(1, 4),
            rat(1, 100_000_000),
            128,
            1,
        )
        .unwrap();
        let rep = audit_constraints(&tiny, 2, 2);
        assert!(rep.all_satisfied(), "{rep}");
    }
}
