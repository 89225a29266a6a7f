//! Containers induce a multiple knapsack problem: one knapsack per
//! container (height for horizontal, width for vertical), item sizes from
//! the fitting orientation, and with rotations one extra area knapsack for
//! rectangles that fit some orientation of the small class.
//!
//! The solver is exact: a first-fit-decreasing pass handles the easy
//! instances, then a depth-first search over residual-capacity states with
//! failure memoization decides the rest. A state cap turns blow-ups into a
//! resource error, never a wrong answer.

use std::collections::HashSet;

use crate::classify::ClassParams;
use crate::error::{Error, Result};
use crate::geometry::{Container, Orientation, Placement, Rect, RectId};
use crate::ratio::cmp_int;

/// One-dimensional view of the containers.
#[derive(Debug, Clone)]
pub struct KnapsackInstance {
    pub capacities: Vec<i64>,
    /// `sizes[i][j]`: size of item `i` in knapsack `j`, `None` if it cannot
    /// go there.
    pub sizes: Vec<Vec<Option<i64>>>,
    /// Index of the extra area knapsack, when rotations are enabled.
    pub area_knapsack: Option<usize>,
}

impl KnapsackInstance {
    pub fn items(&self) -> usize {
        self.sizes.len()
    }

    pub fn knapsacks(&self) -> usize {
        self.capacities.len()
    }
}

fn fits(c: &Container, w: i64, h: i64) -> bool {
    w <= c.w && h <= c.h
}

fn oriented_size(c: &Container, w: i64, h: i64) -> i64 {
    match c.orientation {
        Orientation::Horizontal => h,
        Orientation::Vertical => w,
    }
}

/// Builds the size matrix. Without rotations an item fits a container iff
/// it fits in both dimensions and occupies its height (horizontal) or width
/// (vertical). With rotations the cheaper feasible orientation wins, and an
/// extra knapsack of capacity `free_area` takes any rectangle some
/// orientation of which is small.
pub fn build_sizes(
    rects: &[Rect],
    containers: &[Container],
    rotations: bool,
    params: Option<&ClassParams>,
    strip_width: i64,
    free_area: i64,
) -> KnapsackInstance {
    let mut capacities: Vec<i64> = containers
        .iter()
        .map(|c| match c.orientation {
            Orientation::Horizontal => c.h,
            Orientation::Vertical => c.w,
        })
        .collect();

    let is_small = |w: i64, h: i64| -> bool {
        match params {
            Some(p) => {
                cmp_int(h, &p.threshold_mu_h_opt()) != std::cmp::Ordering::Greater
                    && cmp_int(w, &p.threshold_mu_w(strip_width)) != std::cmp::Ordering::Greater
            }
            None => false,
        }
    };

    let mut sizes: Vec<Vec<Option<i64>>> = Vec::with_capacity(rects.len());
    for r in rects {
        let mut row: Vec<Option<i64>> = Vec::with_capacity(containers.len() + 1);
        for c in containers {
            let plain = fits(c, r.w, r.h).then(|| oriented_size(c, r.w, r.h));
            let turned = (rotations && fits(c, r.h, r.w)).then(|| oriented_size(c, r.h, r.w));
            row.push(match (plain, turned) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (Some(a), None) => Some(a),
                (None, Some(b)) => Some(b),
                (None, None) => None,
            });
        }
        if rotations {
            let small_somehow = is_small(r.w, r.h) || is_small(r.h, r.w);
            row.push(small_somehow.then(|| r.area()));
        }
        sizes.push(row);
    }

    let area_knapsack = if rotations {
        capacities.push(free_area);
        Some(capacities.len() - 1)
    } else {
        None
    };

    KnapsackInstance {
        capacities,
        sizes,
        area_knapsack,
    }
}

/// Exhaustive assignment search, for equivalence testing. Only capacity
/// pruning; exponential in the number of items.
pub fn brute_force_assignment(ki: &KnapsackInstance) -> Option<Vec<usize>> {
    fn rec(ki: &KnapsackInstance, i: usize, residual: &mut [i64], out: &mut [usize]) -> bool {
        if i == ki.items() {
            return true;
        }
        for j in 0..ki.knapsacks() {
            if let Some(s) = ki.sizes[i][j] {
                if s <= residual[j] {
                    residual[j] -= s;
                    out[i] = j;
                    if rec(ki, i + 1, residual, out) {
                        return true;
                    }
                    residual[j] += s;
                }
            }
        }
        false
    }
    let mut residual = ki.capacities.clone();
    let mut out = vec![0usize; ki.items()];
    rec(ki, 0, &mut residual, &mut out).then_some(out)
}

/// Returns a total assignment (item index -> knapsack index) if one exists,
/// `Ok(None)` if provably none does, or a resource error when the search
/// state space exceeds `state_cap`.
pub fn solve_assignment(ki: &KnapsackInstance, state_cap: usize) -> Result<Option<Vec<usize>>> {
    let n = ki.items();
    let k = ki.knapsacks();
    if n == 0 {
        return Ok(Some(Vec::new()));
    }
    // an item with no feasible knapsack decides immediately
    for (i, row) in ki.sizes.iter().enumerate() {
        if row.iter().all(Option::is_none) {
            let _ = i;
            return Ok(None);
        }
    }

    // process big items first: min feasible size desc, then max desc
    let mut order: Vec<usize> = (0..n).collect();
    let min_size = |i: usize| ki.sizes[i].iter().flatten().min().copied().unwrap_or(0);
    let max_size = |i: usize| ki.sizes[i].iter().flatten().max().copied().unwrap_or(0);
    order.sort_by(|&a, &b| {
        min_size(b)
            .cmp(&min_size(a))
            .then(max_size(b).cmp(&max_size(a)))
            .then(a.cmp(&b))
    });

    // first-fit-decreasing often settles feasible instances outright
    {
        let mut residual = ki.capacities.clone();
        let mut out = vec![usize::MAX; n];
        let mut ok = true;
        for &i in &order {
            match (0..k).find(|&j| ki.sizes[i][j].map_or(false, |s| s <= residual[j])) {
                Some(j) => {
                    residual[j] -= ki.sizes[i][j].unwrap();
                    out[i] = j;
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return Ok(Some(out));
        }
    }

    // knapsacks with identical capacity and identical size columns are
    // interchangeable; sorting their residuals canonicalizes memo keys
    let mut class_of = vec![0usize; k];
    {
        let mut seen: Vec<(i64, Vec<Option<i64>>, usize)> = Vec::new();
        for j in 0..k {
            let col: Vec<Option<i64>> = (0..n).map(|i| ki.sizes[i][j]).collect();
            match seen
                .iter()
                .find(|(cap, c, _)| *cap == ki.capacities[j] && *c == col)
            {
                Some(&(_, _, class)) => class_of[j] = class,
                None => {
                    let class = seen.len();
                    seen.push((ki.capacities[j], col, class));
                    class_of[j] = class;
                }
            }
        }
    }
    let classes = class_of.iter().max().unwrap() + 1;
    let mut class_members: Vec<Vec<usize>> = vec![Vec::new(); classes];
    for j in 0..k {
        class_members[class_of[j]].push(j);
    }

    // lower bound on the size still to place, per suffix, for pruning
    let mut suffix_min: Vec<i64> = vec![0; n + 1];
    for idx in (0..n).rev() {
        suffix_min[idx] = suffix_min[idx + 1] + min_size(order[idx]);
    }

    struct Search<'a> {
        ki: &'a KnapsackInstance,
        order: &'a [usize],
        class_members: &'a [Vec<usize>],
        suffix_min: &'a [i64],
        failed: HashSet<(usize, Vec<i64>)>,
        cap: usize,
    }

    impl Search<'_> {
        fn key(&self, idx: usize, residual: &[i64]) -> (usize, Vec<i64>) {
            let mut canon = Vec::with_capacity(residual.len());
            for members in self.class_members {
                let mut vals: Vec<i64> = members.iter().map(|&j| residual[j]).collect();
                vals.sort_unstable();
                canon.extend(vals);
            }
            (idx, canon)
        }

        fn dfs(
            &mut self,
            idx: usize,
            residual: &mut [i64],
            out: &mut [usize],
        ) -> Result<bool> {
            if idx == self.order.len() {
                return Ok(true);
            }
            let total: i64 = residual.iter().sum();
            if total < self.suffix_min[idx] {
                return Ok(false);
            }
            let key = self.key(idx, residual);
            if self.failed.contains(&key) {
                return Ok(false);
            }
            let i = self.order[idx];
            let mut tried_classes: HashSet<(usize, i64)> = HashSet::new();
            for j in 0..self.ki.knapsacks() {
                if let Some(s) = self.ki.sizes[i][j] {
                    if s <= residual[j] {
                        // same class + same residual behaves identically
                        let sig = (crate::knapsack::class_sig(self.class_members, j), residual[j]);
                        if !tried_classes.insert(sig) {
                            continue;
                        }
                        residual[j] -= s;
                        out[i] = j;
                        if self.dfs(idx + 1, residual, out)? {
                            return Ok(true);
                        }
                        residual[j] += s;
                    }
                }
            }
            if self.failed.len() >= self.cap {
                return Err(Error::ResourceCap(format!(
                    "assignment search exceeded {} memoized states",
                    self.cap
                )));
            }
            self.failed.insert(key);
            Ok(false)
        }
    }

    let mut search = Search {
        ki,
        order: &order,
        class_members: &class_members,
        suffix_min: &suffix_min,
        failed: HashSet::new(),
        cap: state_cap,
    };
    let mut residual = ki.capacities.clone();
    let mut out = vec![usize::MAX; n];
    if search.dfs(0, &mut residual, &mut out)? {
        Ok(Some(out))
    } else {
        Ok(None)
    }
}

pub(crate) fn class_sig(class_members: &[Vec<usize>], j: usize) -> usize {
    class_members
        .iter()
        .position(|m| m.contains(&j))
        .unwrap_or(usize::MAX)
}

/// A realized assignment: geometric placements per container, plus the
/// items relegated to the area knapsack.
#[derive(Debug, Clone)]
pub struct RealizedAssignment {
    pub placements: Vec<Placement>,
    pub per_container: Vec<Vec<RectId>>,
    /// Items assigned to the extra area knapsack (small residual set).
    pub area_residual: Vec<RectId>,
}

/// Stacks the assigned items inside their containers in assignment order:
/// horizontal containers fill bottom to top, vertical ones left to right.
/// Rotated placements pick the orientation whose size matches the knapsack
/// size.
pub fn realize_assignment(
    ki: &KnapsackInstance,
    assignment: &[usize],
    rects: &[Rect],
    containers: &[Container],
    rotations: bool,
) -> RealizedAssignment {
    let mut per_container: Vec<Vec<RectId>> = vec![Vec::new(); containers.len()];
    let mut area_residual = Vec::new();
    for (i, &j) in assignment.iter().enumerate() {
        if Some(j) == ki.area_knapsack {
            area_residual.push(rects[i].id);
        } else {
            per_container[j].push(i);
        }
    }

    let mut placements = Vec::new();
    for (j, members) in per_container.iter().enumerate() {
        let c = &containers[j];
        let mut cursor = 0i64;
        for &i in members {
            let r = &rects[i];
            let plain_ok = fits(c, r.w, r.h);
            let turned_ok = rotations && fits(c, r.h, r.w);
            let rotated = match (plain_ok, turned_ok) {
                (true, true) => oriented_size(c, r.h, r.w) < oriented_size(c, r.w, r.h),
                (true, false) => false,
                (false, true) => true,
                (false, false) => unreachable!("finite size implies some orientation fits"),
            };
            let (we, he) = if rotated { (r.h, r.w) } else { (r.w, r.h) };
            let pl = match c.orientation {
                Orientation::Horizontal => {
                    let p = Placement {
                        rect_id: r.id,
                        x: c.x,
                        y: c.y + cursor,
                        rotated,
                    };
                    cursor += he;
                    p
                }
                Orientation::Vertical => {
                    let p = Placement {
                        rect_id: r.id,
                        x: c.x + cursor,
                        y: c.y,
                        rotated,
                    };
                    cursor += we;
                    p
                }
            };
            placements.push(pl);
        }
    }

    RealizedAssignment {
        placements,
        per_container: per_container
            .into_iter()
            .map(|m| m.into_iter().map(|i| rects[i].id).collect())
            .collect(),
        area_residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hc(w: i64, h: i64) -> Container {
        Container::new(0, 0, w, h, Orientation::Horizontal)
    }

    #[test]
    fn horizontal_size_is_the_height() {
        let ki = build_sizes(&[Rect::new(0, 4, 3)], &[hc(10, 5)], false, None, 100, 0);
        assert_eq!(ki.sizes[0][0], Some(3));
    }

    #[test]
    fn rotation_takes_the_cheaper_orientation() {
        let ki = build_sizes(&[Rect::new(0, 3, 4)], &[hc(10, 5)], true, None, 100, 0);
        assert_eq!(ki.sizes[0][0], Some(3));
    }

    #[test]
    fn unfittable_in_both_orientations_is_infinite() {
        let ki = build_sizes(&[Rect::new(0, 12, 3)], &[hc(10, 5)], true, None, 100, 0);
        assert_eq!(ki.sizes[0][0], None);
    }

    #[test]
    fn two_items_share_one_knapsack() {
        let ki = KnapsackInstance {
            capacities: vec![10],
            sizes: vec![vec![Some(4)], vec![Some(6)]],
            area_knapsack: None,
        };
        let a = solve_assignment(&ki, 1 << 20).unwrap().unwrap();
        assert_eq!(a, vec![0, 0]);
    }

    #[test]
    fn three_fours_into_two_fives_is_infeasible() {
        let ki = KnapsackInstance {
            capacities: vec![5, 5],
            sizes: vec![vec![Some(4); 2]; 3],
            area_knapsack: None,
        };
        assert_eq!(solve_assignment(&ki, 1 << 20).unwrap(), None);
        assert_eq!(brute_force_assignment(&ki), None);
    }

    #[test]
    fn realize_stacks_in_order() {
        let rects = vec![Rect::new(0, 4, 3), Rect::new(1, 5, 2)];
        let containers = vec![hc(10, 6)];
        let ki = build_sizes(&rects, &containers, false, None, 100, 0);
        let a = solve_assignment(&ki, 1 << 20).unwrap().unwrap();
        let out = realize_assignment(&ki, &a, &rects, &containers, false);
        assert_eq!(out.placements.len(), 2);
        assert_eq!((out.placements[0].x, out.placements[0].y), (0, 0));
        assert_eq!((out.placements[1].x, out.placements[1].y), (0, 3));
    }

    #[test]
    fn realize_sets_the_rotation_flag() {
        // only the rotated orientation fits: 7 wide, 2 high container... a
        // 2x6 rect lies down as 6x2
        let rects = vec![Rect::new(0, 2, 6)];
        let containers = vec![hc(7, 2)];
        let ki = build_sizes(&rects, &containers, true, None, 100, 0);
        assert_eq!(ki.sizes[0][0], Some(2));
        let a = solve_assignment(&ki, 1 << 20).unwrap().unwrap();
        let out = realize_assignment(&ki, &a, &rects, &containers, true);
        assert!(out.placements[0].rotated);
    }
}
