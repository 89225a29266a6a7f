//! End-to-end orchestration: guided mode (witness packing + box-partition
//! oracle, full structural transformation, certified final layout) and a
//! shelf-heuristic baseline mode.

pub mod guided;
pub mod heuristic;
pub mod lift;
pub mod oracle;

use num::rational::BigRational;

use crate::classify::FMap;
use crate::error::{Error, Result};
use crate::ratio::rat;

/// How constraint-table violations are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strictness {
    /// Violations abort the run.
    Strict,
    /// Violations become warnings on the certificate (desk-scale default).
    Relaxed,
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub eps: BigRational,
    pub alpha: BigRational,
    pub k: u32,
    pub f: FMap,
    pub strictness: Strictness,
    /// Ladder candidates scanned before giving up.
    pub ladder_cap: usize,
    /// Memoized-state cap for the assignment solver.
    pub state_cap: usize,
}

impl PipelineConfig {
    pub fn new(eps: BigRational, alpha: BigRational) -> Result<PipelineConfig> {
        if alpha < rat(1, 3) || alpha >= rat(1, 2) {
            return Err(Error::Precondition(format!(
                "alpha must lie in [1/3, 1/2), got {}",
                crate::ratio::format_ratio(&alpha)
            )));
        }
        if eps <= rat(0, 1) || eps >= alpha {
            return Err(Error::Precondition(format!(
                "need 0 < eps < alpha, got eps = {}",
                crate::ratio::format_ratio(&eps)
            )));
        }
        Ok(PipelineConfig {
            eps,
            alpha,
            ..PipelineConfig::default()
        })
    }
}

impl Default for PipelineConfig {
    fn default() -> PipelineConfig {
        PipelineConfig {
            eps: rat(1, 4),
            alpha: rat(1, 3),
            k: 2,
            f: FMap::power_default(),
            strictness: Strictness::Relaxed,
            ladder_cap: 64,
            state_cap: 10_000_000,
        }
    }
}

pub use guided::{run_guided, CertReport, GuidedRun, RunSummary};
pub use heuristic::{run_heuristic, HeuristicRun};
pub use lift::{lift_packing, LiftedPacking};
pub use oracle::{derive_oracle_from_witness, verify_oracle, BoxPartitionOracle, RectStatus};
