use thiserror::Error;

/// Errors produced by generators, parsers, packers and the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("rectangle {id} is wider than the strip ({w} > {strip})")]
    RectTooWide { id: usize, w: i64, strip: i64 },

    #[error("parameter selection failed: no ladder candidate within cap {cap} satisfies the medium-area bound (best a(M) = {best_area} with delta_h = {best_delta})")]
    ParamSelection {
        cap: usize,
        best_area: i64,
        best_delta: String,
    },

    #[error("constraint audit failed in strict mode: {0}")]
    StrictConstraint(String),

    #[error("state-space cap exceeded: {0}")]
    ResourceCap(String),

    #[error("knapsack assignment infeasible: {0}")]
    Infeasible(String),

    #[error("box partition rejected: {0}")]
    OracleRejected(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
