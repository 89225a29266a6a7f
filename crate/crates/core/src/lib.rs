//! Strip packing toolkit: exact integer geometry with a feasibility
//! verifier, instance generators with known optima, NFDH/FFDH shelf
//! packers, six-way rectangle classification over exact rationals, a
//! vertical-box repacking engine, container formation, an exact multiple
//! knapsack solver, and a guided end-to-end pipeline with height
//! certificates.

pub mod classify;
pub mod engine;
pub mod error;
pub mod geometry;
pub mod instances;
pub mod knapsack;
pub mod pipeline;
pub mod ratio;
pub mod shelf;
pub mod synth;

pub use error::{Error, Result};
pub use geometry::{
    area, lower_bounds, packing_height, verify_container_discipline, verify_packing, Container,
    Instance, Orientation, Packing, Placement, Rect, RectId, VerificationReport,
};
pub use instances::Region;
