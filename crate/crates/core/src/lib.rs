//! Placement of VNF-nodes and allocation of multi-resource flow processing.
//!
//! The pipeline is: pick nodes with a greedy over a sequential fractional
//! allocation value ([`placement::ssg`]), then assign whole flows to the
//! picked nodes with a primal-dual allocator ([`integral::pra`] or
//! [`integral::nra`]). [`exact`] holds brute-force optimal solvers for small
//! instances and [`experiment`] drives parameter sweeps.

pub mod error;
pub mod exact;
pub mod experiment;
pub mod fractional;
pub mod integral;
pub mod lp;
pub mod model;
pub mod placement;
pub mod rng;

pub use error::{Error, Result};
pub use fractional::{AssignmentMatrix, NodeSequence, NodeSet};
pub use model::{Instance, PathMetric};

/// Primal feasibility tolerance shared by the LP solver and allocation checks.
pub const EPS_FEAS: f64 = 1e-7;
