//! Preimages of relaxed one-sided Lipschitz (ROSL) set-valued maps with a
//! negative constant, computed as intersections of ball-union covers and
//! checked against a brute-force grid oracle.
//!
//! - [`geometry`]: vectors, balls, V-polytopes, hulls, projections.
//! - [`maps`]: set-valued maps and sampled ROSL checks.
//! - [`preimage`]: covers `G_F(x, ȳ)`, grid masks, oracle, witnesses.
//! - [`cli`]: the `rosl` command-line front end.

pub mod cli;
pub mod geometry;
pub mod maps;
pub mod preimage;

pub use geometry::{Ball, Polytope, Vector, EPS_GEOM};
pub use maps::SetValuedMap;
pub use preimage::{GridMask, GridSpec};
