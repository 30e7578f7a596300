//! Constrained online convex optimization (COCO) laboratory.
//!
//! Per round a policy commits an action, then a convex cost and a convex
//! constraint are revealed. The crate bundles the geometric machinery
//! (projections onto nested convex sets, mean width, cone angle-width),
//! three online policies behind one step contract, instance generators for
//! the standard problem families, and a harness that turns every desk-scale
//! bound into an automated check.

pub mod error;
pub mod functions;
pub mod geometry;
pub mod harness;
pub mod instances;
pub mod metrics;
pub mod policies;
pub mod vector;

pub use error::{Error, Result};
pub use vector::{KahanSum, Vector};
