//! Topological machinery for point clouds and images: alpha and lower-star
//! persistent homology, persistence-diagram metrics, Voronoi-based point
//! cloud densification, a persistence-based image loss with analytic
//! gradients, and a topology-aware optimizer with checkable convergence
//! bounds.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod fixtures;
pub mod format;
pub mod geometry;
pub mod lpvi;
pub mod metrics;
pub mod optimizer;
pub mod par;
pub mod persistence;
pub mod persloss;

pub use error::{Result, TopoError};
