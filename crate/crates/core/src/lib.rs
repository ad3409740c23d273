//! Computational toolkit for G2-structures on 7-manifolds.

// Tensor formulas read most directly as index loops.
#![allow(clippy::needless_range_loop)]

pub mod alg7;
pub mod cl7;
pub mod curvature;
pub mod error;
pub mod fields;
pub mod g2point;
pub mod hypersurface;
pub mod jet;
pub mod linalg;
pub mod sampling;
pub mod scalar;

pub use error::{Error, Result};

/// Dimension of the base manifold.
pub const DIM: usize = 7;
