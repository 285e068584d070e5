//! Geodesic balls and discrete-group ball packings in S²×ℝ.
//!
//! The crate covers the metric of S²×ℝ ([`geometry`]), volumes of geodesic
//! balls and prisms ([`volume`]), the reflection space groups 4q.I.2 and
//! their relatives ([`symmetry`]), and packing densities with the optimizers
//! that search kernel points and glide parameters ([`packing`]).

pub mod error;
pub mod geometry;
pub mod mesh;
pub mod packing;
pub mod quadrature;
pub mod search;
pub mod symmetry;
pub mod volume;

pub use error::{Error, Result};
pub use geometry::{FiberedPoint, GeodesicParams, ModelPoint};
pub use quadrature::QuadratureConfig;
pub use volume::BallSpec;
