//! Mesh connectivity, embedded geometry and per-vertex fields.

pub mod field;
pub mod geometry;
pub mod halfedge;

pub use field::{Measure, ScalarField, VectorField};
pub use geometry::{Geometry, Vec3};
pub use halfedge::{edge_of, twin, HalfedgeMesh, INVALID};
