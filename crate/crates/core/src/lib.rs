//! Mechanochemical lipid-membrane simulation on triangle meshes.
//!
//! Energies are discrete Helfrich-type functionals of vertex positions and a
//! per-vertex protein density. Every force and chemical potential is the
//! exact derivative of its discrete energy, so gradient checks converge at
//! second order.

pub mod ddg;
pub mod error;
pub mod io;
pub mod mesh;
pub mod physics;
pub mod remesh;
pub mod scenario;
pub mod solver;
pub mod validation;

pub use error::{Error, Result};
pub use mesh::{HalfedgeMesh, Vec3};
