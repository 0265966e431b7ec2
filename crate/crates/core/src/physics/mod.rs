//! Energies, forces, chemical potentials, regularization and boundary
//! conditions of the membrane model.

pub mod boundary;
pub mod energy;
pub mod forces;
pub mod params;
pub mod potentials;
pub mod regularization;
pub mod system;

pub use boundary::{BoundaryConditions, BoundaryKind, Mask};
pub use energy::EnergyBreakdown;
pub use forces::ForceBreakdown;
pub use params::{Parameters, PressureLaw, Reservoir, KAPPA_BARE};
pub use potentials::ChemicalPotential;
pub use regularization::Regularization;
pub use system::{System, Term, Totals};
