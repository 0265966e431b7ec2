//! Time integration, energy minimization and protein dynamics.

pub mod config;
pub mod driver;
pub mod norms;
pub mod step;

pub use config::{Mode, Reason, SolverConfig, TerminationReport};
pub use driver::{run, Observer, Progress, RunOutcome, Silent};
pub use norms::{l1_field_error, l1_vector_error, l2_residual};
pub use step::{StepInfo, StepKind, Stepper};
