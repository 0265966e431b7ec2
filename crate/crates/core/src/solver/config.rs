use std::time::Duration;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Overdamped forward Euler on the shape.
    Dynamics,
    /// Nonlinear conjugate gradient energy minimization.
    Minimize,
    /// Alternating shape and protein steps.
    Coupled,
    /// Protein dynamics on a frozen shape.
    Protein,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Dynamics => "dynamics",
            Mode::Minimize => "minimize",
            Mode::Coupled => "coupled",
            Mode::Protein => "protein",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Mode::Dynamics, Mode::Minimize, Mode::Coupled, Mode::Protein].into_iter().find(|m| m.name() == s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub mode: Mode,
    /// Initial time step, s.
    pub dt: f64,
    /// Convergence threshold on the L2 norm of the masked net force, nN.
    pub tolerance: f64,
    /// Convergence threshold on the L2 norm of the chemical potential.
    pub chem_tolerance: f64,
    pub max_steps: usize,
    pub sufficient_decrease: f64,
    pub shrink: f64,
    pub max_backtracks: usize,
    pub growth: f64,
    /// A pure gradient step replaces the conjugate direction this often.
    pub cg_restart: usize,
    /// Interior-point barrier strength on the protein density, µm·nN.
    pub barrier: f64,
    /// Steps between remeshing passes; zero disables remeshing.
    pub remesh_period: usize,
    /// Steps between trajectory frames.
    pub output_period: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            mode: Mode::Dynamics,
            dt: 1e-3,
            tolerance: 1e-8,
            chem_tolerance: 1e-10,
            max_steps: 1000,
            sufficient_decrease: 1e-4,
            shrink: 0.5,
            max_backtracks: 64,
            growth: 1.2,
            cg_restart: 30,
            barrier: 1e-7,
            remesh_period: 0,
            output_period: 100,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(m.into()));
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return bad("shrink must lie in (0, 1)");
        }
        if !(self.sufficient_decrease > 0.0 && self.sufficient_decrease < 0.5) {
            return bad("sufficient_decrease must lie in (0, 0.5)");
        }
        if !(self.tolerance > 0.0) || !(self.chem_tolerance > 0.0) {
            return bad("tolerances must be positive");
        }
        if !(self.dt > 0.0) || !(self.growth >= 1.0) {
            return bad("dt must be positive and growth at least 1");
        }
        if self.barrier < 0.0 || self.cg_restart == 0 || self.output_period == 0 {
            return bad("barrier must be nonnegative; cg_restart and output_period positive");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Reason {
    Converged,
    MaxSteps,
    Error(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TerminationReport {
    pub reason: Reason,
    /// L2 norm of the masked net force at the final state.
    pub residual: f64,
    /// L2 norm of the masked chemical potential at the final state.
    pub chem_residual: f64,
    pub steps: usize,
    pub time: f64,
    pub wall_time: Duration,
}
