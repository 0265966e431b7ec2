//! Solver loop: steps the system in the configured mode, remeshes
//! periodically and reports every accepted step to an observer.

use std::time::Instant;

use super::config::{Mode, Reason, SolverConfig, TerminationReport};
use super::norms::{l2_residual, l2_scalar};
use super::step::{StepInfo, Stepper};
use crate::error::Result;
use crate::physics::System;
use crate::remesh::{remesh_system, MutationLog, RemeshConfig, RemeshReport};

/// What the observer sees after each iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct Progress {
    pub step: usize,
    pub time: f64,
    pub shape: Option<StepInfo>,
    pub protein: Option<StepInfo>,
    pub remesh: Option<RemeshReport>,
    /// Total energy immediately before and after remeshing, if it ran.
    pub remesh_energy_jump: Option<(f64, f64)>,
}

/// Observer hook; returning an error aborts the run.
pub trait Observer {
    fn observe(&mut self, progress: &Progress, sys: &System) -> Result<()>;

    /// Called right after a remeshing pass that changed the mesh, before
    /// the energy jump is measured.
    fn after_remesh(&mut self, _sys: &mut System) -> Result<()> {
        Ok(())
    }
}

impl<F: FnMut(&Progress, &System) -> Result<()>> Observer for F {
    fn observe(&mut self, progress: &Progress, sys: &System) -> Result<()> {
        self(progress, sys)
    }
}

/// Observer that ignores everything.
pub struct Silent;

impl Observer for Silent {
    fn observe(&mut self, _: &Progress, _: &System) -> Result<()> {
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub report: TerminationReport,
    pub log: MutationLog,
}

fn residuals(sys: &System, mode: Mode, barrier: f64) -> Result<(f64, f64)> {
    let mech = match mode {
        Mode::Protein => 0.0,
        _ => l2_residual(&sys.forces()?.net),
    };
    let chem = match mode {
        Mode::Coupled | Mode::Protein if sys.params.mobility > 0.0 => l2_scalar(&sys.potentials(barrier)?.net),
        _ => 0.0,
    };
    Ok((mech, chem))
}

fn converged(cfg: &SolverConfig, mech: f64, chem: f64) -> bool {
    match cfg.mode {
        Mode::Dynamics | Mode::Minimize => mech <= cfg.tolerance,
        Mode::Protein => chem <= cfg.chem_tolerance,
        Mode::Coupled => mech <= cfg.tolerance && chem <= cfg.chem_tolerance,
    }
}

/// Runs the solver until convergence, `max_steps`, or an error. Solver
/// errors end the run with [`Reason::Error`]; observer errors propagate.
pub fn run(
    sys: &mut System,
    cfg: &SolverConfig,
    remesh: Option<&RemeshConfig>,
    observer: &mut dyn Observer,
) -> Result<RunOutcome> {
    let started = Instant::now();
    let mut stepper = Stepper::new(cfg.clone())?;
    let mut log = MutationLog::default();
    let mut time = 0.0;
    let mut step = 0;
    observer.observe(&Progress { step, time, shape: None, protein: None, remesh: None, remesh_energy_jump: None }, sys)?;

    let reason = loop {
        let (mech, chem) = match residuals(sys, cfg.mode, stepper.barrier) {
            Ok(r) => r,
            Err(e) => break Reason::Error(e.to_string()),
        };
        if converged(cfg, mech, chem) {
            break Reason::Converged;
        }
        if step >= cfg.max_steps {
            break Reason::MaxSteps;
        }

        let outcome: Result<(Option<StepInfo>, Option<StepInfo>)> = (|| match cfg.mode {
            Mode::Dynamics => Ok((stepper.euler_step(sys)?, None)),
            Mode::Minimize => Ok((stepper.cg_step(sys)?, None)),
            Mode::Protein => Ok((None, stepper.protein_step(sys, None)?)),
            Mode::Coupled => {
                let s = stepper.euler_step(sys)?;
                let dt = s.map(|s| s.dt);
                Ok((s, stepper.protein_step(sys, dt)?))
            }
        })();
        let (shape, protein) = match outcome {
            Ok(p) => p,
            Err(e) => break Reason::Error(e.to_string()),
        };
        if shape.is_none() && protein.is_none() {
            // Zero force and zero potential: a stationary point.
            break Reason::Converged;
        }
        step += 1;
        time += shape.or(protein).map_or(0.0, |s| s.dt);

        let mut progress = Progress { step, time, shape, protein, remesh: None, remesh_energy_jump: None };
        if let Some(rc) = remesh.filter(|_| cfg.remesh_period > 0 && step % cfg.remesh_period == 0) {
            let before = sys.energy().map(|e| e.total).unwrap_or(f64::NAN);
            match remesh_system(sys, rc, &mut log) {
                Ok(rep) => {
                    if rep.changed_topology() || rep.shifted {
                        stepper.reset_direction();
                        observer.after_remesh(sys)?;
                        let after = sys.energy().map(|e| e.total).unwrap_or(f64::NAN);
                        log::info!("remesh at step {step}: energy {before:e} -> {after:e}");
                        progress.remesh_energy_jump = Some((before, after));
                    }
                    progress.remesh = Some(rep);
                }
                Err(e) => break Reason::Error(e.to_string()),
            }
        }
        observer.observe(&progress, sys)?;
    };

    let (residual, chem_residual) = residuals(sys, cfg.mode, stepper.barrier).unwrap_or((f64::NAN, f64::NAN));
    let report = TerminationReport { reason, residual, chem_residual, steps: step, time, wall_time: started.elapsed() };
    Ok(RunOutcome { report, log })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::generators::{flat_hex_patch, icosphere, spheroid};
    use crate::physics::{BoundaryConditions, BoundaryKind, Parameters, PressureLaw, Reservoir};

    fn vesicle(a: f64, c: f64) -> System {
        let (m, p) = spheroid(2, a, c).unwrap();
        let n = m.n_vertices();
        let params = Parameters {
            k_a: 1.0,
            k_v: 0.1,
            pressure_law: PressureLaw::Exact,
            conc_ratio: 0.3,
            area_ref: Some(4.0 * std::f64::consts::PI),
            ..Default::default()
        };
        System::new(m, p, vec![0.0; n], params, Reservoir::default(), BoundaryConditions::default()).unwrap()
    }

    #[test]
    fn converged_start_returns_immediately() {
        let (m, p) = flat_hex_patch(1.0, 3).unwrap();
        let n = m.n_vertices();
        let mut sys = System::new(m, p.clone(), vec![0.0; n], Parameters::default(), Reservoir::default(),
            BoundaryConditions::uniform(BoundaryKind::Pinned)).unwrap();
        let out = run(&mut sys, &SolverConfig::default(), None, &mut Silent).unwrap();
        assert_eq!(out.report.reason, Reason::Converged);
        assert_eq!(out.report.steps, 0);
        assert_eq!(sys.pos, p);
    }

    #[test]
    fn euler_steps_never_increase_energy_and_keep_center() {
        let mut sys = vesicle(1.0, 0.7);
        let c0 = sys.center_of_mass();
        let cfg = SolverConfig { max_steps: 30, dt: 1e-2, ..Default::default() };
        let mut energies = Vec::new();
        let mut obs = |p: &Progress, _: &System| {
            if let Some(s) = p.shape {
                energies.push((s.energy_before, s.energy_after));
            }
            Ok(())
        };
        let out = run(&mut sys, &cfg, None, &mut obs).unwrap();
        assert_eq!(out.report.reason, Reason::MaxSteps);
        assert!(energies.iter().all(|(b, a)| a < b));
        assert!((sys.center_of_mass() - c0).norm() < 1e-10);
    }

    #[test]
    fn minimization_reaches_tolerance_on_a_sphere() {
        let (m, p) = icosphere(2, 1.0).unwrap();
        let n = m.n_vertices();
        let params = Parameters { k_a: 0.1, area_ref: Some(4.0 * std::f64::consts::PI * 1.1), ..Default::default() };
        let mut sys = System::new(m, p, vec![0.0; n], params, Reservoir::default(), BoundaryConditions::default()).unwrap();
        let cfg = SolverConfig { mode: Mode::Minimize, tolerance: 1e-7, max_steps: 5000, ..Default::default() };
        let out = run(&mut sys, &cfg, None, &mut Silent).unwrap();
        assert_eq!(out.report.reason, Reason::Converged, "{:?}", out.report);
        assert!(out.report.residual <= 1e-7);
    }
}
