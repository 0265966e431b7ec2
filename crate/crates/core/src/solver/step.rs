//! Single steps: overdamped shape step, conjugate-gradient step and protein
//! step, each guarded by a backtracking line search.

use super::config::SolverConfig;
use super::norms::{l2_residual, l2_scalar};
use crate::error::{Error, Result};
use crate::physics::potentials::barrier_energy;
use crate::physics::System;
use crate::Vec3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepKind {
    Shape,
    Protein,
}

/// Record of one accepted step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepInfo {
    pub kind: StepKind,
    /// Accepted time step, s.
    pub dt: f64,
    pub energy_before: f64,
    pub energy_after: f64,
    /// Residual before the step.
    pub residual: f64,
    pub backtracks: usize,
}

/// Line search state carried between steps.
#[derive(Clone, Debug)]
pub struct Stepper {
    pub cfg: SolverConfig,
    pub dt_shape: f64,
    pub dt_protein: f64,
    pub barrier: f64,
    barrier_floor: f64,
    cg_prev_force: Option<Vec<Vec3>>,
    cg_direction: Option<Vec<Vec3>>,
    cg_count: usize,
}

impl Stepper {
    pub fn new(cfg: SolverConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Stepper {
            dt_shape: cfg.dt,
            dt_protein: cfg.dt,
            barrier: cfg.barrier,
            barrier_floor: cfg.barrier * 1e-6,
            cfg,
            cg_prev_force: None,
            cg_direction: None,
            cg_count: 0,
        })
    }

    /// Forgets the conjugate direction; required after the mesh changes.
    pub fn reset_direction(&mut self) {
        self.cg_prev_force = None;
        self.cg_direction = None;
        self.cg_count = 0;
    }

    /// Overdamped step `r += (dt / xi) f` with `dt` backtracked until the
    /// total energy decreases sufficiently. Returns `None` when the force
    /// vanishes.
    pub fn euler_step(&mut self, sys: &mut System) -> Result<Option<StepInfo>> {
        let f = sys.forces()?.net;
        let residual = l2_residual(&f);
        if residual == 0.0 {
            return Ok(None);
        }
        let e0 = sys.energy()?.total;
        let xi = sys.params.xi;
        let slope = residual * residual;
        let (dt, e1, backtracks) = self.shape_search(sys, &f, slope, e0, self.dt_shape, 1.0 / xi)?;
        self.dt_shape = if backtracks == 0 { dt * self.cfg.growth } else { dt };
        Ok(Some(StepInfo { kind: StepKind::Shape, dt, energy_before: e0, energy_after: e1, residual, backtracks }))
    }

    /// Polak-Ribiere+ conjugate gradient step with restarts on nonpositive
    /// beta, non-descent directions and every `cg_restart` steps.
    pub fn cg_step(&mut self, sys: &mut System) -> Result<Option<StepInfo>> {
        let f = sys.forces()?.net;
        let residual = l2_residual(&f);
        if residual == 0.0 {
            return Ok(None);
        }
        let mut dir = f.clone();
        if let (Some(prev), Some(d)) = (&self.cg_prev_force, &self.cg_direction) {
            if self.cg_count % self.cfg.cg_restart != 0 && prev.len() == f.len() {
                let num: f64 = f.iter().zip(prev).map(|(a, b)| a.dot(&(a - b))).sum();
                let den: f64 = prev.iter().map(|v| v.norm_squared()).sum();
                let beta = num / den;
                if beta > 0.0 {
                    let cand: Vec<Vec3> = f.iter().zip(d).map(|(a, b)| a + beta * b).collect();
                    if cand.iter().zip(&f).map(|(a, b)| a.dot(b)).sum::<f64>() > 0.0 {
                        dir = cand;
                    }
                }
            }
        }
        let slope: f64 = f.iter().zip(&dir).map(|(a, b)| a.dot(b)).sum();
        let e0 = sys.energy()?.total;
        let xi = sys.params.xi;
        let (dt, e1, backtracks) = self.shape_search(sys, &dir, slope, e0, self.dt_shape, 1.0 / xi)?;
        self.dt_shape = if backtracks == 0 { dt * self.cfg.growth } else { dt };
        self.cg_prev_force = Some(f);
        self.cg_direction = Some(dir);
        self.cg_count += 1;
        Ok(Some(StepInfo { kind: StepKind::Shape, dt, energy_before: e0, energy_after: e1, residual, backtracks }))
    }

    /// Backtracks `dt` until `E(r + dt * scale * dir) <= E0 - c dt scale slope`
    /// where `slope = <f, dir>`. Leaves `sys` at the accepted positions.
    fn shape_search(
        &self,
        sys: &mut System,
        dir: &[Vec3],
        slope: f64,
        e0: f64,
        dt0: f64,
        scale: f64,
    ) -> Result<(f64, f64, usize)> {
        let start = sys.pos.clone();
        let mut dt = dt0;
        for k in 0..=self.cfg.max_backtracks {
            let a = dt * scale;
            for ((p, s), d) in sys.pos.iter_mut().zip(&start).zip(dir) {
                *p = s + a * d;
            }
            if let Ok(e) = sys.energy() {
                if e.total.is_finite() && e.total <= e0 - self.cfg.sufficient_decrease * a * slope {
                    return Ok((dt, e.total, k));
                }
            }
            dt *= self.cfg.shrink;
        }
        sys.pos = start;
        Err(Error::LineSearchFailed(self.cfg.max_backtracks))
    }

    /// Protein step `phi += dt B (mu + mu_barrier)` on a frozen shape,
    /// backtracked on energy plus barrier and rejected if any density
    /// would leave `(0, 1)`.
    pub fn protein_step(&mut self, sys: &mut System, dt0: Option<f64>) -> Result<Option<StepInfo>> {
        let b = sys.params.mobility;
        if b == 0.0 {
            return Ok(None);
        }
        self.adapt_barrier(sys)?;
        let mu = sys.potentials(self.barrier)?.net;
        let residual = l2_scalar(&mu);
        if residual == 0.0 {
            return Ok(None);
        }
        let energy = |s: &System, barrier: f64| -> Result<f64> { Ok(s.energy()?.total + barrier_energy(&s.phi, barrier)) };
        let e0 = energy(sys, self.barrier)?;
        let slope = b * residual * residual;
        let start = sys.phi.clone();
        let mut dt = dt0.unwrap_or(self.dt_protein);
        for k in 0..=self.cfg.max_backtracks {
            let trial: Vec<f64> = start.iter().zip(&mu).map(|(p, m)| p + dt * b * m).collect();
            if trial.iter().all(|&p| p > 0.0 && p < 1.0) {
                sys.phi = trial;
                if let Ok(e1) = energy(sys, self.barrier) {
                    if e1 <= e0 - self.cfg.sufficient_decrease * dt * slope {
                        if dt0.is_none() {
                            self.dt_protein = if k == 0 { dt * self.cfg.growth } else { dt };
                        }
                        return Ok(Some(StepInfo {
                            kind: StepKind::Protein,
                            dt,
                            energy_before: e0,
                            energy_after: e1,
                            residual,
                            backtracks: k,
                        }));
                    }
                }
            } else if self.barrier == 0.0 {
                let v = trial.iter().position(|&p| !(p > 0.0 && p < 1.0)).unwrap_or(0);
                sys.phi = start;
                return Err(Error::PhiOutOfBounds { vertex: v });
            }
            dt *= self.cfg.shrink;
        }
        sys.phi = start;
        Err(Error::LineSearchFailed(self.cfg.max_backtracks))
    }

    /// Halves the barrier when it outweighs the physical potential at a
    /// vertex whose density is well inside the bounds.
    fn adapt_barrier(&mut self, sys: &System) -> Result<()> {
        if self.barrier <= self.barrier_floor {
            return Ok(());
        }
        let mu = sys.potentials(self.barrier)?;
        let dominated = (0..sys.phi.len()).any(|v| {
            let p = sys.phi[v];
            let physical = mu.net[v] - mu.barrier[v];
            (0.05..=0.95).contains(&p) && mu.barrier[v].abs() > physical.abs() && physical != 0.0
        });
        if dominated {
            self.barrier *= 0.5;
        }
        Ok(())
    }
}
