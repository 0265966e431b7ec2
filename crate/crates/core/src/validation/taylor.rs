//! Taylor-remainder study: for each energy term `E` with derivative `g`,
//! `|E(x + eps d) - E(x) - eps <g, d>|` must shrink as `eps^2`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::fit::{logspace, loglog_slope};
use crate::error::Result;
use crate::physics::{System, Term};
use crate::Vec3;

/// Barrier strength is irrelevant here; potentials are tested without it.
const NO_BARRIER: f64 = 0.0;

#[derive(Clone, Debug, PartialEq)]
pub struct TaylorRow {
    pub term: &'static str,
    pub eps: Vec<f64>,
    pub remainder: Vec<f64>,
    /// Remainder divided by the largest energy magnitude seen in the sweep.
    pub relative: Vec<f64>,
    /// Fitted log-log order; `None` when every remainder is exactly zero
    /// or the term is linear.
    pub order: Option<f64>,
    /// Linear terms, whose remainder is pure roundoff.
    pub exact: bool,
}

impl TaylorRow {
    pub fn passes(&self, min_order: f64, exact_tol: f64) -> bool {
        if self.exact {
            return self.relative.iter().all(|&r| r <= exact_tol);
        }
        match self.order {
            Some(o) => o >= min_order,
            None => self.remainder.iter().all(|&r| r == 0.0),
        }
    }
}

pub fn default_eps() -> Vec<f64> {
    logspace(1e-6, 1e-2, 9)
}

/// Shape terms and their names as reported.
pub const SHAPE_TERMS: [(&str, Term); 6] = [
    ("f_b", Term::Bending),
    ("f_s", Term::Surface),
    ("f_p", Term::Pressure),
    ("f_d", Term::Dirichlet),
    ("f_a", Term::Adsorption),
    ("f_reg", Term::Regularization),
];

fn row(term: &'static str, eps: &[f64], energies: &[(f64, f64)], e0: f64, exact: bool) -> TaylorRow {
    let remainder: Vec<f64> = energies.iter().map(|&(e, lin)| (e - e0 - lin).abs()).collect();
    let scale = energies.iter().map(|p| p.0.abs()).fold(e0.abs(), f64::max);
    let relative = remainder.iter().map(|r| if scale > 0.0 { r / scale } else { *r }).collect();
    let order = if exact || remainder.iter().all(|&r| r == 0.0) {
        None
    } else {
        let (x, y): (Vec<f64>, Vec<f64>) =
            eps.iter().zip(&remainder).filter(|(_, &r)| r > 0.0).map(|(e, r)| (*e, *r)).unzip();
        Some(loglog_slope(&x, &y))
    };
    TaylorRow { term, eps: eps.to_vec(), remainder, relative, order, exact }
}

/// Runs the study for every shape and chemical term with random directions
/// restricted to the degrees of freedom left free by the boundary conditions.
pub fn taylor_exactness_study(system: &System, eps: &[f64], seed: u64) -> Result<Vec<TaylorRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = system.mesh.n_vertices();
    let mut dir: Vec<Vec3> =
        (0..n).map(|_| Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    // constrained vertices stay put, keeping boundary loops planar
    system.mask()?.apply_forces(&mut dir);
    let dphi: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut rows = Vec::new();

    for (name, term) in SHAPE_TERMS {
        let e0 = system.energy_terms(Some(term))?.total;
        let f = system.forces_terms(Some(term))?;
        let force = term_force(&f, term);
        let slope: f64 = -force.iter().zip(&dir).map(|(f, d)| f.dot(d)).sum::<f64>();
        let mut samples = Vec::with_capacity(eps.len());
        for &e in eps {
            let mut s = system.clone();
            for (p, d) in s.pos.iter_mut().zip(&dir) {
                *p += e * d;
            }
            samples.push((s.energy_terms(Some(term))?.total, e * slope));
        }
        rows.push(row(name, eps, &samples, e0, false));
    }

    let mu = system.potentials_unmasked(NO_BARRIER);
    for (name, term, potential, exact) in [
        ("mu_b", Term::Bending, &mu.bending, false),
        ("mu_d", Term::Dirichlet, &mu.diffusion, false),
        ("mu_a", Term::Adsorption, &mu.adsorption, true),
    ] {
        let e0 = system.energy_terms(Some(term))?.total;
        let slope: f64 = -potential.iter().zip(&dphi).map(|(m, d)| m * d).sum::<f64>();
        let mut samples = Vec::with_capacity(eps.len());
        for &e in eps {
            let mut s = system.clone();
            for (p, d) in s.phi.iter_mut().zip(&dphi) {
                *p += e * d;
            }
            samples.push((s.energy_terms(Some(term))?.total, e * slope));
        }
        rows.push(row(name, eps, &samples, e0, exact));
    }
    Ok(rows)
}

fn term_force(f: &crate::physics::ForceBreakdown, term: Term) -> &[Vec3] {
    match term {
        Term::Bending => &f.bending,
        Term::Surface => &f.surface,
        Term::Pressure => &f.pressure,
        Term::Dirichlet => &f.line_tension,
        Term::Adsorption => &f.adsorption,
        Term::Regularization => &f.regularization,
    }
}

/// A randomized icosphere with heterogeneous protein density and every
/// energy term active.
pub fn randomized_test_system(subdivisions: usize, seed: u64) -> Result<System> {
    use crate::io::generators::{icosphere, perturbed};
    use crate::physics::params::KAPPA_BARE;
    use crate::physics::{BoundaryConditions, Parameters, PressureLaw, Regularization, Reservoir};

    let (mesh, pos) = icosphere(subdivisions, 1.0)?;
    let pos = perturbed(&pos, 0.02, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let phi: Vec<f64> = (0..mesh.n_vertices()).map(|_| rng.gen_range(0.1..0.9)).collect();
    let params = Parameters {
        kappa_b: KAPPA_BARE,
        kappa_c: 3.0 * KAPPA_BARE,
        h0_c: 6.0,
        k_a: 1.0,
        area_ref: Some(0.95 * 4.0 * std::f64::consts::PI),
        pressure_law: PressureLaw::Exact,
        k_v: 0.1,
        conc_ratio: 0.3,
        epsilon: -1e-3,
        eta: 5e-4,
        ..Default::default()
    };
    let reference = perturbed(&pos, 0.01, seed + 1);
    let mut sys = System::new(mesh, pos, phi, params, Reservoir::default(), BoundaryConditions::default())?;
    sys.regularization = Some(Regularization::from_reference(&sys.mesh, &reference, 0.1, 0.1, 0.1));
    Ok(sys)
}

/// Copy of `system` with a heterogeneous protein density and every
/// zero-coefficient term switched on at a nominal strength, so a preset's
/// geometry can exercise the whole study. Saturated densities would be
/// clamped under perturbation and break the expansion.
pub fn activate_all_terms(system: &System, seed: u64) -> Result<System> {
    use crate::physics::{PressureLaw, Regularization};

    let mut sys = system.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xa11);
    for p in sys.phi.iter_mut() {
        *p = rng.gen_range(0.1..0.9);
    }
    let p = &mut sys.params;
    if p.kappa_c == 0.0 {
        p.kappa_c = 2.0 * p.kappa_b;
    }
    if p.h0_c == 0.0 {
        p.h0_c = 6.0;
    }
    if p.tension.is_none() && p.k_a == 0.0 {
        p.tension = Some(1e-4);
    }
    if p.epsilon == 0.0 {
        p.epsilon = -1e-3;
    }
    if p.eta == 0.0 {
        p.eta = 5e-4;
    }
    if p.pressure_law == PressureLaw::Off {
        if sys.mesh.has_boundary() && !sys.reservoir.enabled {
            sys.reservoir.enabled = true;
            sys.reservoir.volume = 4.0 / 3.0 * std::f64::consts::PI;
        }
        sys.params.pressure_law = PressureLaw::Phenomenological;
        let v = sys.totals(&sys.geometry())?.volume;
        sys.params.k_v = 0.1;
        sys.params.volume_ref = Some(1.05 * v);
    }
    if sys.regularization.is_none() {
        let reference = crate::io::generators::perturbed(&sys.pos, 0.01, seed + 1);
        sys.regularization = Some(Regularization::from_reference(&sys.mesh, &reference, 0.1, 0.1, 0.1));
    }
    sys.params.validate()?;
    Ok(sys)
}
