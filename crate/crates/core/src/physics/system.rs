//! The simulated membrane: mesh, positions, protein density and physics.

use crate::ddg::laplacian::cotan_laplacian;
use crate::ddg::vectors::CurvatureVectors;
use crate::error::{Error, Result};
use crate::mesh::geometry::{enclosed_volume, loop_planar_area, volume_gradient, DEFAULT_PLANARITY_TOL};
use crate::mesh::{Geometry, HalfedgeMesh, Vec3};

use super::boundary::{BoundaryConditions, Mask};
use super::energy::{adsorption_energy, bending_energy, dirichlet_energy, EnergyBreakdown};
use super::forces::{
    adsorption_force, bending_force_with, capillary_force, line_tension_force, osmotic_force, ForceBreakdown,
};
use super::params::{modulated_unchecked, osmotic_pressure, pressure_energy, stretching_energy, surface_tension};
use super::params::{Parameters, Reservoir};
use super::potentials::{
    adsorption_potential, barrier_potential, bending_potential, diffusion_potential, ChemicalPotential,
};
use super::regularization::Regularization;

/// Area and volume of the whole system including any reservoir.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Totals {
    pub area: f64,
    pub volume: f64,
}

#[derive(Clone, Debug)]
pub struct System {
    pub mesh: HalfedgeMesh,
    pub pos: Vec<Vec3>,
    pub phi: Vec<f64>,
    pub params: Parameters,
    pub reservoir: Reservoir,
    pub bc: BoundaryConditions,
    pub regularization: Option<Regularization>,
    pub external_force: Option<Vec<Vec3>>,
    pub planarity_tol: f64,
    /// Vertices of interest followed through remeshing.
    pub anchors: Vec<usize>,
}

/// Selects which energy terms contribute; used by per-term derivative checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Term {
    Bending,
    Surface,
    Pressure,
    Dirichlet,
    Adsorption,
    Regularization,
}

impl System {
    /// Builds a system and fills in the preferred area when the stretching
    /// term needs one: the initial area for closed meshes, or the planar
    /// area spanned by the boundary loops plus the reservoir area for
    /// patches.
    pub fn new(
        mesh: HalfedgeMesh,
        pos: Vec<Vec3>,
        phi: Vec<f64>,
        mut params: Parameters,
        reservoir: Reservoir,
        bc: BoundaryConditions,
    ) -> Result<Self> {
        if pos.len() != mesh.n_vertices() {
            return Err(Error::LengthMismatch(pos.len(), mesh.n_vertices()));
        }
        if phi.len() != mesh.n_vertices() {
            return Err(Error::LengthMismatch(phi.len(), mesh.n_vertices()));
        }
        if let Some(v) = (0..pos.len()).find(|&v| !pos[v].iter().all(|x| x.is_finite())) {
            return Err(Error::InvalidParams(format!("non-finite position at vertex {v}")));
        }
        if (params.k_a > 0.0 || params.tension.is_some()) && params.area_ref.is_none() {
            params.area_ref = Some(default_area_ref(&mesh, &pos, &reservoir));
        }
        params.validate()?;
        Mask::build(&mesh, &bc)?;
        Ok(System {
            mesh,
            pos,
            phi,
            params,
            reservoir,
            bc,
            regularization: None,
            external_force: None,
            planarity_tol: DEFAULT_PLANARITY_TOL,
            anchors: Vec::new(),
        })
    }

    pub fn geometry(&self) -> Geometry {
        Geometry::new(&self.mesh, &self.pos)
    }

    pub fn mask(&self) -> Result<Mask> {
        Mask::build(&self.mesh, &self.bc)
    }

    /// System area and volume, with planar closure of boundary loops and
    /// the reservoir included.
    pub fn totals(&self, geom: &Geometry) -> Result<Totals> {
        let mut volume = self.reservoir.volume();
        if self.params.pressure_law != super::params::PressureLaw::Off || !self.mesh.has_boundary() {
            volume += enclosed_volume(&self.mesh, &self.pos, self.planarity_tol)?;
        }
        Ok(Totals { area: geom.total_area() + self.reservoir.area(), volume })
    }

    fn clamped_phi(&self) -> Vec<f64> {
        let mut out = self.phi.clone();
        let mut clamped = 0usize;
        for p in out.iter_mut() {
            if !(0.0..=1.0).contains(p) {
                *p = p.clamp(0.0, 1.0);
                clamped += 1;
            }
        }
        if clamped > 0 {
            log::warn!("clamped {clamped} protein density value(s) into [0, 1]");
        }
        out
    }

    pub fn energy(&self) -> Result<EnergyBreakdown> {
        self.energy_terms(None)
    }

    /// Energy restricted to one term, or all terms for `None`.
    pub fn energy_terms(&self, only: Option<Term>) -> Result<EnergyBreakdown> {
        let on = |t: Term| only.is_none_or(|o| o == t);
        let geom = self.geometry();
        let phi = self.clamped_phi();
        let (kappa, h0) = modulated_unchecked(&phi, &self.params);
        let totals = self.totals(&geom)?;
        let mut e = EnergyBreakdown::default();
        if on(Term::Bending) {
            e.bending = bending_energy(&self.mesh, &geom, &kappa, &h0);
        }
        if on(Term::Surface) {
            e.surface = stretching_energy(totals.area, &self.params)?;
        }
        if on(Term::Pressure) {
            e.pressure = pressure_energy(totals.volume, &self.params)?;
        }
        if on(Term::Dirichlet) {
            e.dirichlet = dirichlet_energy(&self.mesh, &self.pos, &geom, &phi, self.params.eta);
        }
        if on(Term::Adsorption) {
            e.adsorption = adsorption_energy(&geom, &phi, self.params.epsilon);
        }
        if on(Term::Regularization) {
            if let Some(r) = &self.regularization {
                e.regularization = r.energy(&self.mesh, &self.pos, &geom)?;
            }
        }
        if only.is_none() {
            if let Some(fe) = &self.external_force {
                e.external = -fe.iter().zip(&self.pos).map(|(f, r)| f.dot(r)).sum::<f64>();
            }
        }
        Ok(e.with_total())
    }

    /// Masked force breakdown.
    pub fn forces(&self) -> Result<ForceBreakdown> {
        let mut f = self.forces_terms(None)?;
        let mask = self.mask()?;
        for c in f.components_mut() {
            mask.apply_forces(c);
        }
        f.sum_net();
        Ok(f)
    }

    /// Unmasked forces restricted to one term, or all terms for `None`.
    pub fn forces_terms(&self, only: Option<Term>) -> Result<ForceBreakdown> {
        let on = |t: Term| only.is_none_or(|o| o == t);
        let n = self.mesh.n_vertices();
        let zero = vec![Vec3::zeros(); n];
        let geom = self.geometry();
        let phi = self.clamped_phi();
        let (kappa, h0) = modulated_unchecked(&phi, &self.params);
        let totals = self.totals(&geom)?;
        let cv = CurvatureVectors::new(&self.mesh, &self.pos, &geom);
        let mut f = ForceBreakdown {
            bending: zero.clone(),
            surface: zero.clone(),
            pressure: zero.clone(),
            line_tension: zero.clone(),
            adsorption: zero.clone(),
            regularization: zero.clone(),
            external: zero.clone(),
            net: zero,
        };
        if on(Term::Bending) {
            f.bending = bending_force_with(&self.mesh, &geom, &cv, &kappa, &h0);
        }
        if on(Term::Surface) {
            let tension = surface_tension(totals.area, &self.params)?;
            if tension != 0.0 {
                f.surface = capillary_force(&CurvatureVectors::accumulate(&self.mesh, &cv.mean), tension);
            }
        }
        if on(Term::Pressure) {
            let dp = osmotic_pressure(totals.volume, &self.params)?;
            if dp != 0.0 {
                f.pressure = osmotic_force(&volume_gradient(&self.mesh, &self.pos), dp);
            }
        }
        if on(Term::Dirichlet) {
            f.line_tension = line_tension_force(&self.mesh, &self.pos, &geom, &phi, self.params.eta);
        }
        if on(Term::Adsorption) {
            f.adsorption = adsorption_force(&self.mesh, &self.pos, &geom, &phi, self.params.epsilon);
        }
        if on(Term::Regularization) {
            if let Some(r) = &self.regularization {
                if r.is_active() {
                    f.regularization = r.forces(&self.mesh, &self.pos, &geom)?;
                }
            }
        }
        if only.is_none() {
            if let Some(fe) = &self.external_force {
                if fe.len() != n {
                    return Err(Error::LengthMismatch(fe.len(), n));
                }
                f.external = fe.clone();
            }
        }
        f.sum_net();
        Ok(f)
    }

    /// Masked chemical potentials with an interior-point barrier of the
    /// given strength.
    pub fn potentials(&self, barrier: f64) -> Result<ChemicalPotential> {
        let mut mu = self.potentials_unmasked(barrier);
        let mask = self.mask()?;
        for c in [&mut mu.bending, &mut mu.adsorption, &mut mu.diffusion, &mut mu.barrier] {
            mask.apply_potential(c);
        }
        mu.sum_net();
        Ok(mu)
    }

    pub fn potentials_unmasked(&self, barrier: f64) -> ChemicalPotential {
        let geom = self.geometry();
        let phi = self.clamped_phi();
        let (kappa, h0) = modulated_unchecked(&phi, &self.params);
        let diffusion = if self.params.eta != 0.0 {
            diffusion_potential(&cotan_laplacian(&self.mesh, &geom), &phi, self.params.eta)
        } else {
            vec![0.0; phi.len()]
        };
        let mut mu = ChemicalPotential {
            bending: bending_potential(&self.mesh, &geom, &kappa, &h0, &self.params),
            adsorption: adsorption_potential(&geom, self.params.epsilon),
            diffusion,
            barrier: barrier_potential(&self.phi, barrier),
            net: Vec::new(),
        };
        mu.sum_net();
        mu
    }

    pub fn center_of_mass(&self) -> Vec3 {
        let live: Vec<usize> = (0..self.mesh.n_vertices()).filter(|&v| self.mesh.vertex_alive(v)).collect();
        live.iter().map(|&v| self.pos[v]).sum::<Vec3>() / live.len() as f64
    }

    /// Total protein `sum_i A_i phi_i`.
    pub fn total_protein(&self, geom: &Geometry) -> f64 {
        geom.vertex_area.iter().zip(&self.phi).map(|(a, p)| a * p).sum()
    }
}

/// Preferred area used when none is given.
pub fn default_area_ref(mesh: &HalfedgeMesh, pos: &[Vec3], reservoir: &Reservoir) -> f64 {
    if mesh.has_boundary() {
        mesh.boundary_loops().iter().map(|lp| loop_planar_area(mesh, pos, lp)).sum::<f64>() + reservoir.area()
    } else {
        Geometry::new(mesh, pos).total_area() + reservoir.area()
    }
}
