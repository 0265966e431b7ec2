//! Run configurations: mesh source, physics, boundary conditions, protein
//! initialization and solver settings, plus the named scenario presets.

pub mod output;
mod presets;

pub use output::{run_to_directory, OutputOptions, RunFiles, RunSummary};
pub use presets::{make_preset, PRESET_NAMES};

use crate::ddg::geodesic::geodesic_distance;
use crate::error::{Error, Result};
use crate::io::generators::{flat_hex_patch, icosphere, perturbed, spheroid, spine, tube, MeshAndPositions};
use crate::mesh::geometry::{enclosed_volume, total_area, DEFAULT_PLANARITY_TOL};
use crate::mesh::{HalfedgeMesh, Vec3};
use crate::physics::{BoundaryConditions, BoundaryKind, Parameters, Regularization, Reservoir, System, Totals};
use crate::remesh::RemeshConfig;
use crate::solver::{run, Observer, Progress, RunOutcome, SolverConfig};

/// Where the initial mesh comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum MeshSpec {
    Icosphere { subdivisions: usize, radius: f64 },
    /// Optionally rescaled so the discrete area equals `area`.
    Spheroid { subdivisions: usize, a: f64, c: f64, area: Option<f64> },
    Tube { radius: f64, length: f64, n_around: usize },
    HexPatch { radius: f64, rings: usize },
    Spine { subdivisions: usize, radius: f64 },
    File { path: String },
}

impl MeshSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            MeshSpec::Icosphere { .. } => "icosphere",
            MeshSpec::Spheroid { .. } => "spheroid",
            MeshSpec::Tube { .. } => "tube",
            MeshSpec::HexPatch { .. } => "patch",
            MeshSpec::Spine { .. } => "spine",
            MeshSpec::File { .. } => "file",
        }
    }

    /// Generates (or reads) the mesh and returns positions plus any density
    /// stored in the file.
    pub fn build(&self) -> Result<(HalfedgeMesh, Vec<Vec3>, Option<Vec<f64>>)> {
        let plain = |r: Result<MeshAndPositions>| r.map(|(m, p)| (m, p, None));
        match *self {
            MeshSpec::Icosphere { subdivisions, radius } => plain(icosphere(subdivisions, radius)),
            MeshSpec::Spheroid { subdivisions, a, c, area } => {
                let (m, mut p) = spheroid(subdivisions, a, c)?;
                if let Some(target) = area {
                    let s = (target / total_area(&m, &p)).sqrt();
                    p.iter_mut().for_each(|x| *x *= s);
                }
                Ok((m, p, None))
            }
            MeshSpec::Tube { radius, length, n_around } => plain(tube(radius, length, n_around)),
            MeshSpec::HexPatch { radius, rings } => plain(flat_hex_patch(radius, rings)),
            MeshSpec::Spine { subdivisions, radius } => plain(spine(subdivisions, radius)),
            MeshSpec::File { ref path } => {
                let data = crate::io::mesh_file::read_mesh(std::path::Path::new(path))?;
                Ok((data.mesh, data.pos, data.phi))
            }
        }
    }
}

/// Initial protein density.
#[derive(Clone, Debug, PartialEq)]
pub enum ProteinInit {
    Uniform(f64),
    /// Smoothed step on the geodesic distance from the vertex nearest `center`.
    GeodesicDisk { center: Vec3, radius: f64, sharpness: f64 },
}

/// Everything needed to set up and run a simulation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub preset: Option<String>,
    pub mesh: MeshSpec,
    /// Uniform coordinate noise applied after generation, µm.
    pub perturb: f64,
    pub seed: u64,
    pub params: Parameters,
    pub reservoir: Reservoir,
    pub boundary: BoundaryKind,
    pub protein_dirichlet: Option<f64>,
    pub protein: ProteinInit,
    pub solver: SolverConfig,
    pub remesh: Option<RemeshConfig>,
    /// Edge, face and conformal regularization gains.
    pub regularization: [f64; 3],
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            preset: None,
            mesh: MeshSpec::Icosphere { subdivisions: 3, radius: 1.0 },
            perturb: 0.0,
            seed: 0,
            params: Parameters::default(),
            reservoir: Reservoir::default(),
            boundary: BoundaryKind::None,
            protein_dirichlet: None,
            protein: ProteinInit::Uniform(0.0),
            solver: SolverConfig::default(),
            remesh: None,
            regularization: [0.0; 3],
        }
    }
}

impl RunConfig {
    pub fn boundary_conditions(&self) -> BoundaryConditions {
        BoundaryConditions { loops: vec![self.boundary], protein_dirichlet: self.protein_dirichlet }
    }

    /// Builds the initial system described by this configuration.
    pub fn build_system(&self) -> Result<System> {
        self.solver.validate()?;
        if let Some(r) = &self.remesh {
            r.validate()?;
        }
        let (mesh, mut pos, file_phi) = self.mesh.build()?;
        if self.perturb > 0.0 {
            pos = perturbed(&pos, self.perturb, self.seed);
        }
        let mut phi = match file_phi {
            Some(p) => p,
            None => initial_protein(&mesh, &pos, &self.protein)?,
        };
        let anchors = match self.protein {
            ProteinInit::GeodesicDisk { center, .. } => vec![nearest_vertex(&pos, &center)],
            ProteinInit::Uniform(_) => Vec::new(),
        };
        if let Some(v) = self.protein_dirichlet {
            for b in (0..mesh.n_vertices()).filter(|&b| mesh.is_boundary_vertex(b)) {
                phi[b] = v;
            }
        }
        let mut sys = System::new(mesh, pos, phi, self.params.clone(), self.reservoir, self.boundary_conditions())?;
        sys.anchors = anchors;
        let [k_e, k_f, k_c] = self.regularization;
        if k_e > 0.0 || k_f > 0.0 || k_c > 0.0 {
            sys.regularization = Some(Regularization::from_reference(&sys.mesh, &sys.pos, k_e, k_f, k_c));
        }
        Ok(sys)
    }
}

/// Runs the solver on a system built from this configuration. A prescribed
/// geodesic-disk density (zero mobility) is re-evaluated around the tracked
/// center after every remeshing pass; Dirichlet boundary densities are
/// re-imposed.
pub fn run_config(cfg: &RunConfig, sys: &mut System, observer: &mut dyn Observer) -> Result<RunOutcome> {
    let mut keeper = ProfileKeeper { cfg, inner: observer };
    run(sys, &cfg.solver, cfg.remesh.as_ref(), &mut keeper)
}

struct ProfileKeeper<'a> {
    cfg: &'a RunConfig,
    inner: &'a mut dyn Observer,
}

impl Observer for ProfileKeeper<'_> {
    fn observe(&mut self, progress: &Progress, sys: &System) -> Result<()> {
        self.inner.observe(progress, sys)
    }

    fn after_remesh(&mut self, sys: &mut System) -> Result<()> {
        if let ProteinInit::GeodesicDisk { radius, sharpness, .. } = self.cfg.protein {
            if sys.params.mobility == 0.0 {
                if let Some(&c) = sys.anchors.first() {
                    sys.phi = protein_profile_geodesic_disk(&sys.mesh, &sys.pos, c, radius, sharpness)?;
                }
            }
        }
        if let Some(v) = self.cfg.protein_dirichlet {
            for b in (0..sys.mesh.n_vertices()).filter(|&b| sys.mesh.is_boundary_vertex(b)) {
                sys.phi[b] = v;
            }
        }
        self.inner.after_remesh(sys)
    }
}

/// Evaluates a protein initialization on a mesh.
pub fn initial_protein(mesh: &HalfedgeMesh, pos: &[Vec3], init: &ProteinInit) -> Result<Vec<f64>> {
    match *init {
        ProteinInit::Uniform(v) => {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::OutOfRangePhi { vertex: 0, value: v });
            }
            Ok(vec![v; mesh.n_vertices()])
        }
        ProteinInit::GeodesicDisk { center, radius, sharpness } => {
            let c = nearest_vertex(pos, &center);
            protein_profile_geodesic_disk(mesh, pos, c, radius, sharpness)
        }
    }
}

pub fn nearest_vertex(pos: &[Vec3], p: &Vec3) -> usize {
    (0..pos.len()).min_by(|&a, &b| (pos[a] - p).norm().total_cmp(&(pos[b] - p).norm())).unwrap_or(0)
}

/// `phi = (1 - tanh(sharpness (d - radius))) / 2` on the geodesic distance
/// `d` from `center`.
pub fn protein_profile_geodesic_disk(
    mesh: &HalfedgeMesh,
    pos: &[Vec3],
    center: usize,
    radius: f64,
    sharpness: f64,
) -> Result<Vec<f64>> {
    let d = geodesic_distance(mesh, pos, &[center])?;
    Ok(d.iter().map(|&d| (0.5 * (1.0 - (sharpness * (d - radius)).tanh())).clamp(0.0, 1.0)).collect())
}

/// Area and volume of a mesh plus reservoir, closing each boundary loop
/// with a planar fan.
pub fn patch_system_totals(mesh: &HalfedgeMesh, pos: &[Vec3], reservoir: &Reservoir) -> Result<Totals> {
    Ok(Totals {
        area: total_area(mesh, pos) + reservoir.area(),
        volume: enclosed_volume(mesh, pos, DEFAULT_PLANARITY_TOL)? + reservoir.volume(),
    })
}
