use std::f64::consts::PI;

use super::{MeshSpec, ProteinInit, RunConfig};
use crate::error::{Error, Result};
use crate::mesh::Vec3;
use crate::remesh::RemeshConfig;
use crate::physics::{BoundaryKind, Parameters, PressureLaw, Reservoir, KAPPA_BARE};
use crate::solver::{Mode, SolverConfig};

pub const PRESET_NAMES: [&str; 13] = [
    "vesicle-biconcave",
    "vesicle-dumbbell",
    "tube-reference",
    "tube-pearling",
    "tube-cylinder",
    "tube-tension",
    "patch-control",
    "patch-scaffold",
    "patch-line-tension",
    "spine-protein",
    "bud-hypertonic",
    "bud-isotonic",
    "bud-hypotonic",
];

/// Prescribed tension of the open patches, nN/µm.
const PATCH_TENSION: f64 = 1e-7;

fn vesicle(name: &str, a: f64, c: f64, conc_ratio: f64, h0: f64) -> RunConfig {
    let area = 4.0 * PI;
    RunConfig {
        preset: Some(name.into()),
        mesh: MeshSpec::Spheroid { subdivisions: 3, a, c, area: Some(area) },
        params: Parameters {
            kappa_b: KAPPA_BARE,
            h0_c: h0,
            k_a: 1.0,
            area_ref: Some(area),
            pressure_law: PressureLaw::Exact,
            k_v: 0.1,
            conc_ratio,
            ..Default::default()
        },
        protein: ProteinInit::Uniform(1.0),
        solver: SolverConfig { mode: Mode::Minimize, dt: 1e-2, tolerance: 1e-8, max_steps: 20000, ..Default::default() },
        // keeps tangential drift from crumpling the mesh and stalling the line search
        regularization: [0.0, 0.0, 1e-6],
        ..Default::default()
    }
}

fn tube(name: &str, conc_ratio: f64, tension: f64) -> RunConfig {
    RunConfig {
        preset: Some(name.into()),
        mesh: MeshSpec::Tube { radius: 1.0, length: 19.9, n_around: 24 },
        params: Parameters {
            kappa_b: KAPPA_BARE,
            h0_c: 1.0,
            tension: Some(tension),
            pressure_law: PressureLaw::Exact,
            k_v: 0.01,
            conc_ratio,
            ..Default::default()
        },
        reservoir: Reservoir { enabled: true, area: 0.0, volume: 4.19 },
        boundary: BoundaryKind::Roller { axis: Vec3::z() },
        protein: ProteinInit::Uniform(1.0),
        solver: SolverConfig { mode: Mode::Dynamics, dt: 1.0, tolerance: 1e-9, max_steps: 5000, ..Default::default() },
        ..Default::default()
    }
}

fn patch(name: &str, kappa_c: f64, eta: f64) -> RunConfig {
    RunConfig {
        preset: Some(name.into()),
        mesh: MeshSpec::HexPatch { radius: 1.0, rings: 16 },
        params: Parameters { kappa_b: KAPPA_BARE, kappa_c, h0_c: 6.0, tension: Some(PATCH_TENSION), eta, ..Default::default() },
        boundary: BoundaryKind::Fixed,
        protein: ProteinInit::GeodesicDisk { center: Vec3::zeros(), radius: 0.5, sharpness: 20.0 },
        solver: SolverConfig {
            mode: Mode::Dynamics,
            dt: 1.0,
            tolerance: 1e-7,
            max_steps: 8000,
            remesh_period: 50,
            ..Default::default()
        },
        // large deformation of the coat tangles the mesh without remeshing
        remesh: Some(RemeshConfig { split: false, shift: true, ..Default::default() }),
        regularization: [0.0, 0.0, 1e-6],
        ..Default::default()
    }
}

fn bud(name: &str, volume_ref: f64) -> RunConfig {
    RunConfig {
        preset: Some(name.into()),
        mesh: MeshSpec::Icosphere { subdivisions: 3, radius: 1.0 },
        params: Parameters {
            kappa_b: KAPPA_BARE,
            kappa_c: 0.0,
            h0_c: 10.0,
            k_a: 1.0,
            pressure_law: PressureLaw::Phenomenological,
            k_v: 0.5,
            volume_ref: Some(volume_ref),
            epsilon: -1e-3,
            eta: 0.1,
            mobility: 3.0,
            ..Default::default()
        },
        protein: ProteinInit::Uniform(0.1),
        solver: SolverConfig { mode: Mode::Coupled, dt: 1e-2, tolerance: 1e-9, max_steps: 2000, ..Default::default() },
        ..Default::default()
    }
}

/// The named scenario presets.
pub fn make_preset(name: &str) -> Result<RunConfig> {
    Ok(match name {
        // oblate start; raised concentration ratio deflates towards a biconcave disc
        "vesicle-biconcave" => vesicle(name, 1.0, 0.5, 0.35, 0.0),
        // prolate start with uniform spontaneous curvature
        "vesicle-dumbbell" => vesicle(name, 0.5, 1.0, 0.3, 1.5),
        "tube-reference" => tube(name, 0.022, 1e-7),
        "tube-pearling" => tube(name, 0.030, 1e-7),
        "tube-cylinder" => tube(name, 0.051, 1e-7),
        "tube-tension" => tube(name, 0.022, 1e-4),
        "patch-control" => patch(name, KAPPA_BARE, 0.0),
        "patch-scaffold" => patch(name, 3.0 * KAPPA_BARE, 0.0),
        "patch-line-tension" => patch(name, KAPPA_BARE, 5e-4),
        "spine-protein" => RunConfig {
            preset: Some(name.into()),
            mesh: MeshSpec::Spine { subdivisions: 3, radius: 1.0 },
            params: Parameters { kappa_b: KAPPA_BARE, kappa_c: 0.0, h0_c: 10.0, eta: 0.01, mobility: 3.0, ..Default::default() },
            boundary: BoundaryKind::Fixed,
            protein_dirichlet: Some(0.1),
            protein: ProteinInit::Uniform(0.1),
            solver: SolverConfig { mode: Mode::Protein, dt: 1e-2, chem_tolerance: 1e-10, max_steps: 2000, ..Default::default() },
            ..Default::default()
        },
        "bud-hypertonic" => bud(name, 2.91),
        "bud-isotonic" => bud(name, 3.95),
        "bud-hypotonic" => bud(name, 4.99),
        _ => return Err(Error::UnknownPreset(name.into())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_builds_a_valid_system() {
        for name in PRESET_NAMES {
            let cfg = make_preset(name).unwrap();
            let sys = cfg.build_system().unwrap_or_else(|e| panic!("{name}: {e}"));
            sys.mesh.validate().unwrap();
            let e = sys.energy().unwrap();
            assert!(e.total.is_finite(), "{name}");
        }
    }

    #[test]
    fn unknown_preset_is_an_error() {
        assert_eq!(make_preset("nope").unwrap_err().kind(), "UnknownPreset");
    }

    #[test]
    fn tube_topology_and_length() {
        let sys = make_preset("tube-reference").unwrap().build_system().unwrap();
        assert_eq!(sys.mesh.boundary_loops().len(), 2);
        assert_eq!(sys.mesh.euler_characteristic(), 0);
        let zmax = sys.pos.iter().map(|p| p.z).fold(f64::MIN, f64::max);
        assert!((zmax - 19.9).abs() < 1e-12);
    }

    #[test]
    fn vesicle_area_matches_preferred_area() {
        let sys = make_preset("vesicle-biconcave").unwrap().build_system().unwrap();
        let a = sys.geometry().total_area();
        assert!((a - 4.0 * PI).abs() < 1e-12);
    }
}
