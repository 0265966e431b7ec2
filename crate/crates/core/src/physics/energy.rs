//! Scalar energies. Each takes cached [`Geometry`] of the configuration.

use rayon::prelude::*;

use crate::ddg::curvature::vertex_mean_curvature;
use crate::ddg::gradient::phi_weighted_edges;
use crate::mesh::{Geometry, HalfedgeMesh, Vec3};

/// Energy terms in µm·nN. `total` is the sum of all other fields.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EnergyBreakdown {
    pub bending: f64,
    pub surface: f64,
    pub pressure: f64,
    pub dirichlet: f64,
    pub adsorption: f64,
    pub regularization: f64,
    /// Potential of the external force field, `-sum f_ext . r`.
    pub external: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    pub fn with_total(mut self) -> Self {
        self.total = self.bending
            + self.surface
            + self.pressure
            + self.dirichlet
            + self.adsorption
            + self.regularization
            + self.external;
        self
    }
}

/// `sum_i kappa_i (Hint_i - A_i H0_i)^2 / A_i`
pub fn bending_energy(mesh: &HalfedgeMesh, geom: &Geometry, kappa: &[f64], h0: &[f64]) -> f64 {
    let h = vertex_mean_curvature(mesh, geom);
    (0..mesh.n_vertices())
        .filter(|&v| mesh.vertex_alive(v) && geom.vertex_area[v] > 0.0)
        .map(|v| {
            let a = geom.vertex_area[v];
            kappa[v] * (h.integrated[v] - a * h0[v]).powi(2) / a
        })
        .sum()
}

/// `(eta / 2) sum_f A_f |grad phi_f|^2`
pub fn dirichlet_energy(mesh: &HalfedgeMesh, pos: &[Vec3], geom: &Geometry, phi: &[f64], eta: f64) -> f64 {
    if eta == 0.0 {
        return 0.0;
    }
    let per_face: Vec<f64> = (0..mesh.n_faces())
        .into_par_iter()
        .map(|f| {
            if !mesh.face_alive(f) || !(geom.face_area[f] > 0.0) {
                return 0.0;
            }
            let [a, b, c] = mesh.face_vertices(f);
            let u = phi_weighted_edges(&pos[a], &pos[b], &pos[c], phi[a], phi[b], phi[c]);
            u.norm_squared() / (8.0 * geom.face_area[f])
        })
        .collect();
    eta * per_face.iter().sum::<f64>()
}

/// `epsilon sum_i A_i phi_i`
pub fn adsorption_energy(geom: &Geometry, phi: &[f64], epsilon: f64) -> f64 {
    if epsilon == 0.0 {
        return 0.0;
    }
    epsilon * geom.vertex_area.iter().zip(phi).map(|(a, p)| a * p).sum::<f64>()
}
