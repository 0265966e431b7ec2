//! Chemical potentials: negative derivatives of the energy with respect to
//! the protein density, integrated per vertex.

use crate::ddg::curvature::vertex_mean_curvature;
use crate::ddg::sparse::CsrMatrix;
use crate::mesh::{Geometry, HalfedgeMesh};

use super::params::Parameters;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ChemicalPotential {
    pub bending: Vec<f64>,
    pub adsorption: Vec<f64>,
    pub diffusion: Vec<f64>,
    pub barrier: Vec<f64>,
    pub net: Vec<f64>,
}

impl ChemicalPotential {
    pub fn sum_net(&mut self) {
        self.net = (0..self.bending.len())
            .map(|v| self.bending[v] + self.adsorption[v] + self.diffusion[v] + self.barrier[v])
            .collect();
    }
}

/// `A_i [2 kappa_i (H_i - H0_i) H0_c - kappa_c (H_i - H0_i)^2]`
pub fn bending_potential(mesh: &HalfedgeMesh, geom: &Geometry, kappa: &[f64], h0: &[f64], params: &Parameters) -> Vec<f64> {
    let hm = vertex_mean_curvature(mesh, geom);
    (0..mesh.n_vertices())
        .map(|v| {
            let a = geom.vertex_area[v];
            if !(a > 0.0) {
                return 0.0;
            }
            let d = hm.pointwise[v] - h0[v];
            a * (2.0 * kappa[v] * d * params.h0_c - params.kappa_c * d * d)
        })
        .collect()
}

/// `-epsilon A_i`
pub fn adsorption_potential(geom: &Geometry, epsilon: f64) -> Vec<f64> {
    geom.vertex_area.iter().map(|a| -epsilon * a).collect()
}

/// `-eta L phi`
pub fn diffusion_potential(laplacian: &CsrMatrix, phi: &[f64], eta: f64) -> Vec<f64> {
    if eta == 0.0 {
        return vec![0.0; phi.len()];
    }
    laplacian.mul_vec(phi).iter().map(|x| -eta * x).collect()
}

/// Interior-point barrier `s (1/phi - 1/(1 - phi))`, the negative derivative
/// of `-s sum [ln phi + ln(1 - phi)]`.
pub fn barrier_potential(phi: &[f64], strength: f64) -> Vec<f64> {
    if strength == 0.0 {
        return vec![0.0; phi.len()];
    }
    phi.iter().map(|&p| strength * (1.0 / p - 1.0 / (1.0 - p))).collect()
}

pub fn barrier_energy(phi: &[f64], strength: f64) -> f64 {
    if strength == 0.0 {
        return 0.0;
    }
    -strength * phi.iter().map(|&p| p.ln() + (1.0 - p).ln()).sum::<f64>()
}
