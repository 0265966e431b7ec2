//! Forces: negative shape derivatives of each energy, integrated per vertex.

use rayon::prelude::*;

use crate::ddg::curvature::vertex_mean_curvature;
use crate::ddg::gradient::phi_weighted_edges;
use crate::ddg::primitives::grad_face_area;
use crate::ddg::vectors::CurvatureVectors;
use crate::mesh::{Geometry, HalfedgeMesh, Vec3};

/// Per-vertex integrated forces in nN.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ForceBreakdown {
    pub bending: Vec<Vec3>,
    pub surface: Vec<Vec3>,
    pub pressure: Vec<Vec3>,
    pub line_tension: Vec<Vec3>,
    pub adsorption: Vec<Vec3>,
    pub regularization: Vec<Vec3>,
    pub external: Vec<Vec3>,
    pub net: Vec<Vec3>,
}

impl ForceBreakdown {
    pub fn components_mut(&mut self) -> [&mut Vec<Vec3>; 7] {
        [
            &mut self.bending,
            &mut self.surface,
            &mut self.pressure,
            &mut self.line_tension,
            &mut self.adsorption,
            &mut self.regularization,
            &mut self.external,
        ]
    }

    pub fn sum_net(&mut self) {
        let n = self.bending.len();
        self.net = (0..n)
            .map(|v| {
                self.bending[v]
                    + self.surface[v]
                    + self.pressure[v]
                    + self.line_tension[v]
                    + self.adsorption[v]
                    + self.regularization[v]
                    + self.external[v]
            })
            .collect();
    }
}

/// Exact negative gradient of [`super::energy::bending_energy`], assembled
/// from per-halfedge curvature vectors. Valid for spatially varying
/// `kappa` and `h0`.
pub fn bending_force(mesh: &HalfedgeMesh, pos: &[Vec3], geom: &Geometry, kappa: &[f64], h0: &[f64]) -> Vec<Vec3> {
    let cv = CurvatureVectors::new(mesh, pos, geom);
    bending_force_with(mesh, geom, &cv, kappa, h0)
}

pub fn bending_force_with(
    mesh: &HalfedgeMesh,
    geom: &Geometry,
    cv: &CurvatureVectors,
    kappa: &[f64],
    h0: &[f64],
) -> Vec<Vec3> {
    let hm = vertex_mean_curvature(mesh, geom);
    let n = mesh.n_vertices();
    // a = kappa (H - H0), b = kappa (H - H0)(H + H0)
    let (a, b): (Vec<f64>, Vec<f64>) = (0..n)
        .map(|v| {
            if !mesh.vertex_alive(v) || !(geom.vertex_area[v] > 0.0) {
                return (0.0, 0.0);
            }
            let h = hm.pointwise[v];
            let d = kappa[v] * (h - h0[v]);
            (d, d * (h + h0[v]))
        })
        .unzip();
    (0..n)
        .into_par_iter()
        .map(|i| {
            if !mesh.vertex_alive(i) {
                return Vec3::zeros();
            }
            mesh.outgoing(i)
                .map(|h| {
                    let j = mesh.head(h);
                    -(a[i] + a[j]) * cv.gauss[h] + (b[i] / 3.0 + 2.0 * b[j] / 3.0) * cv.mean[h]
                        - a[i] * cv.schlafli1[h]
                        - a[j] * cv.schlafli2[h]
                })
                .sum()
        })
        .collect()
}

/// `Delta P * grad V`
pub fn osmotic_force(volume_gradient: &[Vec3], pressure: f64) -> Vec<Vec3> {
    volume_gradient.iter().map(|g| pressure * g).collect()
}

/// `-lambda * grad A`, with the area gradient being the accumulated
/// integrated mean-curvature vector.
pub fn capillary_force(area_gradient: &[Vec3], tension: f64) -> Vec<Vec3> {
    area_gradient.iter().map(|g| -tension * g).collect()
}

/// Exact negative shape gradient of the Dirichlet energy.
///
/// Per face the energy is `eta |u|^2 / (8 A)` with `u = sum_i phi_i e_i`,
/// which is linear in positions.
pub fn line_tension_force(mesh: &HalfedgeMesh, pos: &[Vec3], geom: &Geometry, phi: &[f64], eta: f64) -> Vec<Vec3> {
    let n = mesh.n_vertices();
    if eta == 0.0 {
        return vec![Vec3::zeros(); n];
    }
    (0..n)
        .into_par_iter()
        .map(|i| {
            if !mesh.vertex_alive(i) {
                return Vec3::zeros();
            }
            let mut g = Vec3::zeros();
            for h in mesh.outgoing(i) {
                let Some(f) = mesh.face(h) else { continue };
                let area = geom.face_area[f];
                if !(area > 0.0) {
                    continue;
                }
                let (j, k) = (mesh.head(h), mesh.tail(mesh.prev(h)));
                let u = phi_weighted_edges(&pos[i], &pos[j], &pos[k], phi[i], phi[j], phi[k]);
                let grad_a = grad_face_area(&geom.face_normal[f], &pos[j], &pos[k]);
                g += (2.0 * (phi[j] - phi[k]) * u / area - u.norm_squared() / (area * area) * grad_a) / 8.0;
            }
            -eta * g
        })
        .collect()
}

/// Exact negative shape gradient of the adsorption energy: each face's area
/// gradient weighted by its mean density.
pub fn adsorption_force(mesh: &HalfedgeMesh, pos: &[Vec3], geom: &Geometry, phi: &[f64], epsilon: f64) -> Vec<Vec3> {
    let n = mesh.n_vertices();
    if epsilon == 0.0 {
        return vec![Vec3::zeros(); n];
    }
    (0..n)
        .into_par_iter()
        .map(|i| {
            if !mesh.vertex_alive(i) {
                return Vec3::zeros();
            }
            let g: Vec3 = mesh
                .outgoing(i)
                .filter_map(|h| {
                    let f = mesh.face(h)?;
                    let (j, k) = (mesh.head(h), mesh.tail(mesh.prev(h)));
                    let mean = (phi[i] + phi[j] + phi[k]) / 3.0;
                    Some(mean * grad_face_area(&geom.face_normal[f], &pos[j], &pos[k]))
                })
                .sum();
            -epsilon * g
        })
        .collect()
}
